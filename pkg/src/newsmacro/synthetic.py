"""Synthetic news-and-macro world with plantable sentiment causality.

Builds a corpus of GKG-style records, label fixtures, and macro series
in which a latent monthly mood drives both the content-analysis scores
of relevant articles and (with one month's delay) the macro targets.
Irrelevant articles carry their own confounding latent, so filtering
genuinely matters: the latent is recoverable from a filtered panel and
diluted in an unfiltered one.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gkg import COMPACT_SCHEMA, GcamEntry, GkgRecord, LocationRef, ToneBlock, write_records
from .monthgrid import month_range
from .relevance import LabeledExample, ThemeVocabulary, encode_themes

GROWTH_POOL = (
    "ECON_GDP_GROWTH", "ECON_INDUSTRIAL_OUTPUT", "ECON_MANUFACTURING_ACTIVITY",
    "ECON_TRADE_VOLUME", "ECON_EXPORT_ORDERS", "ECON_BUSINESS_INVESTMENT",
    "ECON_FACTORY_PRODUCTION", "ECON_GROWTH_FORECAST",
)
INFLATION_POOL = (
    "ECON_INFLATION", "ECON_CONSUMER_PRICES", "ECON_COST_OF_LIVING",
    "ECON_INTEREST_RATES", "ECON_CENTRAL_BANK_POLICY", "ECON_WAGE_PRESSURE",
    "ECON_FOOD_PRICES", "ECON_ENERGY_PRICES",
)
ECON_NOISE_POOL = (
    "ECON_STOCKMARKET", "ECON_EARNINGS_SEASON", "ECON_MERGERS_ACQUISITIONS",
    "ECON_CRYPTOCURRENCY", "ECON_REAL_ESTATE_LUXURY", "ECON_CELEBRITY_WEALTH",
    "ECON_SPORTS_SPONSORSHIP", "ECON_LOTTERY",
)
COMMON_POOL = (
    "TAX_FNCACT_MINISTER", "EPU_POLICY_GOVERNMENT", "GENERAL_GOVERNMENT",
    "MEDIA_MSM", "USPEC_POLITICS_GENERAL", "SOC_POINTSOFINTEREST",
)
OTHER_POOL = (
    "SPORTS_FOOTBALL", "ENTERTAINMENT_MUSIC", "WEATHER_STORM", "CRIME_PETTY",
    "HEALTH_PANDEMIC", "SCIENCE_SPACE", "TOURISM_TRAVEL", "EDUCATION_SCHOOLS",
)

RELEVANT_POOLS = {"growth": GROWTH_POOL, "inflation": INFLATION_POOL}
DATASET_VARIABLE = {"growth": "ip", "inflation": "cpi"}

COUNTRY_NAMES = {
    "US": "United States", "UK": "United Kingdom", "DE": "Germany",
    "NO": "Norway", "PL": "Poland", "TR": "Turkey", "JP": "Japan",
    "KR": "South Korea", "BR": "Brazil", "MX": "Mexico", "CN": "China",
    "FR": "France", "IN": "India", "AU": "Australia", "CA": "Canada",
    "ES": "Spain",
}
_LOCATION_CODES = tuple(COUNTRY_NAMES)
_LOCATION_WEIGHTS = np.array(
    [0.13, 0.07, 0.07, 0.04, 0.05, 0.05, 0.07, 0.09, 0.05, 0.05,
     0.11, 0.05, 0.05, 0.04, 0.04, 0.04])

_WNA_AFFECTS = {
    "happiness": ("joy", "cheerfulness", "euphoria", "contentment",
                  "enthusiasm", "gratitude"),
    "sadness": ("sadness", "misery", "despair"),
    "anger": ("anger", "wrath", "annoyance"),
    "fear": ("fear", "anxiety", "panic"),
    "surprise": ("surprise", "amazement", "astonishment"),
    "disgust": ("disgust", "loathing", "repugnance"),
    "contempt": ("contempt", "disdain", "scorn"),
}
_EMOTION_LOADINGS = {
    "happiness": 0.30, "sadness": -0.20, "anger": 0.25, "fear": -0.25,
    "surprise": 0.05, "disgust": -0.10, "contempt": -0.08,
}
_LM_KEYS = {
    "c16.positive": 0.30, "c16.negative": 0.25, "c16.uncertainty": -0.25,
    "c16.litigious": 0.0, "c16.modalstrong": 0.0, "c16.modalweak": 0.0,
}
_LANGUAGES = ("en", "fr", "de", "es", "hi", "id", "ko", "ar", "pt", "ru",
              "ur", "zh")
_LANGUAGE_WEIGHTS = np.array(
    [0.55, 0.06, 0.06, 0.12, 0.01, 0.02, 0.03, 0.02, 0.05, 0.04, 0.0, 0.04])


def count_score_keys() -> dict[str, float]:
    """Count-based score keys with their loadings on the latent mood."""
    keys: dict[str, float] = {}
    for emotion, affects in _WNA_AFFECTS.items():
        for affect in affects:
            keys[f"c15.{affect}"] = _EMOTION_LOADINGS[emotion]
    keys.update(_LM_KEYS)
    return keys


def value_score_emotions() -> dict[str, str]:
    """Value-based score keys mapped to the emotion family they express."""
    mapping = {f"v10.{lang}": "happiness" for lang in _LANGUAGES}
    for lang in ("en", "es"):
        for level in range(1, 9):
            mapping[f"v19.{lang}.p{level}"] = "happiness"
            mapping[f"v19.{lang}.n{level}"] = "anger"
    return mapping


@dataclass
class WorldConfig:
    """Knobs of the synthetic world; defaults form a two-country demo."""

    seed: int = 0
    start: str = "2015-03"
    end: str = "2020-06"
    countries: tuple[str, ...] = ("US", "KR")
    datasets: tuple[str, ...] = ("growth", "inflation")
    mean_articles: dict[str, float] = field(default_factory=lambda: {
        "growth": 45.0, "inflation": 45.0, "econ_noise": 35.0, "other": 80.0})
    n_labeled: int = 700
    unfiltered_per_year: int = 1200
    contamination: float = 0.15
    vagueness: float = 0.06
    latent_persistence: float = 0.97
    target_ar: float = 0.25
    signal_gain: dict[str, float] = field(default_factory=lambda: {
        "ip": 1.3, "cpi": 0.4})
    target_noise: dict[str, float] = field(default_factory=lambda: {
        "ip": 0.75, "cpi": 0.22})
    tone_loading: float = 0.25

    @classmethod
    def small(cls, seed: int = 0) -> "WorldConfig":
        """One country, growth only: the fast acceptance-test world."""
        return cls(
            seed=seed,
            countries=("US",),
            datasets=("growth",),
            mean_articles={"growth": 40.0, "inflation": 0.0,
                           "econ_noise": 30.0, "other": 55.0},
            n_labeled=500,
            unfiltered_per_year=900,
        )


class _ArticleFactory:
    def __init__(self, config: WorldConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.count_keys = count_score_keys()
        self.value_emotions = value_score_emotions()
        self._count_names = list(self.count_keys)
        self._count_loadings = np.array([self.count_keys[k]
                                         for k in self._count_names])
        # Stable per-key base rates, seeded independently of the draw stream.
        base_rng = np.random.default_rng(12345)
        self._count_bases = base_rng.uniform(0.004, 0.02,
                                             size=len(self._count_names))
        self.base_rates = dict(zip(self._count_names, self._count_bases))
        self.sequence = 0

    @staticmethod
    def _draw(rng, pool, n: int) -> list[str]:
        picks = rng.choice(len(pool), size=min(n, len(pool)), replace=False)
        return [pool[i] for i in picks]

    def _themes(self, article_class: str) -> list[str]:
        rng = self.rng
        if article_class in RELEVANT_POOLS:
            if rng.random() < self.config.vagueness:
                # Thematically vague piece: the theme tagger found only
                # generic labels, so no classifier can get it right.
                themes = self._draw(rng, ECON_NOISE_POOL, 1)
                themes.extend(self._draw(rng, COMMON_POOL, int(rng.integers(2, 4))))
                rng.shuffle(themes)
                return themes
            themes = self._draw(rng, RELEVANT_POOLS[article_class],
                                int(rng.integers(2, 5)))
            if rng.random() < self.config.contamination:
                themes.append(ECON_NOISE_POOL[rng.integers(len(ECON_NOISE_POOL))])
        elif article_class == "econ_noise":
            themes = self._draw(rng, ECON_NOISE_POOL, int(rng.integers(2, 5)))
            if rng.random() < self.config.contamination:
                contaminant = GROWTH_POOL + INFLATION_POOL
                themes.append(contaminant[rng.integers(len(contaminant))])
        else:
            themes = self._draw(rng, OTHER_POOL, int(rng.integers(2, 6)))
        themes.extend(self._draw(rng, COMMON_POOL, int(rng.integers(1, 4))))
        rng.shuffle(themes)
        return themes

    def _locations(self, forced: tuple[str, ...] = ()) -> tuple[LocationRef, ...]:
        rng = self.rng
        n = int(rng.integers(1, 4))
        codes = list(forced)
        codes.extend(_LOCATION_CODES[i] for i in
                     rng.choice(len(_LOCATION_CODES), size=n, p=_LOCATION_WEIGHTS))
        refs = []
        for code in dict.fromkeys(codes):  # dedupe, keep order
            name = COUNTRY_NAMES[code]
            refs.append(LocationRef(
                country_code=code, full_name=name,
                sub_fields=("1", name, code, "", "0", "0", code)))
        return tuple(refs)

    def _gcam(self, latent: float, loaded: bool) -> tuple[tuple[GcamEntry, ...], int]:
        rng = self.rng
        wc = int(min(max(rng.lognormal(5.6, 0.45), 80.0), 2000.0))
        entries = [GcamEntry("wc", float(wc))]
        jitter = rng.normal(0.0, 0.25)
        exponents = (self._count_loadings * latent if loaded else 0.0) + jitter
        rates = self._count_bases * np.exp(np.clip(exponents, -3.0, 3.0))
        counts = rng.poisson(rates * wc)
        entries.extend(GcamEntry(key, float(count))
                       for key, count in zip(self._count_names, counts)
                       if count > 0)
        language = _LANGUAGES[rng.choice(len(_LANGUAGES), p=_LANGUAGE_WEIGHTS)]
        effect = 0.3 * latent if loaded else 0.0
        entries.append(GcamEntry(
            f"v10.{language}", round(float(rng.normal(5.0 + effect, 0.35)), 4)))
        senticon_langs = ("en",) if language != "es" else ("en", "es")
        for lang in senticon_langs:
            levels = [lvl for lvl in range(1, 9)
                      if lvl < 7 or rng.random() <= 0.35]
            shifts = np.array([0.04 * latent * (9 - lvl) / 8 if loaded else 0.0
                               for lvl in levels])
            for polarity in ("p", "n"):
                values = rng.normal(0.35 + shifts, 0.05)
                entries.extend(
                    GcamEntry(f"v19.{lang}.{polarity}{lvl}", round(float(v), 4))
                    for lvl, v in zip(levels, values))
        return tuple(entries), wc

    def make(self, month: str, article_class: str, latent: float,
             loaded: bool, forced_locations: tuple[str, ...] = ()) -> GkgRecord:
        rng = self.rng
        year, mon = int(month[:4]), int(month[5:7])
        day = int(rng.integers(1, 28))
        timestamp = _dt.datetime(year, mon, day, int(rng.integers(0, 24)),
                                 int(rng.integers(0, 60)), 0,
                                 tzinfo=_dt.timezone.utc)
        self.sequence += 1
        record_id = f"{timestamp:%Y%m%d%H%M%S}-{self.sequence}"
        gcam, wc = self._gcam(latent, loaded)
        tone_centre = self.config.tone_loading * latent if loaded else 0.0
        tone = float(np.clip(rng.normal(tone_centre, 1.3), -20.0, 20.0))
        extra = tuple(round(float(v), 2) for v in rng.uniform(0, 10, size=5))
        return GkgRecord(
            record_id=record_id,
            timestamp=timestamp,
            document_url=f"https://news.example.org/{year}/{self.sequence}",
            themes=tuple(self._themes(article_class)),
            locations=self._locations(forced_locations),
            tone=ToneBlock(average_tone=round(tone, 2), extra_dimensions=extra),
            gcam=gcam,
            word_count=wc,
        )


def _ar1_path(rng: np.random.Generator, T: int, persistence: float,
              innovation_sd: float = 1.0) -> np.ndarray:
    stationary_sd = innovation_sd / np.sqrt(1.0 - persistence ** 2)
    path = np.empty(T)
    path[0] = rng.normal(0.0, stationary_sd)
    for t in range(1, T):
        path[t] = persistence * path[t - 1] + rng.normal(0.0, innovation_sd)
    return path


@dataclass
class World:
    config: WorldConfig
    months: list[str]
    records: list[GkgRecord]
    classes: dict[str, str]              # record id -> article class
    latents: dict[str, np.ndarray]       # dataset -> latent level path
    macro: dict[str, np.ndarray]         # series name -> values per month

    def relevant_ids(self, dataset: str) -> set[str]:
        return {rid for rid, cls in self.classes.items() if cls == dataset}


def build_world(config: WorldConfig) -> World:
    """Draw the latents, the corpus and the macro series."""
    rng = np.random.default_rng(config.seed)
    months = month_range(config.start, config.end)
    T = len(months)

    latents = {ds: _ar1_path(rng, T, config.latent_persistence)
               for ds in ("growth", "inflation")}
    confounder = _ar1_path(rng, T, config.latent_persistence)

    factory = _ArticleFactory(config, rng)
    records: list[GkgRecord] = []
    classes: dict[str, str] = {}
    class_latents = {
        "growth": ("growth", True),
        "inflation": ("inflation", True),
        "econ_noise": ("confounder", True),
        "other": ("confounder", False),
    }
    latent_paths = {"growth": latents["growth"],
                    "inflation": latents["inflation"],
                    "confounder": confounder}

    anchor_codes = ("US", "KR", "CN", "DE")
    for t, month in enumerate(months):
        for article_class, mean in config.mean_articles.items():
            if mean <= 0:
                continue
            n = max(3, int(rng.poisson(mean))) \
                if article_class != "other" else int(rng.poisson(mean))
            latent_name, loaded = class_latents[article_class]
            latent = latent_paths[latent_name][t]
            for i in range(n):
                forced = anchor_codes if i < 2 and article_class != "other" else ()
                record = factory.make(month, article_class, latent, loaded,
                                      forced_locations=forced)
                records.append(record)
                classes[record.record_id] = article_class

    macro: dict[str, np.ndarray] = {}
    macro["baltic_dry"] = _ar1_path(rng, T, 0.3, 2.0)
    macro["crude_oil"] = _ar1_path(rng, T, 0.25, 1.8)
    for cc in config.countries:
        macro[f"terms_of_trade_{cc}"] = _ar1_path(rng, T, 0.2, 0.8)

    controls_for = {"ip": ("baltic_dry", "crude_oil"),
                    "cpi": ("terms_of_trade_{cc}", "crude_oil")}
    control_gain = {"ip": (0.15, 0.10), "cpi": (0.12, 0.08)}
    for dataset in config.datasets:
        variable = DATASET_VARIABLE[dataset]
        diffs = np.diff(latents[dataset], prepend=latents[dataset][0])
        for cc in config.countries:
            gain = config.signal_gain[variable] * (1.0 if cc == "US" else 0.9)
            sigma = config.target_noise[variable]
            names = [n.format(cc=cc) for n in controls_for[variable]]
            series = np.empty(T)
            series[0] = rng.normal(0.0, sigma)
            for t in range(1, T):
                value = config.target_ar * series[t - 1] + gain * diffs[t - 1]
                for control_name, g in zip(names, control_gain[variable]):
                    value += g * macro[control_name][t - 1]
                series[t] = value + rng.normal(0.0, sigma)
            macro[f"{variable}_{cc}"] = series

    return World(config=config, months=months, records=records,
                 classes=classes, latents=latents, macro=macro)


def _write_macro_csv(path: Path, months, values) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("month,value\n")
        for month, value in zip(months, values):
            handle.write(f"{month},{repr(float(value))}\n")


def _pipeline_config(config: WorldConfig, paths: dict) -> dict:
    datasets = {}
    for dataset in config.datasets:
        datasets[dataset] = {
            "keywords": ["econ"],
            "labels": paths["labels"][dataset],
            "predictions": None,
        }
    macro = {
        "baltic_dry": paths["macro"]["baltic_dry"],
        "crude_oil": paths["macro"]["crude_oil"],
        "ip": {cc: paths["macro"].get(f"ip_{cc}")
               for cc in config.countries if f"ip_{cc}" in paths["macro"]},
        "cpi": {cc: paths["macro"].get(f"cpi_{cc}")
                for cc in config.countries if f"cpi_{cc}" in paths["macro"]},
        "terms_of_trade": {cc: paths["macro"][f"terms_of_trade_{cc}"]
                           for cc in config.countries},
    }
    return {
        "corpus": paths["corpus"],
        "schema": COMPACT_SCHEMA.to_dict(),
        "date_start": config.start,
        "date_end": config.end,
        "datasets": datasets,
        "classifier_mode": "native",
        "countries": list(config.countries),
        "country_groups": None,
        "macro": macro,
        "seeds": {"cv": config.seed, "sample": config.seed + 1},
        "cv_folds": 10,
        "n_components": 3,
        "p_max": 3,
        "n_blocks": 4,
        "unfiltered_per_year": config.unfiltered_per_year,
        "emotion_map": None,
        "adf_max_lag": 6,
    }


def generate_world(config: WorldConfig, out_dir) -> Path:
    """Write corpus, labels, macro CSVs, pipeline config and ground truth.

    Returns the path of the pipeline config JSON.
    """
    out = Path(out_dir)
    (out / "corpus").mkdir(parents=True, exist_ok=True)
    (out / "macro").mkdir(exist_ok=True)
    world = build_world(config)
    rng = np.random.default_rng(config.seed + 99)

    by_year: dict[int, list[GkgRecord]] = {}
    for record in world.records:
        by_year.setdefault(record.date.year, []).append(record)
    corpus_paths = []
    for year in sorted(by_year):
        rows = sorted(by_year[year], key=lambda r: (r.timestamp, r.record_id))
        rel = f"corpus/gkg_{year}.tsv"
        write_records(rows, out / rel)
        corpus_paths.append(rel)

    labels_paths: dict[str, str] = {}
    keyword_pass = [r for r in world.records
                    if any("econ" in t.lower() for t in r.themes)]
    for dataset in config.datasets:
        relevant = world.relevant_ids(dataset)
        ids = [r.record_id for r in keyword_pass]
        n = min(config.n_labeled, len(ids))
        chosen = sorted(rng.choice(len(ids), size=n, replace=False))
        rel = f"labels_{dataset}.csv"
        with open(out / rel, "w", encoding="utf-8") as handle:
            handle.write("record_id,label\n")
            for index in chosen:
                rid = ids[index]
                handle.write(f"{rid},{1 if rid in relevant else 0}\n")
        labels_paths[dataset] = rel

    macro_paths: dict[str, str] = {}
    for name, values in world.macro.items():
        rel = f"macro/{name}.csv"
        _write_macro_csv(out / rel, world.months, values)
        macro_paths[name] = rel

    paths = {"corpus": corpus_paths, "labels": labels_paths, "macro": macro_paths}
    config_path = out / "config.json"
    config_path.write_text(json.dumps(_pipeline_config(config, paths),
                                      sort_keys=True, indent=1))

    truth = {
        "months": world.months,
        "latents": {k: v.tolist() for k, v in world.latents.items()},
        "class_counts": {cls: sum(1 for c in world.classes.values() if c == cls)
                         for cls in set(world.classes.values())},
        "relevant_ids": {ds: sorted(world.relevant_ids(ds))
                         for ds in config.datasets},
        "n_records": len(world.records),
    }
    (out / "truth.json").write_text(json.dumps(truth, sort_keys=True))
    return config_path


def synthesize_labeled_corpus(seed: int, n: int, contamination: float = 0.15,
                              max_len: int = 50,
                              ) -> tuple[list[LabeledExample], ThemeVocabulary]:
    """Stand-alone labelled theme corpus for classifier tests.

    Positives draw from the growth pool, negatives from the inflation
    and distractor pools; all classes share the common pool, and
    ``contamination`` controls cross-pool leakage.
    """
    config = WorldConfig(seed=seed, contamination=contamination)
    rng = np.random.default_rng(seed)
    factory = _ArticleFactory(config, rng)
    theme_lists: list[list[str]] = []
    labels: list[int] = []
    for _ in range(n):
        if rng.random() < 0.5:
            article_class, label = "growth", 1
        else:
            article_class, label = \
                ("inflation", 0) if rng.random() < 0.5 else ("econ_noise", 0)
        theme_lists.append(factory._themes(article_class))
        labels.append(label)
    vocab = ThemeVocabulary.build(theme_lists, max_len=max_len)
    examples = [LabeledExample(record_id=f"r{i}",
                               encoded_themes=encode_themes(themes, vocab),
                               label=label)
                for i, (themes, label) in enumerate(zip(theme_lists, labels))]
    return examples, vocab
