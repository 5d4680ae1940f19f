"""End-to-end orchestration: configuration, stages, artifacts, reports.

A run owns an output directory (guarded by a lock file) and executes
stages in order, each writing its artifacts and nothing else's:

* ``ingest``    - scan corpus files, dump normalized records, screen macro series
* ``filter``    - keyword + classifier relevance filtering per dataset
* ``aggregate`` - country-group panels, filtered and unfiltered
* ``granger``   - causality tables per (variable, country)
* ``forecast``  - walk-forward evaluation against the three benchmarks
* ``report``    - RMSE / DM / Granger-count tables and emotion profiles

Everything is deterministic given the config and its seeds; the run
manifest records content hashes of inputs and every artifact written.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import aggregate as agg
from . import relevance as rel
from .econometrics import (
    ALL_VARIANTS,
    BENCHMARKS,
    MODEL,
    PlsModel,
    TimeSeriesFrame,
    adf_test,
    factor_cv,
    forecast_suite,
    granger_tests,
    significant_count,
)
from .econometrics.forecast import _fit_adl  # shared ADL form
from .emotions import (
    default_emotion_map,
    emit_radar,
    load_emotion_map,
    load_radar,
    profile_components,
)
from .errors import (
    InsufficientData,
    MissingArtifact,
    MissingMonth,
    NewsmacroError,
    NonNumeric,
    OutputDirLocked,
)
from .gkg import COMPACT_SCHEMA, GkgSchema, iter_records, scan_file, write_records
from .monthgrid import month_range
from .synthetic import DATASET_VARIABLE

logger = logging.getLogger(__name__)

STAGES = ("ingest", "filter", "aggregate", "granger", "forecast", "report")

VARIABLE_DATASET = {"ip": "growth", "cpi": "inflation"}
VARIABLE_CONTROLS = {
    "ip": ("baltic_dry", "crude_oil"),
    "cpi": ("terms_of_trade", "crude_oil"),
}
SIGNIFICANCE_STARS = (("0.01", "***"), ("0.05", "**"), ("0.1", "*"))


# --------------------------------------------------------------------------
# configuration


@dataclass
class DatasetSpec:
    keywords: list[str]
    labels: Path
    predictions: Path | None


@dataclass
class PipelineConfig:
    base_dir: Path
    corpus: list[Path]
    schema: GkgSchema
    date_start: str
    date_end: str
    datasets: dict[str, DatasetSpec]
    classifier_mode: str
    countries: list[str]
    country_groups: dict[str, frozenset[str]]
    macro: dict
    seeds: dict[str, int]
    cv_folds: int
    n_components: int
    p_max: int
    n_blocks: int
    unfiltered_per_year: int
    emotion_map: Path | None
    adf_max_lag: int
    raw: dict

    @property
    def months(self) -> list[str]:
        return month_range(self.date_start, self.date_end)

    @property
    def variables(self) -> list[str]:
        return [v for v, ds in VARIABLE_DATASET.items() if ds in self.datasets]

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()).hexdigest()

    def macro_path(self, series: str, country: str | None = None) -> Path:
        entry = self.macro[series]
        if isinstance(entry, dict):
            if country not in entry or entry[country] is None:
                raise NewsmacroError(
                    f"config lists no {series} series for {country}")
            entry = entry[country]
        return self.base_dir / entry

    def input_paths(self) -> list[Path]:
        paths = [self.base_dir / p for p in self.corpus]
        for spec in self.datasets.values():
            paths.append(spec.labels)
            if spec.predictions:
                paths.append(spec.predictions)
        for series in ("baltic_dry", "crude_oil"):
            paths.append(self.macro_path(series))
        for variable in self.variables:
            for cc in self.countries:
                paths.append(self.macro_path(variable, cc))
                if variable == "cpi":
                    paths.append(self.macro_path("terms_of_trade", cc))
        if self.emotion_map:
            paths.append(self.emotion_map)
        return sorted(set(paths))


def load_config(path) -> PipelineConfig:
    path = Path(path)
    raw = json.loads(path.read_text())
    base = path.parent

    datasets = {}
    for name, spec in raw["datasets"].items():
        if name not in DATASET_VARIABLE:
            raise NewsmacroError(f"unknown dataset {name!r}")
        keywords = [k.lower() for k in spec["keywords"]]
        if not keywords:
            raise NewsmacroError(f"dataset {name!r} has no keywords")
        datasets[name] = DatasetSpec(
            keywords=keywords,
            labels=base / spec["labels"],
            predictions=base / spec["predictions"] if spec.get("predictions") else None,
        )

    months = month_range(raw["date_start"], raw["date_end"])
    if len(months) < 24:
        raise NewsmacroError(
            f"date range must span at least 24 months, got {len(months)}")

    if raw.get("country_groups"):
        groups = {cc: frozenset(v) for cc, v in raw["country_groups"].items()}
    else:
        groups = agg.default_country_groups()
    for cc in raw["countries"]:
        if cc not in groups:
            raise NewsmacroError(f"no country group defined for {cc!r}")

    mode = raw.get("classifier_mode", "native")
    if mode == "imported-predictions":
        mode = "imported"
    if mode not in ("native", "imported"):
        raise NewsmacroError(f"unknown classifier mode {mode!r}")
    if mode == "imported":
        for name, spec in datasets.items():
            if spec.predictions is None:
                raise NewsmacroError(
                    f"imported mode needs a prediction file for dataset {name!r}")

    return PipelineConfig(
        base_dir=base,
        corpus=[Path(p) for p in raw["corpus"]],
        schema=GkgSchema.from_dict(raw["schema"]),
        date_start=raw["date_start"],
        date_end=raw["date_end"],
        datasets=datasets,
        classifier_mode=mode,
        countries=list(raw["countries"]),
        country_groups=groups,
        macro=raw["macro"],
        seeds={k: int(v) for k, v in raw["seeds"].items()},
        cv_folds=int(raw.get("cv_folds", 10)),
        n_components=int(raw.get("n_components", 3)),
        p_max=int(raw.get("p_max", 3)),
        n_blocks=int(raw.get("n_blocks", 4)),
        unfiltered_per_year=int(raw.get("unfiltered_per_year", 1_000_000)),
        emotion_map=base / raw["emotion_map"] if raw.get("emotion_map") else None,
        adf_max_lag=int(raw.get("adf_max_lag", 6)),
        raw=raw,
    )


# --------------------------------------------------------------------------
# self-checking artifact writers


def write_json_artifact(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, sort_keys=True, indent=1)
    path.write_text(text)
    if json.loads(path.read_text()) != payload:
        raise NewsmacroError(f"round-trip check failed for {path}")


def write_table_artifact(path: Path, header: Sequence[str], rows) -> None:
    rows = [list(map(str, row)) for row in rows]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        if next(reader) != list(header) or [r for r in reader] != rows:
            raise NewsmacroError(f"round-trip check failed for {path}")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# --------------------------------------------------------------------------
# macro ingestion


def load_macro_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a ``month,value`` CSV, validating numbers are finite."""
    months: list[str] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["month", "value"]:
            raise NewsmacroError(f"{path}: header must be month,value")
        for row_no, row in enumerate(reader, start=2):
            try:
                value = float(row[1])
            except (ValueError, IndexError):
                raise NonNumeric(f"{path}:{row_no}: value {row[1:]} not numeric") \
                    from None
            if not np.isfinite(value):
                raise NonNumeric(f"{path}:{row_no}: non-finite value")
            months.append(row[0])
            values.append(value)
    return months, np.array(values)


def ingest_macro(path, months: Sequence[str]) -> np.ndarray:
    """Series values aligned to ``months``; any gap is an error."""
    have_months, values = load_macro_csv(path)
    index = {m: i for i, m in enumerate(have_months)}
    missing = [m for m in months if m not in index]
    if missing:
        raise MissingMonth(f"{path}: missing months {missing}")
    return values[[index[m] for m in months]]


# --------------------------------------------------------------------------
# the run itself


class PipelineRun:
    def __init__(self, config: PipelineConfig, out_dir):
        self.config = config
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self._records_cache: list | None = None

    # -- artifact paths ----------------------------------------------------

    def _records_path(self) -> Path:
        return self.out / "ingest" / "normalized_records.tsv"

    def _filtered_ids_path(self, dataset: str) -> Path:
        return self.out / "filter" / dataset / "filtered_ids.json"

    def _panel_path(self, dataset: str, country: str) -> Path:
        return self.out / "aggregate" / dataset / f"panel_{country}.csv"

    def _forecast_path(self, variable: str, country: str) -> Path:
        return self.out / "forecast" / f"{variable}_{country}.json"

    def _require(self, path: Path) -> Path:
        if not path.exists():
            raise MissingArtifact(path)
        return path

    def _load_records(self):
        if self._records_cache is None:
            path = self._require(self._records_path())
            self._records_cache = list(iter_records(path, COMPACT_SCHEMA))
        return self._records_cache

    # -- stages ------------------------------------------------------------

    def stage_ingest(self) -> None:
        out = self.out / "ingest"
        out.mkdir(parents=True, exist_ok=True)
        records = []
        stats_by_file = {}
        for rel_path in self.config.corpus:
            path = self.config.base_dir / rel_path
            stats = scan_file(path, self.config.schema, records.append)
            stats_by_file[str(rel_path)] = stats.to_dict()
        written = write_records(records, self._records_path(), COMPACT_SCHEMA)
        if written != len(records):
            raise NewsmacroError(
                f"normalized dump wrote {written} of {len(records)} records")
        self._records_cache = records
        totals = {
            "parsed": sum(s["parsed"] for s in stats_by_file.values()),
            "skipped": sum(s["skipped"] for s in stats_by_file.values()),
        }
        write_json_artifact(out / "scan_stats.json",
                            {"files": stats_by_file, "totals": totals})
        self._screen_macro(out)

    def _screen_macro(self, out: Path) -> None:
        screening = {}
        series_paths = {"baltic_dry": self.config.macro_path("baltic_dry"),
                        "crude_oil": self.config.macro_path("crude_oil")}
        for variable in self.config.variables:
            for cc in self.config.countries:
                series_paths[f"{variable}_{cc}"] = self.config.macro_path(variable, cc)
                if variable == "cpi":
                    series_paths[f"terms_of_trade_{cc}"] = \
                        self.config.macro_path("terms_of_trade", cc)
        wanted = set(self.config.months)
        for name, path in sorted(series_paths.items()):
            months, values = load_macro_csv(path)
            missing = sorted(wanted - set(months))
            if missing:
                raise MissingMonth(f"{path}: macro series does not cover the "
                                   f"configured range, missing {missing}")
            max_lag = min(self.config.adf_max_lag, max(0, (values.size - 12) // 3))
            try:
                result = adf_test(values, max_lag=max_lag)
            except (InsufficientData, NewsmacroError) as exc:
                screening[name] = {"error": str(exc), "n_obs": int(values.size)}
                continue
            screening[name] = {"span": [months[0], months[-1]],
                               **result.to_dict()}
            if not result.reject_at_5pct:
                logger.warning("macro series %s: unit root not rejected at 5%% "
                               "(t=%.3f)", name, result.t_stat)
        write_json_artifact(out / "macro_screening.json", screening)

    def stage_filter(self) -> None:
        out = self.out / "filter"
        out.mkdir(parents=True, exist_ok=True)
        records = self._load_records()

        sample = agg.sample_unfiltered(records, self.config.unfiltered_per_year,
                                       self.config.seeds["sample"])
        write_json_artifact(out / "unfiltered_ids.json",
                            sorted(r.record_id for r in sample))

        for name, spec in self.config.datasets.items():
            ds_out = out / name
            ds_out.mkdir(parents=True, exist_ok=True)
            passers = [r for r in records if rel.keyword_filter(r, spec.keywords)]
            labels = rel.read_labels(spec.labels)

            if self.config.classifier_mode == "native":
                labelled = [r for r in passers if r.record_id in labels]
                vocab = rel.ThemeVocabulary.build([r.themes for r in labelled])
                examples = [rel.LabeledExample(
                    record_id=r.record_id,
                    encoded_themes=rel.encode_themes(r, vocab),
                    label=labels[r.record_id]) for r in labelled]
                metrics = rel.evaluate_kfold(examples, k=self.config.cv_folds,
                                             seed=self.config.seeds["cv"])
                model = rel.train_naive_bayes(examples, vocab=vocab)
                model.save(ds_out / "classifier.json")
                write_json_artifact(ds_out / "metrics.json", metrics.to_dict())
                predictions = [model.predict_record(r) for r in passers]
                rel.write_predictions(predictions, ds_out / "predictions.csv")
                rel.import_predictions(ds_out / "predictions.csv")  # self-check
                rel.export_encoded_sequences(passers, vocab,
                                             ds_out / "sequences.csv")
            else:
                predictions = rel.import_predictions(spec.predictions)

            kept, stats = rel.filter_corpus(records, spec.keywords,
                                            predictions=predictions)
            write_json_artifact(ds_out / "filtered_ids.json",
                                sorted(r.record_id for r in kept))
            write_json_artifact(ds_out / "noise_stats.json", stats.to_dict())

    def stage_aggregate(self) -> None:
        records = self._load_records()
        by_id = {r.record_id: r for r in records}
        groups = self.config.country_groups
        start, end = self.config.date_start, self.config.date_end

        def build(dataset_label: str, ids: list[str]) -> None:
            subset = [by_id[i] for i in ids if i in by_id]
            for cc in self.config.countries:
                located = agg.location_filter(subset, groups[cc])
                monthly = agg.aggregate_by_month(located, start, end)
                panel = agg.build_panel(monthly)
                path = self._panel_path(dataset_label, cc)
                path.parent.mkdir(parents=True, exist_ok=True)
                agg.save_panel(panel, path)

        for name in self.config.datasets:
            ids = json.loads(self._require(self._filtered_ids_path(name)).read_text())
            build(name, ids)
        unfiltered_ids = json.loads(
            self._require(self.out / "filter" / "unfiltered_ids.json").read_text())
        build("unfiltered", unfiltered_ids)

    def _target_series(self, variable: str, cc: str, months) -> np.ndarray:
        return ingest_macro(self.config.macro_path(variable, cc), months)

    def stage_granger(self) -> None:
        out = self.out / "granger"
        out.mkdir(parents=True, exist_ok=True)
        summary: dict = {}
        for variable in self.config.variables:
            dataset = VARIABLE_DATASET[variable]
            summary[variable] = {}
            for cc in self.config.countries:
                panel = agg.load_panel(self._require(self._panel_path(dataset, cc)))
                unfiltered = agg.load_panel(
                    self._require(self._panel_path("unfiltered", cc)))
                y = self._target_series(variable, cc, panel.months)
                y_unfiltered = self._target_series(variable, cc, unfiltered.months)
                counts = {}
                for label, pan, target in (("filtered", panel, y),
                                           ("unfiltered", unfiltered, y_unfiltered)):
                    results = granger_tests(pan, target, max_lag=3)
                    write_table_artifact(
                        out / f"{variable}_{cc}_{label}.csv",
                        ["score", "lag", "direction", "f_stat", "p_value",
                         "adjusted_p", "untestable"],
                        [[r.score, r.lag, r.direction, repr(r.f_stat),
                          repr(r.p_value), repr(r.adjusted_p), r.untestable]
                         for r in results])
                    counts[label] = significant_count(results, level=0.05)
                summary[variable][cc] = counts
        write_json_artifact(out / "summary.json", summary)

    def _build_frame(self, variable: str, cc: str, months) -> TimeSeriesFrame:
        target = self._target_series(variable, cc, months)
        columns = [variable]
        values = [target]
        for control in VARIABLE_CONTROLS[variable]:
            needs_country = isinstance(self.config.macro.get(control), dict)
            series = ingest_macro(
                self.config.macro_path(control, cc if needs_country else None),
                months)
            columns.append(control)
            values.append(series)
        return TimeSeriesFrame(
            months=tuple(months),
            columns=tuple(columns),
            values=np.column_stack(values),
            target=variable,
            controls=tuple(columns[1:]),
        )

    def stage_forecast(self) -> None:
        out = self.out / "forecast"
        out.mkdir(parents=True, exist_ok=True)
        for variable in self.config.variables:
            dataset = VARIABLE_DATASET[variable]
            for cc in self.config.countries:
                panel = agg.load_panel(self._require(self._panel_path(dataset, cc)))
                unfiltered = agg.load_panel(
                    self._require(self._panel_path("unfiltered", cc)))
                frame = self._build_frame(variable, cc, panel.months)
                tone = panel.diffs[:, panel.score_names.index("tone_mean")]
                report = forecast_suite(
                    frame, panel, ALL_VARIANTS,
                    unfiltered_panel=unfiltered, tone=tone,
                    n_components=self.config.n_components,
                    p_max=self.config.p_max, n_blocks=self.config.n_blocks)
                write_json_artifact(self._forecast_path(variable, cc),
                                    report.to_dict())
                self._write_factor_cv(out, variable, cc, frame, panel,
                                      report.lag_order)

    def _write_factor_cv(self, out: Path, variable: str, cc: str,
                         frame: TimeSeriesFrame, panel, p: int) -> None:
        """Table-3-shaped in-sample R^2 / CV RSS per component count."""
        y = frame.target_values
        X_std = panel.standardized(y.size)
        _, residuals, rows = _fit_adl(y, frame.control_values, p,
                                      np.arange(y.size))
        max_a = min(5, X_std.shape[1], residuals.size - 2)
        table = factor_cv(X_std[rows], residuals, range(0, max_a + 1))
        write_table_artifact(
            out / f"factor_cv_{variable}_{cc}.csv",
            ["n_components", "r_squared", "cv_rss"],
            [[row.n_components, repr(row.r_squared), repr(row.cv_rss)]
             for row in table])

    def stage_report(self) -> None:
        out = self.out / "report"
        out.mkdir(parents=True, exist_ok=True)
        emotion_map = (load_emotion_map(self.config.emotion_map)
                       if self.config.emotion_map else default_emotion_map())
        master: dict = {"config_hash": self.config.config_hash, "variables": {}}

        granger_summary_path = self.out / "granger" / "summary.json"
        granger_summary = json.loads(self._require(granger_summary_path).read_text())

        for variable in self.config.variables:
            rmse_rows, dm_rows, granger_rows = [], [], []
            for cc in self.config.countries:
                payload = json.loads(
                    self._require(self._forecast_path(variable, cc)).read_text())
                variants = payload["variants"]
                model_rmse = variants[MODEL]["rmse"]
                row = [cc, repr(model_rmse)]
                marks = []
                for bench in BENCHMARKS:
                    bench_rmse = variants[bench]["rmse"]
                    row.append(repr(bench_rmse))
                    marks.append("outperform" if model_rmse < bench_rmse
                                 else "underperform" if model_rmse > bench_rmse
                                 else "equal")
                row.extend(marks)
                row.append(_format_significance(
                    variants[MODEL]["significant_counts"]))
                row.append(payload["lag_order"])
                rmse_rows.append(row)
                dm_rows.append([cc] + [
                    repr(payload["dm_vs_benchmarks"][b]["p_value"])
                    for b in BENCHMARKS])
                counts = granger_summary[variable][cc]
                granger_rows.append([cc, counts["filtered"], counts["unfiltered"]])
                self._emit_emotions(out, variable, cc, payload, emotion_map)

            write_table_artifact(
                out / f"rmse_{variable}.csv",
                ["country", "model", "bm1", "bm2", "bm3",
                 "vs_bm1", "vs_bm2", "vs_bm3", "significant", "lag"],
                rmse_rows)
            write_table_artifact(
                out / f"dm_{variable}.csv",
                ["country", "model_vs_bm1", "model_vs_bm2", "model_vs_bm3"],
                dm_rows)
            write_table_artifact(
                out / f"granger_counts_{variable}.csv",
                ["country", "filtered", "unfiltered"],
                granger_rows)
            master["variables"][variable] = {
                "rmse_table": f"rmse_{variable}.csv",
                "dm_table": f"dm_{variable}.csv",
                "granger_table": f"granger_counts_{variable}.csv",
            }
        write_json_artifact(out / "report.json", master)

    def _emit_emotions(self, out: Path, variable: str, cc: str,
                       payload: dict, emotion_map) -> None:
        if payload.get("pls_model") is None:
            return
        pls = PlsModel.from_dict(payload["pls_model"])
        factor_ps = payload["variants"][MODEL]["factor_p_values"]
        n = pls.n_components
        significance = [min(factor_ps[a::n]) if factor_ps[a::n] else 1.0
                        for a in range(n)]
        profiles = profile_components(pls, emotion_map, significance, level=0.1)
        if profiles:
            path = out / f"emotions_{variable}_{cc}.json"
            emit_radar(profiles, path)
            if load_radar(path) != profiles:
                raise NewsmacroError(f"round-trip check failed for {path}")

    # -- orchestration -------------------------------------------------------

    def run(self, stages: Sequence[str]) -> Path:
        """Execute stages in pipeline order; returns the manifest path."""
        unknown = set(stages) - set(STAGES)
        if unknown:
            raise NewsmacroError(f"unknown stages: {sorted(unknown)}")
        ordered = [s for s in STAGES if s in stages]
        lock = self.out / ".lock"
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise OutputDirLocked(
                f"{self.out} is locked by another run (remove {lock} if stale)") \
                from None
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            for stage in ordered:
                logger.info("stage %s", stage)
                try:
                    getattr(self, f"stage_{stage}")()
                except NewsmacroError as exc:
                    exc.args = (f"[stage {stage}] {exc}",)
                    raise
            return self._write_manifest()
        finally:
            lock.unlink(missing_ok=True)

    def _write_manifest(self) -> Path:
        artifacts = {}
        for path in sorted(self.out.rglob("*")):
            if path.is_file() and path.name not in ("manifest.json", ".lock"):
                artifacts[str(path.relative_to(self.out))] = _sha256(path)
        manifest = {
            "config_hash": self.config.config_hash,
            "inputs": {str(p): _sha256(p) for p in self.config.input_paths()
                       if p.exists()},
            "artifacts": artifacts,
        }
        path = self.out / "manifest.json"
        write_json_artifact(path, manifest)
        return path


def _format_significance(counts: dict[str, int]) -> str:
    parts = [f"{stars}({counts[level]})" for level, stars in SIGNIFICANCE_STARS
             if counts.get(level, 0) > 0]
    return ",".join(parts)


def run_pipeline(config_path, out_dir, stages: Sequence[str] = STAGES,
                 seed: int | None = None) -> Path:
    config = load_config(config_path)
    if seed is not None:
        config.seeds = {"cv": seed, "sample": seed + 1}
    return PipelineRun(config, out_dir).run(stages)
