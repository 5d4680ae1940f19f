"""Monthly aggregation of sentiment scores into analysis-ready panels.

Records are first restricted to a country group (news about any country
whose economy feeds the target's panel), then summarised per calendar
month. Count-based content-analysis scores are normalised by each
article's word count before averaging; value-based scores (tone,
happiness indices, polarity lexica) are averaged directly. Panels are
first-differenced month over month and standardised column-wise, with
degenerate columns pruned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .errors import EmptyMonth, InsufficientHistory, MissingMonth
from .gkg import GkgRecord
from .monthgrid import month_of_date, month_range

ARTICLE_COUNT = "article_count"
TOTAL_WORD_COUNT = "total_word_count"
TONE = "tone"

#: Countries modelled by the forecasting study.
TARGET_COUNTRIES = ("US", "UK", "DE", "NO", "PL", "TR", "JP", "KR", "BR", "MX")

WESTERN_EUROPE = frozenset(
    {"UK", "DE", "FR", "IT", "ES", "NL", "CH", "SE", "NO",
     "BE", "AT", "DK", "FI", "IE", "PT"})

GLOBAL_SET = frozenset(TARGET_COUNTRIES)


def default_country_groups() -> dict[str, frozenset[str]]:
    """Trade-link groups: whose news feeds each target country's panel."""
    groups: dict[str, frozenset[str]] = {}
    for code in ("US", "UK", "DE", "JP", "BR", "MX"):
        groups[code] = GLOBAL_SET
    for code in ("PL", "NO", "TR"):
        groups[code] = WESTERN_EUROPE
    groups["KR"] = frozenset({"KR", "CN"})
    return groups


def is_value_based(key: str) -> bool:
    """Value-based score keys carry computed scores, not word counts."""
    return key.startswith("v")


def location_filter(records: Iterable[GkgRecord],
                    group: frozenset[str] | set[str]) -> list[GkgRecord]:
    """Keep records mentioning at least one country in the group."""
    if not group:
        raise ValueError("country group must be non-empty")
    return [r for r in records
            if any(loc.country_code in group for loc in r.locations)]


@dataclass(frozen=True)
class MonthlyAggregate:
    month: str
    article_count: int
    total_word_count: int
    score_means: dict[str, float]
    score_stds: dict[str, float]


def aggregate_month(records: Sequence[GkgRecord]) -> MonthlyAggregate:
    """Summarise the records of one calendar month.

    A count-based score missing from a record contributes a zero rate;
    a value-based score missing from a record is left out of its mean.
    """
    if not records:
        raise EmptyMonth("cannot aggregate an empty month")
    months = {month_of_date(r.date) for r in records}
    if len(months) > 1:
        raise ValueError(f"records span several months: {sorted(months)}")
    month = months.pop()

    n = len(records)
    score_maps = [{e.key: e.value for e in r.gcam if e.key != "wc"}
                  for r in records]
    count_keys: set[str] = set()
    value_keys: set[str] = set()
    for scores in score_maps:
        for key in scores:
            (value_keys if is_value_based(key) else count_keys).add(key)

    means: dict[str, float] = {}
    stds: dict[str, float] = {}

    tones = np.array([r.tone.average_tone for r in records], dtype=float)
    means[TONE] = float(tones.mean())
    stds[TONE] = float(tones.std())

    for key in count_keys:
        rates = np.array([
            scores.get(key, 0.0) / record.word_count if record.word_count else 0.0
            for record, scores in zip(records, score_maps)])
        means[key] = float(rates.mean())
        stds[key] = float(rates.std())

    for key in value_keys:
        values = np.array([scores[key] for scores in score_maps if key in scores])
        if values.size:
            means[key] = float(values.mean())
            stds[key] = float(values.std())
        else:
            means[key] = 0.0
            stds[key] = 0.0

    return MonthlyAggregate(
        month=month,
        article_count=n,
        total_word_count=sum(r.word_count for r in records),
        score_means=means,
        score_stds=stds,
    )


def aggregate_by_month(records: Sequence[GkgRecord], start: str, end: str,
                       ) -> list[MonthlyAggregate]:
    """One aggregate per month of the inclusive range; gaps are errors."""
    buckets: dict[str, list[GkgRecord]] = {}
    wanted = month_range(start, end)
    for record in records:
        month = month_of_date(record.date)
        if month in set(wanted):
            buckets.setdefault(month, []).append(record)
    missing = [m for m in wanted if m not in buckets]
    if missing:
        raise MissingMonth(f"no records for months {missing}")
    return [aggregate_month(buckets[m]) for m in wanted]


@dataclass(frozen=True)
class SentimentPanel:
    """Differenced, standardised monthly score matrix.

    ``values`` holds the standardised panel; ``diffs`` the raw
    month-over-month differences it was derived from, so folds can be
    re-standardised on their own training windows. ``months[i]`` labels
    the change from the preceding month to that month.
    """

    months: tuple[str, ...]
    score_names: tuple[str, ...]
    values: np.ndarray
    diffs: np.ndarray
    initial_levels: np.ndarray
    fit_means: np.ndarray
    fit_scales: np.ndarray
    fit_rows: int
    pruned_all_zero: tuple[str, ...]
    pruned_zero_variance: tuple[str, ...]

    @property
    def n_months(self) -> int:
        return len(self.months)

    def standardized(self, fit_rows: int, clip: float = 8.0) -> np.ndarray:
        """Standardise the differences using only the first ``fit_rows`` rows.

        Columns constant on the window keep scale one rather than
        dividing by zero. Rows outside the window are clipped at
        ``clip`` standard deviations: a sparse score that is quiet on
        the window but jumps later would otherwise blow up out-of-sample
        projections.
        """
        if not 2 <= fit_rows <= len(self.months):
            raise ValueError(f"fit_rows {fit_rows} outside [2, {len(self.months)}]")
        window = self.diffs[:fit_rows]
        means = window.mean(axis=0)
        scales = window.std(axis=0)
        scales = np.where(scales == 0.0, 1.0, scales)
        values = (self.diffs - means) / scales
        values[fit_rows:] = np.clip(values[fit_rows:], -clip, clip)
        return values

    def reconstruct_levels(self) -> np.ndarray:
        """Undo the differencing from the stored initial levels."""
        return self.initial_levels + np.cumsum(self.diffs, axis=0)

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.score_names.index(name)]


def _panel_columns(aggregates: Sequence[MonthlyAggregate]) -> list[str]:
    keys = sorted({k for agg in aggregates for k in agg.score_means if k != TONE})
    columns = [f"{TONE}_mean", f"{TONE}_std"]
    for key in keys:
        columns.append(f"{key}_mean")
        columns.append(f"{key}_std")
    columns.extend([ARTICLE_COUNT, TOTAL_WORD_COUNT])
    return columns


def build_panel(aggregates: Sequence[MonthlyAggregate],
                fit_rows: int | None = None) -> SentimentPanel:
    """Assemble, prune, difference and standardise the monthly matrix.

    All-zero raw columns are taken to mean the underlying analysis
    system returned nothing and are dropped, as are columns whose
    differences have zero variance (standardising them would divide by
    zero). Standardisation statistics come from the first ``fit_rows``
    differenced rows (default: all of them).
    """
    if len(aggregates) < 3:
        raise InsufficientHistory(f"need at least 3 months, got {len(aggregates)}")
    aggregates = sorted(aggregates, key=lambda a: a.month)
    months = [a.month for a in aggregates]
    if len(set(months)) != len(months):
        raise ValueError("duplicate months")
    if month_range(months[0], months[-1]) != months:
        raise MissingMonth("aggregates do not form a consecutive month range")

    columns = _panel_columns(aggregates)
    raw = np.zeros((len(aggregates), len(columns)))
    for i, agg in enumerate(aggregates):
        for j, column in enumerate(columns):
            if column == ARTICLE_COUNT:
                raw[i, j] = agg.article_count
            elif column == TOTAL_WORD_COUNT:
                raw[i, j] = agg.total_word_count
            elif column.endswith("_mean"):
                raw[i, j] = agg.score_means.get(column[:-5], 0.0)
            else:
                raw[i, j] = agg.score_stds.get(column[:-4], 0.0)

    nonzero = ~np.all(raw == 0.0, axis=0)
    pruned_all_zero = tuple(c for c, keep in zip(columns, nonzero) if not keep)
    columns = [c for c, keep in zip(columns, nonzero) if keep]
    raw = raw[:, nonzero]

    diffs = np.diff(raw, axis=0)
    varying = diffs.std(axis=0) > 0.0
    pruned_zero_variance = tuple(c for c, keep in zip(columns, varying) if not keep)
    columns = [c for c, keep in zip(columns, varying) if keep]
    diffs = diffs[:, varying]
    initial_levels = raw[0, varying]

    n_rows = diffs.shape[0]
    fit_rows = n_rows if fit_rows is None else fit_rows
    if not 2 <= fit_rows <= n_rows:
        raise InsufficientHistory(f"fit window {fit_rows} outside [2, {n_rows}]")
    window = diffs[:fit_rows]
    means = window.mean(axis=0)
    scales = window.std(axis=0)
    scales = np.where(scales == 0.0, 1.0, scales)

    return SentimentPanel(
        months=tuple(months[1:]),
        score_names=tuple(columns),
        values=(diffs - means) / scales,
        diffs=diffs,
        initial_levels=initial_levels,
        fit_means=means,
        fit_scales=scales,
        fit_rows=fit_rows,
        pruned_all_zero=pruned_all_zero,
        pruned_zero_variance=pruned_zero_variance,
    )


def sample_unfiltered(records: Sequence[GkgRecord], n_per_year: int,
                      seed: int) -> list[GkgRecord]:
    """Uniform per-calendar-year sample without replacement.

    Years with fewer than ``n_per_year`` records are kept whole; the
    original record order is preserved within the sample.
    """
    if n_per_year < 1:
        raise ValueError("n_per_year must be at least 1")
    by_year: dict[int, list[int]] = {}
    for i, record in enumerate(records):
        by_year.setdefault(record.date.year, []).append(i)
    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    for year in sorted(by_year):
        indices = by_year[year]
        if len(indices) <= n_per_year:
            chosen.extend(indices)
        else:
            picks = rng.choice(len(indices), size=n_per_year, replace=False)
            chosen.extend(indices[p] for p in np.sort(picks))
    return [records[i] for i in sorted(chosen)]


def save_panel(panel: SentimentPanel, path) -> None:
    """CSV of standardised values plus a JSON transformation sidecar.

    Cells are written with shortest round-trip float formatting so a
    load reproduces the matrix bit for bit.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(",".join(["month", *panel.score_names]) + "\n")
        for month, row in zip(panel.months, panel.values):
            cells = ",".join(repr(float(v)) for v in row)
            handle.write(f"{month},{cells}\n")
    frame = pd.read_csv(path, dtype={"month": str},
                        float_precision="round_trip")
    if tuple(frame.columns[1:]) != panel.score_names or \
            not np.array_equal(frame.iloc[:, 1:].to_numpy(), panel.values):
        raise OSError(f"round-trip check failed for {path}")
    meta = {
        "fit_means": panel.fit_means.tolist(),
        "fit_scales": panel.fit_scales.tolist(),
        "fit_rows": panel.fit_rows,
        "initial_levels": panel.initial_levels.tolist(),
        "pruned_all_zero": list(panel.pruned_all_zero),
        "pruned_zero_variance": list(panel.pruned_zero_variance),
        "std_convention": "population",
    }
    Path(f"{path}.meta.json").write_text(json.dumps(meta, sort_keys=True))


def load_panel(path) -> SentimentPanel:
    path = Path(path)
    frame = pd.read_csv(path, dtype={"month": str}, float_precision="round_trip")
    meta = json.loads(Path(f"{path}.meta.json").read_text())
    values = frame.drop(columns=["month"]).to_numpy(dtype=float)
    means = np.array(meta["fit_means"])
    scales = np.array(meta["fit_scales"])
    return SentimentPanel(
        months=tuple(frame["month"]),
        score_names=tuple(frame.columns[1:]),
        values=values,
        diffs=values * scales + means,
        initial_levels=np.array(meta["initial_levels"]),
        fit_means=means,
        fit_scales=scales,
        fit_rows=int(meta["fit_rows"]),
        pruned_all_zero=tuple(meta["pruned_all_zero"]),
        pruned_zero_variance=tuple(meta["pruned_zero_variance"]),
    )
