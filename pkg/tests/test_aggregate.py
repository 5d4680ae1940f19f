import numpy as np
import pytest

from conftest import make_record
from newsmacro.aggregate import (
    SentimentPanel,
    aggregate_by_month,
    aggregate_month,
    build_panel,
    default_country_groups,
    load_panel,
    location_filter,
    sample_unfiltered,
    save_panel,
)
from newsmacro.errors import EmptyMonth, InsufficientHistory, MissingMonth


def test_single_record_count_rate():
    record = make_record(gcam=[("wc", 125), ("c2.14", 3)], word_count=125)
    agg = aggregate_month([record])
    assert agg.score_means["c2.14"] == pytest.approx(3 / 125)
    assert agg.score_stds["c2.14"] == 0.0
    assert agg.article_count == 1
    assert agg.total_word_count == 125


def test_tone_mean_and_population_std():
    records = [make_record(record_id="a", tone=-2.0),
               make_record(record_id="b", tone=2.0)]
    agg = aggregate_month(records)
    assert agg.score_means["tone"] == 0.0
    assert agg.score_stds["tone"] == 2.0


def test_absent_count_score_is_zero_rate():
    records = [make_record(record_id="a", gcam=[("wc", 100), ("c1.x", 10)],
                           word_count=100),
               make_record(record_id="b", gcam=[("wc", 100)], word_count=100)]
    agg = aggregate_month(records)
    assert agg.score_means["c1.x"] == pytest.approx(0.05)


def test_absent_value_score_excluded_from_mean():
    records = [make_record(record_id="a", gcam=[("wc", 100), ("v10.en", 6.0)],
                           word_count=100),
               make_record(record_id="b", gcam=[("wc", 100)], word_count=100)]
    agg = aggregate_month(records)
    assert agg.score_means["v10.en"] == 6.0


def test_empty_month_raises():
    with pytest.raises(EmptyMonth):
        aggregate_month([])


def test_mixed_months_rejected():
    records = [make_record(record_id="a", when="2015-03-01T00:00:00"),
               make_record(record_id="b", when="2015-04-01T00:00:00")]
    with pytest.raises(ValueError):
        aggregate_month(records)


def test_aggregation_permutation_invariant():
    rng = np.random.default_rng(0)
    records = [make_record(record_id=f"r{i}", tone=rng.normal(),
                           gcam=[("wc", 100 + i), ("c1.x", rng.integers(0, 9)),
                                 ("v10.en", round(rng.normal(5, 1), 3))],
                           word_count=100 + i)
               for i in range(50)]
    forward = aggregate_month(records)
    backward = aggregate_month(records[::-1])
    for key in forward.score_means:
        assert forward.score_means[key] == pytest.approx(
            backward.score_means[key], rel=1e-12)
        assert forward.score_stds[key] == pytest.approx(
            backward.score_stds[key], rel=1e-12, abs=1e-14)


def test_normalization_invariance_under_count_scaling():
    base = [make_record(record_id=f"r{i}",
                        gcam=[("wc", 100 + 7 * i), ("c1.x", 2 + i)],
                        word_count=100 + 7 * i) for i in range(10)]
    scaled = [make_record(record_id=f"s{i}",
                          gcam=[("wc", 3 * (100 + 7 * i)), ("c1.x", 3 * (2 + i))],
                          word_count=3 * (100 + 7 * i)) for i in range(10)]
    assert aggregate_month(base).score_means["c1.x"] == \
        aggregate_month(scaled).score_means["c1.x"]


def test_monthly_means_match_planted_distribution():
    rng = np.random.default_rng(3)
    n, wc, rate, centre = 1000, 400, 0.01, 5.0
    records = [make_record(record_id=f"r{i}",
                           gcam=[("wc", wc), ("c1.x", rng.poisson(rate * wc)),
                                 ("v10.en", rng.normal(centre, 0.5))],
                           word_count=wc) for i in range(n)]
    agg = aggregate_month(records)
    se_rate = np.sqrt(rate / wc) / np.sqrt(n)
    assert abs(agg.score_means["c1.x"] - rate) < 3 * se_rate
    assert abs(agg.score_means["v10.en"] - centre) < 3 * 0.5 / np.sqrt(n)


def _aggregates(raw: np.ndarray, keys: list[str]):
    """Wrap a T x len(keys) matrix of count rates into monthly aggregates."""
    from newsmacro.aggregate import MonthlyAggregate
    from newsmacro.monthgrid import month_label, month_ordinal

    start = month_ordinal("2015-03")
    months = [month_label(start + i) for i in range(raw.shape[0])]
    return [MonthlyAggregate(month=months[i], article_count=10,
                             total_word_count=1000,
                             score_means={"tone": float(i % 3)} |
                             {k: float(raw[i, j]) for j, k in enumerate(keys)},
                             score_stds={"tone": 1.0} |
                             {k: 0.5 for k in keys})
            for i in range(raw.shape[0])]


def test_all_zero_column_pruned():
    raw = np.column_stack([np.zeros(6), np.arange(6.0) ** 1.3])
    panel = build_panel(_aggregates(raw, ["c1.zero", "c1.live"]))
    assert "c1.zero_mean" in panel.pruned_all_zero
    assert "c1.live_mean" in panel.score_names


def test_constant_column_pruned_after_differencing():
    raw = np.column_stack([np.full(6, 2.5), np.arange(6.0) ** 1.3])
    panel = build_panel(_aggregates(raw, ["c1.const", "c1.live"]))
    assert "c1.const_mean" in panel.pruned_zero_variance
    assert "c1.const_mean" not in panel.score_names


def test_panel_standardization_invariants():
    rng = np.random.default_rng(1)
    raw = rng.normal(0, 1, size=(40, 3)).cumsum(axis=0)
    panel = build_panel(_aggregates(raw, ["c1.a", "c1.b", "c1.c"]))
    assert np.all(np.abs(panel.values.mean(axis=0)) < 1e-8)
    assert np.all(np.abs(panel.values.var(axis=0) - 1.0) < 1e-6)
    assert panel.n_months == 39
    assert not np.isnan(panel.values).any()


def test_differencing_reconstruction():
    # Exact up to float propagation: b + (a - b) re-rounds, so bit
    # equality is not attainable; 1e-12 relative is the machine limit.
    rng = np.random.default_rng(2)
    raw = rng.normal(5, 2, size=(30, 2)).cumsum(axis=0)
    panel = build_panel(_aggregates(raw, ["c1.a", "c1.b"]))
    rebuilt = panel.reconstruct_levels()
    live_cols = [panel.score_names.index(c) for c in ("c1.a_mean", "c1.b_mean")]
    original = raw[1:, [0, 1]]
    assert np.allclose(rebuilt[:, live_cols], original, rtol=1e-12, atol=1e-12)


def test_window_standardization_and_clipping():
    rng = np.random.default_rng(4)
    raw = rng.normal(0, 1, size=(30, 2)).cumsum(axis=0)
    raw[25:, 0] += 500.0  # regime jump after the window
    panel = build_panel(_aggregates(raw, ["c1.a", "c1.b"]))
    values = panel.standardized(20)
    window = values[:20]
    col = panel.score_names.index("c1.a_mean")
    assert abs(window[:, col].mean()) < 1e-10
    assert abs(window[:, col].std() - 1.0) < 1e-8
    assert np.abs(values[20:]).max() <= 8.0


def test_insufficient_history():
    raw = np.arange(4.0).reshape(2, 2)
    with pytest.raises(InsufficientHistory):
        build_panel(_aggregates(raw, ["c1.a", "c1.b"]))


def test_planted_ar1_column_stationary_after_differencing():
    from newsmacro.econometrics import adf_test

    rng = np.random.default_rng(6)
    levels = np.zeros(240)
    for t in range(1, 240):
        levels[t] = 0.98 * levels[t - 1] + rng.normal(0, 1)
    other = rng.normal(0, 1, 240).cumsum()
    panel = build_panel(_aggregates(np.column_stack([levels, other]),
                                    ["c1.persistent", "c1.other"]))
    column = panel.diffs[:, panel.score_names.index("c1.persistent_mean")]
    assert adf_test(column, max_lag=4).reject_at_5pct


def test_location_filter_count_matches_generator_truth(world_dir, pipeline_out):
    from newsmacro.aggregate import default_country_groups
    from newsmacro.gkg import iter_records

    records = list(iter_records(
        pipeline_out / "ingest" / "normalized_records.tsv"))
    group = default_country_groups()["US"]
    expected = sum(1 for r in records
                   if any(loc.country_code in group for loc in r.locations))
    assert len(location_filter(records, group)) == expected
    assert 0 < expected <= len(records)


def test_missing_month_is_an_error():
    raw = np.arange(12.0).reshape(6, 2) ** 1.1
    aggregates = _aggregates(raw, ["c1.a", "c1.b"])
    del aggregates[3]
    with pytest.raises(MissingMonth):
        build_panel(aggregates)


def test_aggregate_by_month_gap():
    records = [make_record(record_id="a", when="2015-03-02T00:00:00"),
               make_record(record_id="b", when="2015-05-02T00:00:00")]
    with pytest.raises(MissingMonth):
        aggregate_by_month(records, "2015-03", "2015-05")


def test_location_filter():
    group = {"US", "KR"}
    kept = make_record(record_id="a", locations=("US", "FR"))
    dropped = make_record(record_id="b", locations=("FR",))
    no_loc = make_record(record_id="c", locations=())
    assert location_filter([kept, dropped, no_loc], group) == [kept]
    with pytest.raises(ValueError):
        location_filter([kept], set())


def test_sample_unfiltered_reproducible():
    records = [make_record(record_id=f"r{i}",
                           when=f"201{5 + i % 2}-03-01T00:00:00")
               for i in range(20)]
    a = sample_unfiltered(records, 3, seed=7)
    b = sample_unfiltered(records, 3, seed=7)
    assert [r.record_id for r in a] == [r.record_id for r in b]
    assert len(a) == 6  # 3 per calendar year

    c = sample_unfiltered(records, 3, seed=8)
    assert [r.record_id for r in a] != [r.record_id for r in c]


def test_sample_unfiltered_small_population():
    records = [make_record(record_id=f"r{i}") for i in range(4)]
    assert len(sample_unfiltered(records, 10, seed=0)) == 4


def test_panel_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    raw = rng.normal(0, 1, size=(30, 3)).cumsum(axis=0)
    panel = build_panel(_aggregates(raw, ["c1.a", "c1.b", "v10.en"]))
    path = tmp_path / "panel.csv"
    save_panel(panel, path)
    loaded = load_panel(path)
    assert loaded.months == panel.months
    assert loaded.score_names == panel.score_names
    assert np.array_equal(loaded.values, panel.values)
    assert np.allclose(loaded.diffs, panel.diffs, rtol=0, atol=1e-12)
    assert loaded.pruned_zero_variance == panel.pruned_zero_variance


def test_default_country_groups_match_study_design():
    groups = default_country_groups()
    global_set = groups["US"]
    assert {"US", "UK", "DE", "JP", "BR", "MX"} <= {cc for cc in groups
                                                    if groups[cc] == global_set}
    assert groups["PL"] == groups["NO"] == groups["TR"]
    assert "CN" in groups["KR"] and "KR" in groups["KR"]
    assert len(global_set) == 10


def test_world_panel_alignment(world_dir, pipeline_out):
    import json

    panel = load_panel(pipeline_out / "aggregate" / "growth" / "panel_US.csv")
    config = json.loads((world_dir / "config.json").read_text())
    from newsmacro.monthgrid import month_range
    months = month_range(config["date_start"], config["date_end"])
    assert list(panel.months) == months[1:]
    assert "tone_mean" in panel.score_names
    assert "article_count" in panel.score_names
    assert not np.isnan(panel.values).any()
