"""Shared fixtures: a small synthetic world and its pipeline output."""

import datetime as dt

import numpy as np
import pytest

from newsmacro.gkg import GcamEntry, GkgRecord, LocationRef, ToneBlock
from newsmacro.pipeline import run_pipeline
from newsmacro.synthetic import WorldConfig, generate_world


@pytest.fixture(scope="session")
def world_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("world")
    generate_world(WorldConfig.small(seed=3), out)
    return out


@pytest.fixture(scope="session")
def pipeline_out(world_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("pipeline")
    run_pipeline(world_dir / "config.json", out)
    return out


def make_record(themes=(), locations=("US",), tone=0.0, gcam=(),
                record_id="r1", when="2015-03-05T12:00:00",
                word_count=None) -> GkgRecord:
    """Minimal record for unit tests; gcam is an iterable of (key, value)."""
    entries = list(gcam)
    if word_count is not None and not any(k == "wc" for k, _ in entries):
        entries.insert(0, ("wc", float(word_count)))
    wc = next((int(v) for k, v in entries if k == "wc"), 0)
    return GkgRecord(
        record_id=record_id,
        timestamp=dt.datetime.fromisoformat(when).replace(tzinfo=dt.timezone.utc),
        document_url=f"https://t.example/{record_id}",
        themes=tuple(themes),
        locations=tuple(
            LocationRef(code, code, ("1", code, code, "", "0", "0", code))
            for code in locations),
        tone=ToneBlock(average_tone=float(tone),
                       extra_dimensions=(0.0, 0.0, 0.0, 0.0, 0.0)),
        gcam=tuple(GcamEntry(k, float(v)) for k, v in entries),
        word_count=wc,
    )


def normal_equations(X, y):
    """Brute-force OLS oracle via the explicit normal equations."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.linalg.inv(X.T @ X) @ (X.T @ y)


def bh_oracle(p):
    """Literal step-up definition, element by element."""
    p = np.asarray(p, dtype=float)
    m = p.size
    order = np.argsort(p, kind="stable")
    sorted_p = p[order]
    adjusted_sorted = np.empty(m)
    for i in range(m):
        adjusted_sorted[i] = min(
            min(sorted_p[j] * m / (j + 1) for j in range(i, m)), 1.0)
    out = np.empty(m)
    out[order] = adjusted_sorted
    return out
