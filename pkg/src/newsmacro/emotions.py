"""Grouping of sentiment-score loadings into seven emotion families.

Score names map onto the discrete emotion groups of Ekman's taxonomy;
for each statistically significant component the signed loadings of all
scores in a group are summed, yielding radar-chart-ready profiles.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DuplicateScore, UnknownEmotion

EMOTIONS = ("happiness", "sadness", "anger", "fear", "surprise",
            "disgust", "contempt")
UNMAPPED = "unmapped"


@dataclass(frozen=True)
class EmotionMap:
    """Score name -> emotion, with explicitly unmapped scores listed."""

    mapping: dict[str, str]
    unmapped: frozenset[str]

    def emotion_of(self, score_name: str) -> str | None:
        """Resolve a score (or its `_mean`/`_std` panel column) to an emotion.

        Returns None for scores that are unmapped or unknown.
        """
        for candidate in self._candidates(score_name):
            if candidate in self.mapping:
                return self.mapping[candidate]
            if candidate in self.unmapped:
                return None
        return None

    @staticmethod
    def _candidates(score_name: str):
        yield score_name
        for suffix in ("_mean", "_std"):
            if score_name.endswith(suffix):
                yield score_name[: -len(suffix)]


def load_emotion_map(path) -> EmotionMap:
    """Read a ``score_name,emotion`` CSV.

    The emotion must be one of the seven groups, or the literal
    ``unmapped`` to exclude a score explicitly.
    """
    mapping: dict[str, str] = {}
    unmapped: set[str] = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["score_name", "emotion"]:
            raise ValueError(f"{path}: header must be score_name,emotion")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{path}:{row_no}: expected 2 cells")
            name, emotion = row
            if name in mapping or name in unmapped:
                raise DuplicateScore(f"{path}:{row_no}: duplicate score {name!r}")
            if emotion == UNMAPPED:
                unmapped.add(name)
            elif emotion in EMOTIONS:
                mapping[name] = emotion
            else:
                raise UnknownEmotion(
                    f"{path}:{row_no}: {emotion!r} is not one of {EMOTIONS}")
    return EmotionMap(mapping=mapping, unmapped=frozenset(unmapped))


def default_emotion_map() -> EmotionMap:
    """Map bundled with the package, covering the standard score families."""
    source = resources.files("newsmacro.data") / "emotion_map_default.csv"
    with resources.as_file(source) as path:
        return load_emotion_map(path)


@dataclass(frozen=True)
class EmotionProfile:
    component: int
    sums: dict[str, float]     # one entry per emotion, fixed seven keys
    unmapped_mass: float
    significance: float        # smallest coefficient p-value of the component

    def as_vector(self) -> np.ndarray:
        return np.array([self.sums[e] for e in EMOTIONS])

    def to_dict(self) -> dict:
        return {"component": self.component, "sums": self.sums,
                "unmapped_mass": self.unmapped_mass,
                "significance": self.significance}


def profile_loadings(loadings: np.ndarray, score_names: Sequence[str],
                     emotion_map: EmotionMap) -> tuple[dict[str, float], float]:
    """Sum signed loadings per emotion; returns (sums, unmapped mass)."""
    if len(score_names) != np.asarray(loadings).size:
        raise DimensionMismatch(
            f"{np.asarray(loadings).size} loadings for {len(score_names)} scores")
    sums = {emotion: 0.0 for emotion in EMOTIONS}
    unmapped_mass = 0.0
    for name, loading in zip(score_names, np.asarray(loadings, dtype=float)):
        emotion = emotion_map.emotion_of(name)
        if emotion is None:
            unmapped_mass += loading
        else:
            sums[emotion] += loading
    return sums, unmapped_mass


def profile_components(pls, emotion_map: EmotionMap,
                       significance: Sequence[float],
                       level: float = 0.1) -> list[EmotionProfile]:
    """Profiles for the components whose best p-value clears ``level``.

    ``significance[a]`` is the p-value attached to component ``a`` (the
    smallest of its coefficient p-values in the forecasting equation).
    """
    loadings = np.asarray(pls.x_loadings, dtype=float)
    names = tuple(pls.score_names)
    if loadings.shape[0] != len(names):
        raise DimensionMismatch(
            f"loading rows {loadings.shape[0]} != {len(names)} score names")
    if len(significance) != loadings.shape[1]:
        raise DimensionMismatch(
            f"{len(significance)} p-values for {loadings.shape[1]} components")
    profiles = []
    for a in range(loadings.shape[1]):
        if significance[a] >= level:
            continue
        sums, unmapped_mass = profile_loadings(loadings[:, a], names, emotion_map)
        profiles.append(EmotionProfile(
            component=a, sums=sums, unmapped_mass=unmapped_mass,
            significance=float(significance[a])))
    return profiles


def emit_radar(profiles: Sequence[EmotionProfile], path) -> None:
    """Write radar-chart JSON (fixed axis order) and a flat CSV twin."""
    if not profiles:
        raise ValueError("need at least one profile")
    path = Path(path)
    payload = {
        "axes": list(EMOTIONS),
        "series": [
            {
                "component": prof.component,
                "significance": prof.significance,
                "values": [prof.sums[e] for e in EMOTIONS],
                "unmapped_mass": prof.unmapped_mass,
            }
            for prof in profiles
        ],
    }
    path.write_text(json.dumps(payload, sort_keys=True, indent=1))
    with open(path.with_suffix(".csv"), "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["component", "significance", "emotion", "loading_sum"])
        for prof in profiles:
            for emotion in EMOTIONS:
                writer.writerow([prof.component, repr(prof.significance),
                                 emotion, repr(prof.sums[emotion])])


def load_radar(path) -> list[EmotionProfile]:
    """Inverse of :func:`emit_radar` for the JSON form."""
    payload = json.loads(Path(path).read_text())
    if payload["axes"] != list(EMOTIONS):
        raise ValueError("radar file axes do not match the emotion set")
    return [
        EmotionProfile(
            component=int(series["component"]),
            sums=dict(zip(EMOTIONS, series["values"])),
            unmapped_mass=float(series["unmapped_mass"]),
            significance=float(series["significance"]),
        )
        for series in payload["series"]
    ]
