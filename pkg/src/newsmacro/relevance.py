"""Relevance filtering for news records.

Two stages sit in front of aggregation: a coarse keyword filter over
theme labels, then a binary classifier that separates genuinely relevant
articles from keyword-passing noise. A Bernoulli Naive Bayes over theme
presence/absence is built in; predictions produced elsewhere (e.g. by a
neural sequence classifier) can be imported from CSV instead.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateTraining,
    DuplicateRecordId,
    InsufficientData,
    MalformedPredictionFile,
    MissingPrediction,
)
from .gkg import GkgRecord

PAD_ID = 0
DEFAULT_MAX_LEN = 5000

#: One smoothing pseudo-count per this many class examples. Smoothing the
#: presence *rates* rather than the raw counts keeps decisions invariant
#: under duplication of the training corpus.
SMOOTHING_SCALE = 100


@dataclass(frozen=True)
class LabeledExample:
    record_id: str
    encoded_themes: tuple[int, ...]
    label: int  # 0 = not relevant, 1 = relevant


@dataclass(frozen=True)
class ClassifierMetrics:
    precision: float
    recall: float
    f1: float
    fold_scores: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "fold_scores": list(self.fold_scores),
        }


@dataclass(frozen=True)
class RelevancePrediction:
    record_id: str
    probability: float
    label: int


@dataclass
class ThemeVocabulary:
    """Stable label -> id map; 0 is padding, the top id is "unknown"."""

    ids: dict[str, int]
    max_len: int = DEFAULT_MAX_LEN

    @property
    def vocab_size(self) -> int:
        return len(self.ids) + 1

    @property
    def unknown_id(self) -> int:
        return self.vocab_size

    @classmethod
    def build(cls, theme_lists: Iterable[Sequence[str]],
              max_len: int = DEFAULT_MAX_LEN) -> "ThemeVocabulary":
        """Assign ids 1..N to lower-cased labels in first-seen order."""
        ids: dict[str, int] = {}
        for themes in theme_lists:
            for theme in themes:
                token = theme.lower()
                if token not in ids:
                    ids[token] = len(ids) + 1
        return cls(ids=ids, max_len=max_len)

    def to_dict(self) -> dict:
        return {"ids": self.ids, "max_len": self.max_len}

    @classmethod
    def from_dict(cls, d: dict) -> "ThemeVocabulary":
        return cls(ids={k: int(v) for k, v in d["ids"].items()},
                   max_len=int(d["max_len"]))


def keyword_filter(record: GkgRecord, keywords: Sequence[str]) -> bool:
    """True iff any theme label, lower-cased, contains any keyword."""
    if not keywords:
        raise ValueError("keyword list must be non-empty")
    for theme in record.themes:
        low = theme.lower()
        if any(kw in low for kw in keywords):
            return True
    return False


def encode_themes(record: GkgRecord | Sequence[str],
                  vocab: ThemeVocabulary) -> tuple[int, ...]:
    """Map a record's themes to a fixed-length id sequence.

    Unknown labels map to the reserved unknown id; the sequence is
    truncated or right-padded with the padding id to ``vocab.max_len``.
    """
    themes = record.themes if isinstance(record, GkgRecord) else record
    ids = [vocab.ids.get(t.lower(), vocab.unknown_id) for t in themes]
    ids = ids[:vocab.max_len]
    if len(ids) < vocab.max_len:
        ids.extend([PAD_ID] * (vocab.max_len - len(ids)))
    return tuple(ids)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _metrics_from_pairs(pairs: Sequence[tuple[int, int]]) -> tuple[float, float, float]:
    """(label, prediction) pairs -> precision, recall, f1."""
    tp = sum(1 for y, p in pairs if y == 1 and p == 1)
    fp = sum(1 for y, p in pairs if y == 0 and p == 1)
    fn = sum(1 for y, p in pairs if y == 1 and p == 0)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall, f1_score(precision, recall)


@dataclass
class NaiveBayesModel:
    """Bernoulli Naive Bayes over theme presence/absence.

    ``present_weight[i]`` and ``absent_weight[i]`` are the log-likelihood
    ratios of token id ``i`` occurring / not occurring in a relevant
    versus a non-relevant article.
    """

    prior_log_odds: float
    present_weight: dict[int, float]
    absent_weight: dict[int, float]
    vocab: ThemeVocabulary | None = None
    _base_score: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        # Summation in sorted-token order so a JSON round trip (which
        # reorders the dicts) reproduces the score bit for bit.
        self._base_score = self.prior_log_odds + sum(
            self.absent_weight[token] for token in sorted(self.absent_weight))

    def log_odds(self, encoded: Sequence[int]) -> float:
        present = set(encoded) - {PAD_ID}
        score = self._base_score
        for token in present:
            if token in self.present_weight:
                score += self.present_weight[token] - self.absent_weight[token]
        return score

    def predict_proba(self, encoded: Sequence[int]) -> float:
        score = self.log_odds(encoded)
        if score >= 0:
            return 1.0 / (1.0 + math.exp(-score))
        e = math.exp(score)
        return e / (1.0 + e)

    def predict(self, encoded: Sequence[int]) -> int:
        return 1 if self.predict_proba(encoded) > 0.5 else 0

    def predict_record(self, record: GkgRecord) -> RelevancePrediction:
        if self.vocab is None:
            raise ValueError("model has no vocabulary attached")
        p = self.predict_proba(encode_themes(record, self.vocab))
        return RelevancePrediction(record_id=record.record_id,
                                   probability=p, label=1 if p > 0.5 else 0)

    def to_dict(self) -> dict:
        return {
            "prior_log_odds": self.prior_log_odds,
            "present_weight": {str(k): v for k, v in self.present_weight.items()},
            "absent_weight": {str(k): v for k, v in self.absent_weight.items()},
            "vocabulary": self.vocab.to_dict() if self.vocab else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NaiveBayesModel":
        vocab = ThemeVocabulary.from_dict(d["vocabulary"]) if d.get("vocabulary") else None
        return cls(
            prior_log_odds=float(d["prior_log_odds"]),
            present_weight={int(k): float(v) for k, v in d["present_weight"].items()},
            absent_weight={int(k): float(v) for k, v in d["absent_weight"].items()},
            vocab=vocab,
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=1))

    @classmethod
    def load(cls, path) -> "NaiveBayesModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def train_naive_bayes(examples: Sequence[LabeledExample],
                      vocab: ThemeVocabulary | None = None) -> NaiveBayesModel:
    """Fit the Bernoulli model; both classes must be present."""
    n1 = sum(1 for e in examples if e.label == 1)
    n0 = len(examples) - n1
    if n0 == 0 or n1 == 0:
        raise DegenerateTraining("training data must contain both classes")

    tokens: set[int] = set()
    counts1: dict[int, int] = {}
    counts0: dict[int, int] = {}
    for ex in examples:
        present = set(ex.encoded_themes) - {PAD_ID}
        counts = counts1 if ex.label == 1 else counts0
        for token in present:
            counts[token] = counts.get(token, 0) + 1
            tokens.add(token)

    s = 1.0 / SMOOTHING_SCALE
    present_weight: dict[int, float] = {}
    absent_weight: dict[int, float] = {}
    for token in tokens:
        p1 = (counts1.get(token, 0) / n1 + s) / (1.0 + 2.0 * s)
        p0 = (counts0.get(token, 0) / n0 + s) / (1.0 + 2.0 * s)
        present_weight[token] = math.log(p1) - math.log(p0)
        absent_weight[token] = math.log(1.0 - p1) - math.log(1.0 - p0)

    # log(n1/n0) rather than log(n1)-log(n0): the ratio form keeps the
    # prior bit-identical when the corpus is duplicated.
    return NaiveBayesModel(
        prior_log_odds=math.log(n1 / n0),
        present_weight=present_weight,
        absent_weight=absent_weight,
        vocab=vocab,
    )


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Disjoint covering folds whose sizes differ by at most one."""
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(chunk) for chunk in np.array_split(order, k)]


def evaluate_kfold(examples: Sequence[LabeledExample], k: int = 10,
                   trainer: Callable[..., NaiveBayesModel] = train_naive_bayes,
                   seed: int = 0) -> ClassifierMetrics:
    """k-fold cross-validation, micro-averaged over held-out predictions."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(examples) < k:
        raise InsufficientData(f"{len(examples)} examples for {k} folds")

    folds = kfold_indices(len(examples), k, seed)
    pooled: list[tuple[int, int]] = []
    fold_scores: list[float] = []
    for held_out in folds:
        held = set(int(i) for i in held_out)
        train = [e for i, e in enumerate(examples) if i not in held]
        model = trainer(train)
        fold_pairs = [(examples[i].label, model.predict(examples[i].encoded_themes))
                      for i in held_out]
        pooled.extend(fold_pairs)
        fold_scores.append(_metrics_from_pairs(fold_pairs)[2])

    precision, recall, f1 = _metrics_from_pairs(pooled)
    return ClassifierMetrics(precision=precision, recall=recall, f1=f1,
                             fold_scores=tuple(fold_scores))


def import_predictions(path) -> list[RelevancePrediction]:
    """Read a ``record_id,probability`` CSV; labels follow the >0.5 rule."""
    path = Path(path)
    predictions: list[RelevancePrediction] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedPredictionFile(f"{path}: empty file") from None
        if header != ["record_id", "probability"]:
            raise MalformedPredictionFile(
                f"{path}: header must be record_id,probability, got {header}")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise MalformedPredictionFile(f"{path}:{row_no}: expected 2 cells")
            record_id, raw = row
            try:
                probability = float(raw)
            except ValueError:
                raise MalformedPredictionFile(
                    f"{path}:{row_no}: probability {raw!r} is not numeric") from None
            if not 0.0 <= probability <= 1.0:
                raise MalformedPredictionFile(
                    f"{path}:{row_no}: probability {probability} outside [0, 1]")
            if record_id in seen:
                raise DuplicateRecordId(f"{path}:{row_no}: duplicate id {record_id!r}")
            seen.add(record_id)
            predictions.append(RelevancePrediction(
                record_id=record_id, probability=probability,
                label=1 if probability > 0.5 else 0))
    return predictions


def write_predictions(predictions: Iterable[RelevancePrediction], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["record_id", "probability"])
        for pred in predictions:
            writer.writerow([pred.record_id, repr(float(pred.probability))])


def export_encoded_sequences(records: Iterable[GkgRecord],
                             vocab: ThemeVocabulary, path) -> None:
    """Dump id sequences (padding stripped) plus a vocabulary sidecar.

    Consumers rebuild the fixed-length input by right-padding with 0 to
    the ``max_len`` recorded in ``<path>.meta.json``.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["record_id", "token_ids"])
        for record in records:
            encoded = encode_themes(record, vocab)
            trimmed = [i for i in encoded if i != PAD_ID]
            writer.writerow([record.record_id, " ".join(map(str, trimmed))])
    meta = {"max_len": vocab.max_len, "vocab_size": vocab.vocab_size,
            "unknown_id": vocab.unknown_id, "pad_id": PAD_ID}
    Path(f"{path}.meta.json").write_text(json.dumps(meta, sort_keys=True))


@dataclass(frozen=True)
class FilterStats:
    n_records: int
    n_keyword_pass: int
    n_retained: int
    n_discarded: int

    def to_dict(self) -> dict:
        return {"n_records": self.n_records,
                "n_keyword_pass": self.n_keyword_pass,
                "n_retained": self.n_retained,
                "n_discarded": self.n_discarded}


def filter_corpus(records: Sequence[GkgRecord], keywords: Sequence[str],
                  predictions: Sequence[RelevancePrediction] | None = None,
                  model: NaiveBayesModel | None = None,
                  ) -> tuple[list[GkgRecord], FilterStats]:
    """Keep keyword-passing records the classifier marks relevant.

    Imported predictions take precedence; the model scores records they
    do not cover. A keyword-passing record with neither is an error.
    """
    by_id = {p.record_id: p for p in predictions} if predictions else {}
    retained: list[GkgRecord] = []
    n_pass = 0
    for record in records:
        if not keyword_filter(record, keywords):
            continue
        n_pass += 1
        pred = by_id.get(record.record_id)
        if pred is None:
            if model is None:
                raise MissingPrediction(
                    f"record {record.record_id!r} has no relevance prediction")
            pred = model.predict_record(record)
        if pred.label == 1:
            retained.append(record)
    stats = FilterStats(n_records=len(records), n_keyword_pass=n_pass,
                        n_retained=len(retained),
                        n_discarded=n_pass - len(retained))
    return retained, stats


def read_labels(path) -> dict[str, int]:
    """Read a ``record_id,label`` fixture CSV."""
    labels: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["record_id", "label"]:
            raise MalformedPredictionFile(
                f"{path}: header must be record_id,label, got {header}")
        for row in reader:
            if row[0] in labels:
                raise DuplicateRecordId(f"{path}: duplicate id {row[0]!r}")
            value = int(row[1])
            if value not in (0, 1):
                raise MalformedPredictionFile(f"{path}: label {row[1]!r} not binary")
            labels[row[0]] = value
    return labels
