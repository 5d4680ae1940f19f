import json
import math

import numpy as np
import pytest

from conftest import MAX_LEN, VOCAB_SIZE, synth_corpus, write_corpus
from bilstm_trainer.data import DataFormatError, load_sequences
from bilstm_trainer.train import DegenerateTraining, f1_from_pairs, train_and_export


def _bernoulli_nb_cv_f1(sequences, labels, folds=10, seed=0):
    """Presence/absence Naive Bayes baseline, the Table-1 comparison point."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(labels))
    chunks = np.array_split(order, folds)
    pooled = []
    for held in chunks:
        held_set = set(held.tolist())
        train = [i for i in range(len(labels)) if i not in held_set]
        n1 = sum(labels[i] for i in train)
        n0 = len(train) - n1
        counts = {0: {}, 1: {}}
        for i in train:
            for token in set(sequences[i]):
                counts[labels[i]][token] = counts[labels[i]].get(token, 0) + 1
        s = 0.01
        tokens = set(counts[0]) | set(counts[1])
        weights = {}
        for token in tokens:
            p1 = (counts[1].get(token, 0) / n1 + s) / (1 + 2 * s)
            p0 = (counts[0].get(token, 0) / n0 + s) / (1 + 2 * s)
            weights[token] = (math.log(p1 / p0),
                              math.log((1 - p1) / (1 - p0)))
        base = math.log(n1 / n0) + sum(w[1] for w in weights.values())
        for i in held:
            score = base + sum(weights[t][0] - weights[t][1]
                               for t in set(sequences[i]) if t in weights)
            pooled.append((labels[i], 1 if score > 0 else 0))
    return f1_from_pairs(pooled)[2]


def test_separable_corpus_reaches_f1_095(tmp_path, fast_config):
    ids, sequences, labels = synth_corpus(seed=0, n=260, flavor="separable")
    seq_path, labels_path = write_corpus(tmp_path, ids, sequences, labels)
    metrics = train_and_export(seq_path, labels_path, tmp_path / "out",
                               config=fast_config)
    assert metrics["f1"] >= 0.95
    assert len(metrics["fold_scores"]) == 10


def test_paper_shaped_corpus_beats_threshold_and_baseline(tmp_path, fast_config):
    ids, sequences, labels = synth_corpus(seed=1, n=340, flavor="paper")
    seq_path, labels_path = write_corpus(tmp_path, ids, sequences, labels)
    metrics = train_and_export(seq_path, labels_path, tmp_path / "out",
                               config=fast_config)
    assert metrics["f1"] >= 0.85

    baseline = _bernoulli_nb_cv_f1(sequences, labels)
    assert metrics["f1"] >= baseline - 0.02

    written = json.loads((tmp_path / "out" / "metrics.json").read_text())
    assert written["f1"] == metrics["f1"]
    assert written["input_length"] == MAX_LEN


def test_constant_labels_degenerate(tmp_path, tiny_config):
    ids, sequences, labels = synth_corpus(seed=2, n=60, flavor="constant")
    seq_path, labels_path = write_corpus(tmp_path, ids, sequences, labels)
    with pytest.raises(DegenerateTraining):
        train_and_export(seq_path, labels_path, tmp_path / "out",
                         config=tiny_config)


def test_predictions_cover_unlabelled_records_and_import_cleanly(tmp_path,
                                                                 tiny_config):
    ids, sequences, labels = synth_corpus(seed=3, n=240, flavor="separable")
    seq_path, labels_path = write_corpus(tmp_path, ids, sequences, labels,
                                         labelled_fraction=0.6)
    train_and_export(seq_path, labels_path, tmp_path / "out",
                     config=tiny_config)
    predictions_path = tmp_path / "out" / "predictions.csv"

    lines = predictions_path.read_text().strip().splitlines()
    assert lines[0] == "record_id,probability"
    assert len(lines) == 1 + len(ids)
    probs = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(0.0 <= p <= 1.0 for p in probs)

    relevance = pytest.importorskip("newsmacro.relevance")
    imported = relevance.import_predictions(predictions_path)
    assert [p.record_id for p in imported] == ids
    for pred in imported:
        assert pred.label == (1 if pred.probability > 0.5 else 0)

    assert (tmp_path / "out" / "model.keras").exists()


def test_sequence_loader_validation(tmp_path):
    seq_path = tmp_path / "sequences.csv"
    seq_path.write_text("record_id,token_ids\na,1 2\n")
    with pytest.raises(DataFormatError):  # missing sidecar
        load_sequences(seq_path)

    (tmp_path / "sequences.csv.meta.json").write_text(json.dumps(
        {"max_len": 10, "vocab_size": VOCAB_SIZE, "unknown_id": VOCAB_SIZE,
         "pad_id": 0}))
    ids, sequences, meta = load_sequences(seq_path)
    assert ids == ["a"] and sequences == [[1, 2]]

    bad = tmp_path / "bad.csv"
    bad.write_text("record_id,token_ids\na,1 999\n")
    (tmp_path / "bad.csv.meta.json").write_text(json.dumps(
        {"max_len": 10, "vocab_size": 23, "unknown_id": 23, "pad_id": 0}))
    with pytest.raises(DataFormatError):
        load_sequences(bad)
