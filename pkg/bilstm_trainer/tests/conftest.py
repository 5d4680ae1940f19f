"""Local corpus fixtures; the trainer is coupled to the pipeline only
through file formats, so tests synthesise those files directly."""

import json
from pathlib import Path

import numpy as np
import pytest

RELEVANT = list(range(1, 9))
DECOY = list(range(9, 17))
COMMON = list(range(17, 23))
VOCAB_SIZE = 23  # ids 1..22 known, 23 reserved for unknown
MAX_LEN = 20


def synth_corpus(seed: int, n: int, flavor: str = "paper"):
    """(ids, sequences, labels) with a learnable theme-pool signal.

    ``separable``: token 3 appears iff the record is relevant.
    ``paper``: pool-based signal with contamination and a slice of
    records carrying only uninformative tokens.
    ``constant``: every label is 1.
    """
    rng = np.random.default_rng(seed)
    ids, sequences, labels = [], [], []
    for i in range(n):
        label = int(rng.random() < 0.5)
        if flavor == "separable":
            seq = list(rng.choice(COMMON, size=rng.integers(2, 5)))
            if label:
                seq.insert(int(rng.integers(0, len(seq) + 1)), 3)
        elif flavor == "constant":
            label = 1
            seq = list(rng.choice(COMMON + DECOY, size=rng.integers(2, 6)))
        else:
            if rng.random() < 0.06:
                seq = list(rng.choice(COMMON, size=rng.integers(2, 5)))
            else:
                pool = RELEVANT if label else DECOY
                seq = list(rng.choice(pool, size=rng.integers(2, 5),
                                      replace=False))
                if rng.random() < 0.12:
                    other = DECOY if label else RELEVANT
                    seq.append(int(rng.choice(other)))
                seq.extend(rng.choice(COMMON, size=rng.integers(1, 3),
                                      replace=False))
                rng.shuffle(seq)
        ids.append(f"rec{i}")
        sequences.append([int(t) for t in seq[:MAX_LEN]])
        labels.append(label)
    return ids, sequences, labels


def write_corpus(tmp_path: Path, ids, sequences, labels,
                 labelled_fraction: float = 1.0, seed: int = 0):
    """Write sequences.csv (+sidecar) and labels.csv; returns their paths."""
    seq_path = tmp_path / "sequences.csv"
    with open(seq_path, "w", encoding="utf-8") as handle:
        handle.write("record_id,token_ids\n")
        for record_id, seq in zip(ids, sequences):
            handle.write(f"{record_id},{' '.join(map(str, seq))}\n")
    meta = {"max_len": MAX_LEN, "vocab_size": VOCAB_SIZE,
            "unknown_id": VOCAB_SIZE, "pad_id": 0}
    Path(f"{seq_path}.meta.json").write_text(json.dumps(meta))

    rng = np.random.default_rng(seed)
    n_labelled = int(round(labelled_fraction * len(ids)))
    chosen = sorted(rng.choice(len(ids), size=n_labelled, replace=False))
    labels_path = tmp_path / "labels.csv"
    with open(labels_path, "w", encoding="utf-8") as handle:
        handle.write("record_id,label\n")
        for index in chosen:
            handle.write(f"{ids[index]},{labels[index]}\n")
    return seq_path, labels_path


@pytest.fixture(scope="session")
def fast_config():
    from bilstm_trainer.train import TrainConfig

    return TrainConfig(epochs=25, batch_size=64, learning_rate=2e-3,
                       patience=5, min_epochs=12, folds=10, seed=0)


@pytest.fixture(scope="session")
def tiny_config():
    """For format-contract tests where classifier quality is irrelevant."""
    from bilstm_trainer.train import TrainConfig

    return TrainConfig(epochs=4, batch_size=64, patience=2, min_epochs=2,
                       folds=4, seed=0)
