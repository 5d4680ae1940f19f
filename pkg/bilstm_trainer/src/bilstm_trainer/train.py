"""Training, cross-validation and artifact export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from tensorflow import keras

from .data import load_labels, load_sequences, pad_sequences, write_predictions
from .model import TABLE_SPEC, BilstmSpec, build_classifier


class DegenerateTraining(RuntimeError):
    """The labelled data does not contain both classes."""


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 64
    learning_rate: float = 2e-3
    patience: int = 5
    min_epochs: int = 12  # the first epochs plateau before the loss moves
    folds: int = 10
    seed: int = 0
    holdout_fraction: float = 0.15  # inner split driving early stopping


def f1_from_pairs(pairs) -> tuple[float, float, float]:
    tp = sum(1 for y, p in pairs if y == 1 and p == 1)
    fp = sum(1 for y, p in pairs if y == 0 and p == 1)
    fn = sum(1 for y, p in pairs if y == 1 and p == 0)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) \
        if precision + recall > 0 else 0.0
    return precision, recall, f1


class _F1EarlyStopping(keras.callbacks.Callback):
    """Early stopping on the F1 of a fixed validation slice.

    No stop is allowed before ``min_epochs``: the first epochs sit on a
    majority-class plateau and a short patience would freeze there.
    """

    def __init__(self, x_val, y_val, patience: int, min_epochs: int):
        super().__init__()
        self.x_val = x_val
        self.y_val = y_val
        self.patience = patience
        self.min_epochs = min_epochs
        self.best_f1 = -1.0
        self.best_weights = None
        self.stale = 0

    def on_epoch_end(self, epoch, logs=None):
        probs = self.model.predict(self.x_val, verbose=0)
        preds = (np.asarray(probs).ravel() > 0.5).astype(int)
        _, _, f1 = f1_from_pairs(list(zip(self.y_val, preds)))
        # Ties keep the newest weights: on a small validation slice an
        # early epoch can match the score of a better-trained later one.
        if f1 >= self.best_f1:
            self.best_f1 = f1
            self.best_weights = self.model.get_weights()
            self.stale = 0
        else:
            self.stale += 1
            if self.stale >= self.patience and epoch + 1 >= self.min_epochs:
                self.model.stop_training = True

    def on_train_end(self, logs=None):
        if self.best_weights is not None:
            self.model.set_weights(self.best_weights)


def _fit_one(x_train, y_train, spec: BilstmSpec, vocab_size: int,
             config: TrainConfig, seed: int) -> keras.Model:
    keras.utils.set_random_seed(seed)
    _, readout = build_classifier(spec, vocab_size)
    readout.compile(optimizer=keras.optimizers.Adam(config.learning_rate),
                    loss="binary_crossentropy")
    n_val = max(2, int(round(config.holdout_fraction * len(y_train))))
    order = np.random.default_rng(seed).permutation(len(y_train))
    val_idx, fit_idx = order[:n_val], order[n_val:]
    callback = _F1EarlyStopping(x_train[val_idx], y_train[val_idx],
                                config.patience, config.min_epochs)
    readout.fit(x_train[fit_idx], y_train[fit_idx],
                epochs=config.epochs, batch_size=config.batch_size,
                verbose=0, callbacks=[callback])
    return readout


def cross_validate(x, y, spec: BilstmSpec, vocab_size: int,
                   config: TrainConfig) -> dict:
    """k-fold CV; metrics are micro-averaged over held-out predictions."""
    rng = np.random.default_rng(config.seed)
    folds = [np.sort(chunk)
             for chunk in np.array_split(rng.permutation(len(y)), config.folds)]
    pooled: list[tuple[int, int]] = []
    fold_scores: list[float] = []
    for k, held_out in enumerate(folds):
        mask = np.ones(len(y), dtype=bool)
        mask[held_out] = False
        model = _fit_one(x[mask], y[mask], spec, vocab_size, config,
                         seed=config.seed + k)
        probs = np.asarray(model.predict(x[held_out], verbose=0)).ravel()
        fold_pairs = list(zip(y[held_out].tolist(),
                              (probs > 0.5).astype(int).tolist()))
        pooled.extend(fold_pairs)
        fold_scores.append(f1_from_pairs(fold_pairs)[2])
        keras.backend.clear_session()
    precision, recall, f1 = f1_from_pairs(pooled)
    return {"precision": precision, "recall": recall, "f1": f1,
            "fold_scores": fold_scores}


def train_and_export(sequences_csv, labels_csv, out_dir,
                     spec: BilstmSpec | None = None,
                     config: TrainConfig | None = None) -> dict:
    """Run the full job: CV metrics, final model, full-corpus predictions.

    The architecture's input length follows the exporter's ``max_len``
    unless an explicit spec overrides it. Returns the metrics dict.
    """
    config = config or TrainConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    ids, sequences, meta = load_sequences(sequences_csv)
    labels = load_labels(labels_csv)
    if spec is None:
        spec = TABLE_SPEC.with_input_length(int(meta["max_len"]))

    labelled = [(i, labels[rid]) for i, rid in enumerate(ids) if rid in labels]
    if not labelled:
        raise DegenerateTraining("no labelled records found in the corpus")
    values = {label for _, label in labelled}
    if values != {0, 1}:
        raise DegenerateTraining(
            f"training labels must contain both classes, got {sorted(values)}")

    x_all = pad_sequences(sequences, spec.input_length)
    train_rows = np.array([i for i, _ in labelled])
    y = np.array([label for _, label in labelled], dtype="float32")
    vocab_size = int(meta["vocab_size"])

    metrics = cross_validate(x_all[train_rows], y, spec, vocab_size, config)
    (out / "metrics.json").write_text(json.dumps(
        {**metrics, "folds": config.folds, "seed": config.seed,
         "input_length": spec.input_length}, sort_keys=True, indent=1))

    final = _fit_one(x_all[train_rows], y, spec, vocab_size, config,
                     seed=config.seed + config.folds)
    probabilities = np.asarray(final.predict(
        x_all, batch_size=config.batch_size, verbose=0)).ravel()
    probabilities = np.clip(probabilities, 0.0, 1.0)
    write_predictions(ids, probabilities, out / "predictions.csv")
    final.save(out / "model.keras")
    return metrics
