"""Readers for the encoded-sequence and label CSV formats."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

PAD_ID = 0


class DataFormatError(ValueError):
    """An input file violates its CSV contract."""


def load_sequences(path) -> tuple[list[str], list[list[int]], dict]:
    """Read a ``record_id,token_ids`` CSV and its ``.meta.json`` sidecar.

    Token ids are space-delimited with padding stripped; the sidecar
    records ``max_len``, ``vocab_size``, ``unknown_id`` and ``pad_id``.
    """
    path = Path(path)
    meta_path = Path(f"{path}.meta.json")
    if not meta_path.exists():
        raise DataFormatError(f"missing sequence metadata sidecar {meta_path}")
    meta = json.loads(meta_path.read_text())
    for key in ("max_len", "vocab_size", "unknown_id", "pad_id"):
        if key not in meta:
            raise DataFormatError(f"{meta_path}: missing key {key!r}")
    if meta["pad_id"] != PAD_ID:
        raise DataFormatError(f"{meta_path}: pad id must be {PAD_ID}")

    ids: list[str] = []
    sequences: list[list[int]] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["record_id", "token_ids"]:
            raise DataFormatError(
                f"{path}: header must be record_id,token_ids, got {header}")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise DataFormatError(f"{path}:{row_no}: expected 2 cells")
            record_id, raw = row
            if record_id in seen:
                raise DataFormatError(f"{path}:{row_no}: duplicate id {record_id!r}")
            seen.add(record_id)
            tokens = [int(t) for t in raw.split()] if raw else []
            if any(t < 0 or t > meta["vocab_size"] for t in tokens):
                raise DataFormatError(
                    f"{path}:{row_no}: token id outside [0, {meta['vocab_size']}]")
            ids.append(record_id)
            sequences.append(tokens[: meta["max_len"]])
    return ids, sequences, meta


def load_labels(path) -> dict[str, int]:
    """Read a ``record_id,label`` CSV with binary labels."""
    labels: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["record_id", "label"]:
            raise DataFormatError(f"{path}: header must be record_id,label")
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 2 or row[1] not in ("0", "1"):
                raise DataFormatError(f"{path}:{row_no}: label must be 0 or 1")
            if row[0] in labels:
                raise DataFormatError(f"{path}:{row_no}: duplicate id {row[0]!r}")
            labels[row[0]] = int(row[1])
    return labels


def pad_sequences(sequences: list[list[int]], length: int) -> np.ndarray:
    """Right-pad (or truncate) to a fixed length with the padding id."""
    out = np.full((len(sequences), length), PAD_ID, dtype="int32")
    for i, seq in enumerate(sequences):
        clipped = seq[:length]
        out[i, :len(clipped)] = clipped
    return out


def write_predictions(ids, probabilities, path) -> None:
    """Emit the ``record_id,probability`` CSV the pipeline imports."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["record_id", "probability"])
        for record_id, probability in zip(ids, probabilities):
            writer.writerow([record_id, repr(float(probability))])
