"""The recurrent classifier architecture.

Layer stack and per-layer output widths:

    masking        (None, L)
    embedding      (None, L, 16)
    bidirectional  (None, L, 32)
    bidirectional  (None, L, 16)
    dense          (None, L, 8)
    dropout        (None, L, 8)
    dense+sigmoid  (None, L, 1)

A bidirectional layer's output width is twice its per-direction unit
count, so the widths above mean 16 and 8 memory cells per direction.
The prediction for a record is the sigmoid output at its last
non-padding position (final-state readout); positions masked as padding
never influence it.
"""

from __future__ import annotations

from dataclasses import dataclass

from tensorflow import keras

from .data import PAD_ID


class ArchitectureMismatch(RuntimeError):
    """A built model deviates from the declared layer stack."""


@dataclass(frozen=True)
class BilstmSpec:
    input_length: int = 5000
    embedding_dim: int = 16
    recurrent_widths: tuple[int, int] = (32, 16)
    dense_units: int = 8
    dropout_rate: float = 0.2

    def __post_init__(self):
        for width in self.recurrent_widths:
            if width % 2:
                raise ValueError(
                    f"bidirectional output width {width} must be even")

    def with_input_length(self, length: int) -> "BilstmSpec":
        return BilstmSpec(input_length=length,
                          embedding_dim=self.embedding_dim,
                          recurrent_widths=self.recurrent_widths,
                          dense_units=self.dense_units,
                          dropout_rate=self.dropout_rate)


#: The published architecture (input length 5000).
TABLE_SPEC = BilstmSpec()


class SequenceMasking(keras.layers.Layer):
    """Marks padding positions; the id tensor itself passes through.

    Keras's stock ``Masking`` layer treats a 2-D input as one feature
    vector per sample, which would mask whole records rather than
    positions; this layer computes the per-position mask directly.
    """

    def __init__(self, mask_value: int = PAD_ID, **kwargs):
        super().__init__(**kwargs)
        self.mask_value = mask_value
        self.supports_masking = True

    def call(self, inputs):
        return inputs

    def compute_mask(self, inputs, mask=None):
        return keras.ops.not_equal(inputs, self.mask_value)

    def get_config(self):
        return {**super().get_config(), "mask_value": self.mask_value}


def build_classifier(spec: BilstmSpec, vocab_size: int,
                     ) -> tuple[keras.Model, keras.Model]:
    """Returns (sequence stack, readout model).

    The stack is the literal layer table; the readout model shares its
    weights and gathers the probability at each record's last
    non-padding position (empty records read position zero).
    """
    inputs = keras.Input(shape=(spec.input_length,), dtype="int32",
                         name="token_ids")
    x = SequenceMasking(name="masking")(inputs)
    x = keras.layers.Embedding(vocab_size + 2, spec.embedding_dim,
                               mask_zero=True, name="embedding")(x)
    for i, width in enumerate(spec.recurrent_widths, start=1):
        x = keras.layers.Bidirectional(
            keras.layers.LSTM(width // 2, return_sequences=True),
            name=f"bidirectional_{i}")(x)
    x = keras.layers.Dense(spec.dense_units, activation="relu", name="dense")(x)
    x = keras.layers.Dropout(spec.dropout_rate, name="dropout")(x)
    sequence_output = keras.layers.Dense(1, activation="sigmoid",
                                         name="dense_output")(x)
    stack = keras.Model(inputs, sequence_output, name="bilstm_stack")
    validate_architecture(stack, spec)

    lengths = keras.ops.sum(
        keras.ops.cast(keras.ops.not_equal(inputs, PAD_ID), "int32"), axis=1)
    last_position = keras.ops.maximum(lengths - 1, 0)
    probability = keras.ops.take_along_axis(
        sequence_output[:, :, 0], last_position[:, None], axis=1)[:, 0]
    readout = keras.Model(inputs, probability, name="bilstm_readout")
    return stack, readout


def expected_shapes(spec: BilstmSpec) -> list[tuple[str, tuple]]:
    L = spec.input_length
    return [
        ("masking", (None, L)),
        ("embedding", (None, L, spec.embedding_dim)),
        ("bidirectional_1", (None, L, spec.recurrent_widths[0])),
        ("bidirectional_2", (None, L, spec.recurrent_widths[1])),
        ("dense", (None, L, spec.dense_units)),
        ("dropout", (None, L, spec.dense_units)),
        ("dense_output", (None, L, 1)),
    ]


def validate_architecture(stack: keras.Model, spec: BilstmSpec) -> None:
    """Abort with a diagnostic if the stack deviates from the layer table."""
    actual = [(layer.name, tuple(layer.output.shape)) for layer in stack.layers
              if not isinstance(layer, keras.layers.InputLayer)]
    expected = expected_shapes(spec)
    if actual != expected:
        lines = ["model does not match the declared architecture:"]
        for (en, es), (an, as_) in zip(expected, actual + [("<missing>", ())] *
                                       (len(expected) - len(actual))):
            marker = "  " if (en, es) == (an, as_) else "->"
            lines.append(f"{marker} expected {en} {es}, got {an} {as_}")
        raise ArchitectureMismatch("\n".join(lines))
