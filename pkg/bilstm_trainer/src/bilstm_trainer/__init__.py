"""Bidirectional LSTM relevance classifier for encoded theme sequences.

Consumes the encoded-sequence and label CSVs exported by the panel
pipeline, trains the recurrent classifier with 10-fold cross-validation,
and writes back a `record_id,probability` prediction CSV plus a metrics
JSON. The coupling to the pipeline is purely these file formats.
"""

__version__ = "0.1.0"
