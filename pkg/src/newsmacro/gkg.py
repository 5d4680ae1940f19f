"""Streaming parser for GKG-style tab-delimited news record files.

One line is one analysed news article. Sub-formats: themes are
``;``-delimited labels, locations are ``;``-delimited blocks of
``#``-delimited sub-fields (country code at sub-field 3), the tone block
is six comma-delimited floats, and the content-analysis (GCAM) column is
a comma-delimited list of ``key:value`` pairs. Column positions are not
hard-coded; a :class:`GkgSchema` maps field names to column indices so
differing export layouts can be ingested.
"""

from __future__ import annotations

import datetime as _dt
import gzip
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, NamedTuple

from .errors import MalformedField, MalformedRow

logger = logging.getLogger(__name__)

# Tone values beyond this are treated as parser garbage, not sentiment;
# typical document tone lives in [-10, 10].
TONE_LIMIT = 25.0


@dataclass(frozen=True)
class GkgSchema:
    """Column layout of one export flavour."""

    n_columns: int
    record_id: int
    date: int
    document_url: int
    themes: int
    locations: int
    tone: int
    gcam: int

    def to_dict(self) -> dict:
        return {
            "n_columns": self.n_columns,
            "record_id": self.record_id,
            "date": self.date,
            "document_url": self.document_url,
            "themes": self.themes,
            "locations": self.locations,
            "tone": self.tone,
            "gcam": self.gcam,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GkgSchema":
        return cls(**{k: int(v) for k, v in d.items()})


#: Compact layout used by the bundled synthetic corpora and normalized dumps.
COMPACT_SCHEMA = GkgSchema(
    n_columns=7, record_id=0, date=1, document_url=2,
    themes=3, locations=4, tone=5, gcam=6,
)

#: Public GKG 2.1 layout (27 tab-delimited columns).
GKG21_SCHEMA = GkgSchema(
    n_columns=27, record_id=0, date=1, document_url=4,
    themes=7, locations=9, tone=15, gcam=17,
)


class ToneBlock(NamedTuple):
    average_tone: float
    extra_dimensions: tuple[float, ...]  # five carried, unused values


class GcamEntry(NamedTuple):
    key: str
    value: float


class LocationRef(NamedTuple):
    country_code: str
    full_name: str
    sub_fields: tuple[str, ...]  # verbatim block parts, kept for round-trips


@dataclass(frozen=True)
class GkgRecord:
    record_id: str
    timestamp: _dt.datetime
    document_url: str
    themes: tuple[str, ...]
    locations: tuple[LocationRef, ...]
    tone: ToneBlock
    gcam: tuple[GcamEntry, ...]
    word_count: int

    @property
    def date(self) -> _dt.date:
        """UTC calendar day of publication."""
        return self.timestamp.date()


@dataclass
class ScanStats:
    parsed: int = 0
    skipped: int = 0
    skip_reasons: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "parsed": self.parsed,
            "skipped": self.skipped,
            "skip_reasons": dict(sorted(self.skip_reasons.items())),
        }


def _format_number(x: float) -> str:
    """Canonical numeric text: integers without a decimal point."""
    if math.isfinite(x) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def parse_gcam(text: str) -> list[GcamEntry]:
    """Parse a comma-delimited list of ``key:value`` score pairs."""
    if text == "":
        return []
    entries = []
    for pair in text.split(","):
        key, sep, raw = pair.partition(":")
        if not sep or ":" in raw:
            raise MalformedField(f"GCAM pair {pair!r} must contain exactly one colon")
        if not key:
            raise MalformedField("GCAM pair with empty key")
        try:
            value = float(raw)
        except ValueError:
            raise MalformedField(f"GCAM value {raw!r} is not numeric") from None
        if not math.isfinite(value):
            raise MalformedField(f"GCAM value {raw!r} is not finite")
        entries.append(GcamEntry(key, value))
    return entries


def serialize_gcam(entries: Iterable[GcamEntry]) -> str:
    return ",".join(f"{e.key}:{_format_number(e.value)}" for e in entries)


def _parse_timestamp(text: str) -> _dt.datetime:
    if len(text) == 14:
        fmt = "%Y%m%d%H%M%S"
    elif len(text) == 8:
        fmt = "%Y%m%d"
    else:
        raise MalformedField(f"date {text!r} is neither YYYYMMDD nor YYYYMMDDHHMMSS")
    try:
        return _dt.datetime.strptime(text, fmt).replace(tzinfo=_dt.timezone.utc)
    except ValueError:
        raise MalformedField(f"invalid date {text!r}") from None


def _parse_tone(text: str) -> ToneBlock:
    parts = text.split(",")
    if len(parts) != 6:
        raise MalformedField(f"tone block has {len(parts)} values, expected 6")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise MalformedField(f"non-numeric tone value in {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise MalformedField("non-finite tone value")
    if abs(values[0]) > TONE_LIMIT:
        raise MalformedField(
            f"average tone {values[0]} outside [-{TONE_LIMIT}, {TONE_LIMIT}]")
    return ToneBlock(average_tone=values[0], extra_dimensions=tuple(values[1:]))


def _parse_locations(text: str) -> tuple[LocationRef, ...]:
    if text == "":
        return ()
    refs = []
    for block in text.split(";"):
        if block == "":
            continue
        parts = block.split("#")
        if len(parts) < 3:
            raise MalformedField(f"location block {block!r} has fewer than 3 sub-fields")
        code = parts[2]
        if len(code) != 2 or not code.isalpha() or not code.isupper():
            raise MalformedField(f"country code {code!r} does not match [A-Z]{{2}}")
        refs.append(LocationRef(country_code=code, full_name=parts[1],
                                sub_fields=tuple(parts)))
    return tuple(refs)


def _parse_themes(text: str) -> tuple[str, ...]:
    if text == "":
        return ()
    # Source order is meaningful downstream; keep it, drop empty segments.
    return tuple(t for t in text.split(";") if t != "")


def parse_record(line: str, schema: GkgSchema = COMPACT_SCHEMA) -> GkgRecord:
    """Parse one tab-delimited row into a typed record.

    Raises :class:`MalformedRow` on a wrong column count and
    :class:`MalformedField` on a sub-format violation; both carry the
    offending column index and the byte offset of that column.
    """
    columns = line.split("\t")
    if len(columns) != schema.n_columns:
        raise MalformedRow(
            f"row has {len(columns)} columns, schema expects {schema.n_columns}",
            column=len(columns), byte_offset=0)

    def offset(col: int) -> int:
        head = "\t".join(columns[:col])
        return len(head.encode("utf-8")) + (1 if col else 0)

    def sub(col: int, parser: Callable, what: str):
        try:
            return parser(columns[col])
        except MalformedField as exc:
            raise MalformedField(f"{what}: {exc}", column=col,
                                 byte_offset=offset(col)) from None

    timestamp = sub(schema.date, _parse_timestamp, "date")
    themes = sub(schema.themes, _parse_themes, "themes")
    locations = sub(schema.locations, _parse_locations, "locations")
    tone = sub(schema.tone, _parse_tone, "tone")
    gcam = tuple(sub(schema.gcam, parse_gcam, "gcam"))

    word_count = 0
    for entry in gcam:
        if entry.key == "wc":
            if entry.value < 0 or entry.value != int(entry.value):
                raise MalformedField(
                    f"word count {entry.value} is not a non-negative integer",
                    column=schema.gcam, byte_offset=offset(schema.gcam))
            word_count = int(entry.value)
            break

    return GkgRecord(
        record_id=columns[schema.record_id],
        timestamp=timestamp,
        document_url=columns[schema.document_url],
        themes=themes,
        locations=locations,
        tone=tone,
        gcam=gcam,
        word_count=word_count,
    )


def serialize_record(record: GkgRecord, schema: GkgSchema = COMPACT_SCHEMA) -> str:
    """Inverse of :func:`parse_record` for well-formed records.

    Columns the schema does not model are emitted empty.
    """
    columns = [""] * schema.n_columns
    columns[schema.record_id] = record.record_id
    columns[schema.date] = record.timestamp.strftime("%Y%m%d%H%M%S")
    columns[schema.document_url] = record.document_url
    columns[schema.themes] = ";".join(record.themes)
    columns[schema.locations] = ";".join("#".join(loc.sub_fields)
                                         for loc in record.locations)
    tone_values = (record.tone.average_tone,) + record.tone.extra_dimensions
    columns[schema.tone] = ",".join(_format_number(v) for v in tone_values)
    columns[schema.gcam] = serialize_gcam(record.gcam)
    return "\t".join(columns)


def _open_text(path: Path):
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, "r", encoding="utf-8", errors="replace")


def scan_file(path, schema: GkgSchema, sink: Callable[[GkgRecord], None]) -> ScanStats:
    """Stream-parse a record file, feeding each good record to ``sink``.

    Malformed rows are counted and logged with their reason, never fatal;
    I/O errors propagate. The file is never loaded whole.
    """
    path = Path(path)
    stats = ScanStats()
    with _open_text(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if line == "":
                stats.skipped += 1
                stats.skip_reasons["blank"] = stats.skip_reasons.get("blank", 0) + 1
                continue
            try:
                record = parse_record(line, schema)
            except (MalformedRow, MalformedField) as exc:
                stats.skipped += 1
                reason = type(exc).__name__
                stats.skip_reasons[reason] = stats.skip_reasons.get(reason, 0) + 1
                logger.info("%s:%d skipped (%s): %s", path, line_no, reason, exc)
                continue
            sink(record)
            stats.parsed += 1
    return stats


def iter_records(path, schema: GkgSchema = COMPACT_SCHEMA) -> Iterator[GkgRecord]:
    """Convenience generator over the good records of a file."""
    with _open_text(Path(path)) as handle:
        for line in handle:
            line = line.rstrip("\r\n")
            if line == "":
                continue
            try:
                yield parse_record(line, schema)
            except (MalformedRow, MalformedField):
                continue


def write_records(records: Iterable[GkgRecord], path,
                  schema: GkgSchema = COMPACT_SCHEMA) -> int:
    """Dump records in the canonical tab-delimited layout; returns the count."""
    n = 0
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(serialize_record(record, schema))
            handle.write("\n")
            n += 1
    return n
