"""Record parsing: grammar, error reporting, streaming scans, round trips."""

import tempfile
from pathlib import Path

from newsmacro.errors import MalformedField, MalformedRow
from newsmacro.gkg import COMPACT_SCHEMA, parse_record, scan_file, serialize_record

line = "\t".join([
    "20150301120000-42",
    "20150301120000",
    "https://news.example.org/inflation-story",
    "ECON_INFLATION;ECON_CENTRAL_BANK_POLICY;TAX_FNCACT_MINISTER",
    "1#United States#US##0#0#US;1#Japan#JP##0#0#JP",
    "-3.1,2,5.1,7.2,21.5,0",
    "wc:412,c15.anxiety:3,c16.uncertainty:5,v10.en:4.82",
])

record = parse_record(line)
print("record id:", record.record_id)
print("day:      ", record.date)
print("themes:   ", record.themes)
print("countries:", [loc.country_code for loc in record.locations])
print("tone:     ", record.tone.average_tone)
print("scores:   ", {e.key: e.value for e in record.gcam})
print("words:    ", record.word_count)

assert serialize_record(record) == line
print("\nserialize(parse(line)) == line  ->  round trip holds")

for label, bad in [
    ("missing columns", "only\ttwo"),
    ("tone out of range", line.replace("-3.1,", "-31.0,")),
    ("gcam without colon", line.replace("wc:412", "wc412")),
]:
    try:
        parse_record(bad)
    except (MalformedRow, MalformedField) as exc:
        where = f" column {exc.column}, byte {exc.byte_offset}" \
            if exc.column is not None else ""
        print(f"{label:20s} -> {type(exc).__name__}:{where}")

path = Path(tempfile.mkdtemp()) / "mini.tsv"
path.write_text(line + "\n" + "garbage row\n" + line.replace("-42", "-43") + "\n")
records = []
stats = scan_file(path, COMPACT_SCHEMA, records.append)
print(f"\nscan: parsed={stats.parsed} skipped={stats.skipped} "
      f"reasons={stats.skip_reasons}")
