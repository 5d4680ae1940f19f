"""Helpers for calendar-month labels of the form ``YYYY-MM``."""

import datetime as _dt
import re

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def month_ordinal(month: str) -> int:
    """Map ``YYYY-MM`` to a consecutive integer (Jan 0001 == 12)."""
    m = _MONTH_RE.match(month)
    if not m:
        raise ValueError(f"not a YYYY-MM month label: {month!r}")
    year, mon = int(m.group(1)), int(m.group(2))
    if not 1 <= mon <= 12:
        raise ValueError(f"month out of range: {month!r}")
    return year * 12 + (mon - 1)


def month_label(ordinal: int) -> str:
    year, mon = divmod(ordinal, 12)
    return f"{year:04d}-{mon + 1:02d}"


def month_range(start: str, end: str) -> list[str]:
    """Inclusive list of consecutive months from start to end."""
    a, b = month_ordinal(start), month_ordinal(end)
    if b < a:
        raise ValueError(f"month range end {end!r} precedes start {start!r}")
    return [month_label(o) for o in range(a, b + 1)]


def months_consecutive(months) -> bool:
    ords = [month_ordinal(m) for m in months]
    return all(b - a == 1 for a, b in zip(ords, ords[1:]))


def month_of_date(d: _dt.date) -> str:
    return f"{d.year:04d}-{d.month:02d}"
