"""CSV reading/writing for :class:`SizeSample` series."""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .memory import SizeSample

COLUMNS = [
    "t",
    "intersection_id",
    "m_s",
    "m_L",
    "m_q",
    "msize_dual",
    "msize_q",
    "zeta_num",
    "zeta_den",
    "zeta_decimal",
]
_COUNTS = ("m_s", "m_L", "m_q", "msize_dual", "msize_q")


class DataError(ValueError):
    """Input data is empty or internally inconsistent."""


class SchemaError(DataError):
    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


def fmt_number(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_number(text: str, column: str):
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"column {column!r}: not a number: {text!r}", column) from None
    return x.numerator if x.denominator == 1 else x


def sample_row(s: SizeSample) -> list[str]:
    z = s.zeta
    if z is None:
        zeta = ["", "", "undefined"]
    else:
        zeta = [str(z.numerator), str(z.denominator), f"{float(z):.6f}"]
    return [str(s.t), str(s.intersection_id)] + [fmt_number(getattr(s, c)) for c in _COUNTS] + zeta


def format_series(samples: Iterable[SizeSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for s in samples:
        w.writerow(sample_row(s))
    return buf.getvalue()


def write_series(path, samples: Iterable[SizeSample]) -> None:
    Path(path).write_text(format_series(samples), encoding="utf-8")


def parse_series(text: str, source: str = "<input>") -> list[SizeSample]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataError(f"{source}: empty file")
    header = rows[0]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{source}: missing column {missing[0]!r}", missing[0])
    extra = [c for c in header if c not in COLUMNS]
    if extra:
        raise SchemaError(f"{source}: unexpected column {extra[0]!r}", extra[0])
    if len(rows) == 1:
        raise DataError(f"{source}: no data rows")
    idx = {c: header.index(c) for c in COLUMNS}
    out = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise SchemaError(f"{source}:{line}: expected {len(header)} fields, got {len(row)}")
        iid = row[idx["intersection_id"]]
        s = SizeSample(
            t=int(_parse_number(row[idx["t"]], "t")),
            intersection_id=int(iid) if iid.lstrip("-").isdigit() else iid,
            **{c: _parse_number(row[idx[c]], c) for c in _COUNTS},
        )
        num, den = row[idx["zeta_num"]], row[idx["zeta_den"]]
        expected = None
        if num:
            den = _parse_number(den, "zeta_den")
            if den == 0:
                raise SchemaError(f"{source}:{line}: zero zeta denominator", "zeta_den")
            expected = Fraction(_parse_number(num, "zeta_num")) / den
        if expected != s.zeta:
            raise SchemaError(f"{source}:{line}: zeta does not match msize_q/msize_dual", "zeta_num")
        out.append(s)
    return out


def read_series(path) -> list[SizeSample]:
    path = Path(path)
    return parse_series(path.read_text(encoding="utf-8"), str(path))
