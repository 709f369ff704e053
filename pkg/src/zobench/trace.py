"""Per-iteration trace records and their CSV serialization.

A trace file is a block of ``#``-prefixed ``key=value`` header lines, one CSV
header row and one row per recorded iteration.  Reals are written with 17
significant digits so that parsing restores every float bit-for-bit.  A run
that aborted carries ``# error=<message>`` as its last line.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields
from pathlib import Path

BASE_COLUMNS = ("iter", "fval", "gap", "step_norm")
DIAGNOSTIC_COLUMNS = ("cos_g", "cos_m", "relerr_v_ori", "relerr_v_ours")


@dataclass
class TraceRecord:
    iter: int
    fval: float
    gap: float
    step_norm: float
    cos_g: float | None = None
    cos_m: float | None = None
    relerr_v_ori: float | None = None
    relerr_v_ours: float | None = None
    error: str | None = None

    def diagnostics(self) -> dict:
        return {name: getattr(self, name) for name in DIAGNOSTIC_COLUMNS}


def format_real(x: float | None) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def parse_real(text: str) -> float | None:
    return None if text == "" else float(text)


def write_trace(path, records: list[TraceRecord], header: dict, diagnostics: bool = False) -> None:
    """Write ``records`` to ``path``; ``header`` values must already be strings."""
    Path(path).write_text(dumps_trace(records, header, diagnostics), encoding="utf-8", newline="")


def dumps_trace(records: list[TraceRecord], header: dict, diagnostics: bool = False) -> str:
    buf = io.StringIO()
    for key, value in header.items():
        if "\n" in str(value):
            raise ValueError(f"header value for {key!r} spans lines")
        buf.write(f"# {key}={value}\n")
    columns = BASE_COLUMNS + (DIAGNOSTIC_COLUMNS if diagnostics else ())
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    error = None
    for rec in records:
        row = [str(rec.iter)] + [format_real(getattr(rec, c)) for c in columns[1:]]
        writer.writerow(row)
        error = rec.error or error
    if error:
        buf.write(f"# error={' '.join(error.split())}\n")
    return buf.getvalue()


def read_trace(path) -> tuple[dict, list[TraceRecord]]:
    """Parse a trace file into ``(header, records)``."""
    return loads_trace(Path(path).read_text(encoding="utf-8"))


def loads_trace(text: str) -> tuple[dict, list[TraceRecord]]:
    header: dict[str, str] = {}
    body: list[str] = []
    error = None
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            if key == "error":
                error = value
            else:
                header[key] = value
        elif line:
            body.append(line)
    records = []
    reader = csv.reader(body)
    columns = next(reader, None)
    if columns is None:
        return header, records
    known = {f.name for f in fields(TraceRecord)}
    for row in reader:
        values = dict(zip(columns, row))
        rec = TraceRecord(
            iter=int(values.pop("iter")),
            **{k: parse_real(v) for k, v in values.items() if k in known},
        )
        records.append(rec)
    if error and records:
        records[-1].error = error
    return header, records
