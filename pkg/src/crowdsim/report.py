"""CSV reports with a fixed header per mode.

Formatting: floats with exactly 4 decimals, integers verbatim, booleans as
``true``/``false``, missing values empty, LF line endings, UTF-8.
"""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

from .experiment import EVAC_METRICS, STAGE_METRICS

_LEAD = ("mode", "point")
_TAIL = ("seed", "run_seed", "aggregate", "n")

EVAC_HEADER = (_LEAD + ("scenario", "strategy") + _TAIL + EVAC_METRICS
               + tuple(f"{m}_std" for m in EVAC_METRICS) + ("error",))
STAGE_HEADER = (_LEAD + ("map", "PN", "BRF", "PT", "ST", "SI") + _TAIL + STAGE_METRICS
                + tuple(f"{m}_std" for m in STAGE_METRICS) + ("error",))

_INT_FIELDS = {"point", "PN", "BRF", "PT", "ST", "SI", "seed", "run_seed", "n"}


def header_for(mode: str) -> tuple[str, ...]:
    if mode == "evac":
        return EVAC_HEADER
    if mode == "stage":
        return STAGE_HEADER
    raise ValueError(f"unknown mode {mode!r}")


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def render_report(rows: list[dict]) -> str:
    if not rows:
        raise ValueError("no rows to report")
    modes = {r["mode"] for r in rows}
    if len(modes) != 1:
        raise ValueError(f"rows mix modes {sorted(modes)}")
    header = header_for(modes.pop())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(r.get(k)) for k in header])
    return buf.getvalue()


def write_report(rows: list[dict], path) -> Path:
    """Write ``rows`` as CSV.  Nothing is created if ``rows`` is empty."""
    text = render_report(rows)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def read_report(path) -> list[dict]:
    """Parse a report back into typed rows (floats, ints, bools, None)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        d = {}
        for k, v in r.items():
            if v == "":
                d[k] = "" if k == "error" else None
            elif k == "aggregate":
                d[k] = v == "true"
            elif k in _INT_FIELDS:
                d[k] = int(v)
            elif k in ("mode", "scenario", "strategy", "map", "error"):
                d[k] = v
            else:
                d[k] = float(v)
        out.append(d)
    return out
