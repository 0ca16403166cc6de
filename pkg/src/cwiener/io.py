"""CSV/JSON emission: fixed headers, 17 significant digits, atomic writes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x: float) -> str:
    return format(float(x), ".17g")


class NaNDetectedError(ValueError):
    pass


def check_finite(obj, where: str = "output"):
    """Raise if ``obj`` (number, array, nested dict/list) holds a NaN."""
    import numpy as np

    if isinstance(obj, dict):
        for k, v in obj.items():
            check_finite(v, f"{where}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            check_finite(v, f"{where}[{i}]")
    elif isinstance(obj, np.ndarray):
        if obj.dtype.kind in "fc" and np.isnan(obj).any():
            raise NaNDetectedError(f"NaN in {where}")
    elif isinstance(obj, complex):
        if math.isnan(obj.real) or math.isnan(obj.imag):
            raise NaNDetectedError(f"NaN in {where}")
    elif isinstance(obj, float) and math.isnan(obj):
        raise NaNDetectedError(f"NaN in {where}")
    return obj


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def json_text(report: dict) -> str:
    check_finite(report, "report")
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def read_csv(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
