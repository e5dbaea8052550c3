"""Matrix file I/O for the command line: dense CSV and MatrixMarket.

CSV files may carry a header row and/or a leading label column; with the
default ``"auto"`` setting both are detected by looking for non-numeric
tokens.  Numbers are written with 17 significant digits so that doubles
round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io


@dataclass
class MatrixData:
    values: np.ndarray
    row_labels: list[str] | None = None
    col_labels: list[str] | None = None


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return token.strip() != ""


def _flag(setting: str, detected: bool) -> bool:
    if setting == "auto":
        return detected
    if setting in ("yes", "no"):
        return setting == "yes"
    raise ValueError(f"expected auto, yes or no, got {setting!r}")


def read_matrix(path, header: str = "auto", labels: str = "auto") -> MatrixData:
    """Read a dense CSV (or ``.mtx`` MatrixMarket) file.

    Raises ``ValueError`` on anything that cannot be parsed.
    """
    path = Path(path)
    if path.suffix.lower() in (".mtx", ".mm"):
        values = scipy.io.mmread(str(path))
        if hasattr(values, "toarray"):
            values = values.toarray()
        return MatrixData(values=np.asarray(values, dtype=float))

    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip() == "":
            continue
        rows.append([tok.strip() for tok in line.split(",")])
    if not rows:
        raise ValueError(f"{path} contains no data")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path} has ragged rows")

    first_row_tail = rows[0][1:] if width > 1 else rows[0]
    has_header = _flag(header, any(not _is_number(t) for t in first_row_tail))
    body = rows[1:] if has_header else rows
    if not body:
        raise ValueError(f"{path} has a header but no data rows")
    has_labels = _flag(labels, any(not _is_number(r[0]) for r in body))

    col_labels = None
    row_labels = None
    if has_header:
        col_labels = rows[0][1:] if has_labels else rows[0]
    if has_labels:
        row_labels = [r[0] for r in body]
        body = [r[1:] for r in body]
    try:
        values = np.array([[float(t) for t in r] for r in body])
    except ValueError as exc:
        raise ValueError(f"could not parse {path} as a numeric matrix: {exc}") from exc
    return MatrixData(values=values, row_labels=row_labels, col_labels=col_labels)


def write_matrix(path, values: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(values), delimiter=",", fmt="%.17g")
