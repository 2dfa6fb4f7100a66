"""Matrix file ingestion: Matrix Market and dense CSV with re,im cells."""

from __future__ import annotations

import io

import numpy as np
from scipy.io import mmread, mmwrite

from .errors import DomainError
from .matrixcore import as_matrix

__all__ = [
    "read_matrix_market",
    "write_matrix_market",
    "read_csv_matrix",
    "write_csv_matrix",
    "load_matrix",
]


def read_matrix_market(path) -> np.ndarray:
    """Dense complex matrix from a Matrix Market file (array or coordinate,
    real/integer/complex, symmetry expanded)."""
    m = mmread(str(path))
    if hasattr(m, "toarray"):
        m = m.toarray()
    return as_matrix(np.asarray(m))


def write_matrix_market(path, A) -> None:
    mmwrite(str(path), np.asarray(A, dtype=np.complex128))


def _parse_cell(cell: str) -> complex:
    cell = cell.strip()
    if not cell:
        raise DomainError("empty CSV cell")
    if "," in cell:
        re_s, im_s = cell.split(",", 1)
        return complex(float(re_s), float(im_s))
    return complex(float(cell), 0.0)


def read_csv_matrix(path) -> np.ndarray:
    """Dense CSV: cells separated by ';', each cell "re,im" or a bare real.

    A fallback splitter accepts plain comma-separated real matrices.
    """
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ";" in line:
            cells = line.split(";")
        else:
            cells = line.split(",")
        rows.append([_parse_cell(c) for c in cells if c.strip()])
    if not rows:
        raise DomainError(f"no data rows in {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DomainError("ragged CSV matrix")
    return as_matrix(np.array(rows, dtype=np.complex128))


def write_csv_matrix(path, A) -> None:
    A = np.asarray(A, dtype=np.complex128)
    buf = io.StringIO()
    for row in A:
        buf.write(";".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in row))
        buf.write("\n")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(buf.getvalue())


def load_matrix(path) -> np.ndarray:
    """Dispatch on extension: .mtx/.mm -> Matrix Market, .csv -> dense CSV."""
    p = str(path)
    if p.endswith((".mtx", ".mm", ".mtx.gz")):
        return read_matrix_market(p)
    if p.endswith(".csv"):
        return read_csv_matrix(p)
    raise DomainError(f"unrecognized matrix file extension: {p}")
