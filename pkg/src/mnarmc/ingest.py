"""CSV input/output for partially observed matrices, rating triplets and
piecewise-constant function estimates.

Dense matrices are written with 17 significant digits so that a write/read
cycle is lossless.  Triplet files hold ``row,col,rating`` lines with
zero-based indices unless ``one_based=True``.
"""

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .festimate import PiecewiseConstantFn
from .obsmodel import ObservedMatrix

__all__ = [
    "RatingScale",
    "read_dense_csv",
    "read_fhat_csv",
    "read_matrix_csv",
    "read_triplets_csv",
    "write_dense_csv",
    "write_fhat_csv",
    "write_matrix_csv",
]

log = logging.getLogger(__name__)

FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class RatingScale:
    """Source rating range mapped affinely onto [-1, 1]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("rating scale needs lo < hi")

    def to_unit(self, x):
        return 2.0 * (np.asarray(x, dtype=np.float64) - self.lo) / (self.hi - self.lo) - 1.0

    def from_unit(self, y):
        return (np.asarray(y, dtype=np.float64) + 1.0) * (self.hi - self.lo) / 2.0 + self.lo

    @classmethod
    def parse(cls, text):
        lo, hi = (float(t) for t in text.split(":"))
        return cls(lo, hi)


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [[c.strip() for c in row] for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    return rows


def read_dense_csv(path, missing_token="NA", scale=None, header=None):
    """Read a rectangular CSV with ``missing_token`` marking hidden cells.

    ``header=None`` detects a header row (a first row containing a cell
    that is neither numeric nor the missing token).  Values are rescaled
    with ``scale`` when given and must then lie in [-1, 1].
    """
    rows = _read_rows(path)
    if header is None:
        header = any(not _is_number(c) and c != missing_token for c in rows[0])
    if header:
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    ncols = len(rows[0])
    values = np.zeros((len(rows), ncols))
    mask = np.zeros((len(rows), ncols), dtype=bool)
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise ValueError(f"{path}: row {i + 1} has {len(row)} cells, expected {ncols}")
        for j, cell in enumerate(row):
            if cell == missing_token:
                continue
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise ValueError(f"{path}: cannot parse cell ({i + 1}, {j + 1}): {cell!r}") from None
            mask[i, j] = True
    if not np.isfinite(values).all():
        raise ValueError(f"{path}: non-finite value")
    if scale is not None:
        values = np.where(mask, scale.to_unit(values), 0.0)
    if np.abs(values[mask]).max(initial=0.0) > 1.0:
        raise ValueError(f"{path}: values outside [-1, 1]; pass a rating scale to rescale")
    return ObservedMatrix(values=values, mask=mask)


def read_matrix_csv(path):
    """Read a fully observed dense matrix (no missing cells allowed)."""
    rows = _read_rows(path)
    if not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    try:
        A = np.array([[float(c) for c in row] for row in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if A.ndim != 2:
        raise ValueError(f"{path}: ragged rows")
    return A


def write_matrix_csv(A, path):
    np.savetxt(path, np.asarray(A, dtype=np.float64), delimiter=",", fmt=FLOAT_FMT)


def write_dense_csv(obs, path, missing_token="NA"):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for vals, revealed in zip(obs.values, obs.mask):
            w.writerow([FLOAT_FMT % v if r else missing_token for v, r in zip(vals, revealed)])


def read_triplets_csv(path, n_rows, n_cols, scale, one_based=False):
    """Read ``row,col,rating`` lines into an :class:`ObservedMatrix`.

    Ratings are mapped by ``x -> 2 (x - lo) / (hi - lo) - 1``.  A repeated
    cell keeps its last rating; the number of duplicates is logged and
    returned alongside the matrix.

    Returns ``(obs, n_duplicates)``.
    """
    values = np.zeros((n_rows, n_cols))
    mask = np.zeros((n_rows, n_cols), dtype=bool)
    dup = 0
    offset = 1 if one_based else 0
    for lineno, row in enumerate(_read_rows(path), start=1):
        if len(row) < 3:
            raise ValueError(f"{path}:{lineno}: expected row,col,rating")
        try:
            i, j, x = int(row[0]) - offset, int(row[1]) - offset, float(row[2])
        except ValueError:
            if lineno == 1:
                continue  # header
            raise ValueError(f"{path}:{lineno}: cannot parse {row!r}") from None
        if not (0 <= i < n_rows and 0 <= j < n_cols):
            raise ValueError(f"{path}:{lineno}: index ({row[0]}, {row[1]}) out of range")
        if not scale.lo <= x <= scale.hi:
            raise ValueError(f"{path}:{lineno}: rating {x} outside [{scale.lo}, {scale.hi}]")
        if mask[i, j]:
            dup += 1
        values[i, j] = x
        mask[i, j] = True
    if dup:
        log.warning("%s: %d duplicate cells, last rating kept", path, dup)
    values = np.clip(np.where(mask, scale.to_unit(values), 0.0), -1.0, 1.0)
    return ObservedMatrix(values=values, mask=mask), dup


def write_fhat_csv(fhat, path):
    a, v = fhat.breakpoints, fhat.values
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["left", "right", "value"])
        for l in range(v.size):
            w.writerow([FLOAT_FMT % a[l], FLOAT_FMT % a[l + 1], FLOAT_FMT % v[l]])


def read_fhat_csv(path):
    rows = _read_rows(path)[1:]
    if not rows:
        raise ValueError(f"{path}: no intervals")
    left = np.array([float(r[0]) for r in rows])
    right = np.array([float(r[1]) for r in rows])
    if not np.array_equal(left[1:], right[:-1]):
        raise ValueError(f"{path}: intervals are not contiguous")
    return PiecewiseConstantFn(
        breakpoints=np.append(left, right[-1]),
        values=np.array([float(r[2]) for r in rows]),
    )
