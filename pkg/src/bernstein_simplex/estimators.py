"""Smoothed distribution and density estimators on the unit simplex.

Given observations on the simplex, the distribution estimator replaces the
empirical cdf by its degree-``m`` polynomial smoothing with multinomial
weights; the density estimator smooths the histogram over the half-open
cubes ``(k/m, (k+1)/m]`` with weights of order ``m - 1`` and rescales by the
cube volume.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .simplex import (
    LatticeIndex,
    SimplexPoint,
    check_lattice_size,
    lattice_array,
    log_multinomial_pmf,
)

#: Row-level tolerance for CSV ingestion.
CSV_TOLERANCE = 1e-9

# chunk size (in lattice points x rows) for the generic cdf evaluation
_CDF_CHUNK = 2_000_000


def _validated_points(arr: np.ndarray, tol: float) -> np.ndarray:
    if arr.ndim != 2:
        raise ValidationError("data must be a 2-d array of shape (n, d)")
    n, d = arr.shape
    if n < 1 or d < 1:
        raise ValidationError(f"need n >= 1 and d >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("data contains non-finite values")
    if np.any(arr < -tol):
        row = int(np.argwhere(arr < -tol)[0, 0])
        raise ValidationError(f"row {row}: negative coordinate beyond tolerance")
    arr = np.clip(arr, 0.0, None)
    sums = arr.sum(axis=1)
    if np.any(sums > 1.0 + tol):
        row = int(np.argmax(sums > 1.0 + tol))
        raise ValidationError(f"row {row}: coordinate sum {sums[row]!r} > 1 beyond tolerance")
    over = sums > 1.0
    if np.any(over):
        arr = arr.copy()
        arr[over] /= sums[over, None]
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """An immutable batch of n observations on the d-dimensional simplex."""

    points: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", _validated_points(np.asarray(self.points, dtype=float), 1e-12))

    @classmethod
    def from_points(cls, rows: Sequence[Sequence[float]] | np.ndarray) -> "Dataset":
        arr = np.asarray(rows, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        return cls(arr)

    @classmethod
    def from_csv(cls, source: "str | io.TextIOBase", d: int | None = None) -> "Dataset":
        """Read one observation per row; an optional non-numeric header is skipped.

        Rows violating the simplex constraints beyond ``CSV_TOLERANCE`` are
        rejected with the offending row number (1-based, counting the header).
        """
        if isinstance(source, str):
            with open(source, newline="") as fh:
                return cls.from_csv(fh, d=d)
        rows: list[list[float]] = []
        for lineno, record in enumerate(csv.reader(source), start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            try:
                values = [float(cell) for cell in record]
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise ValidationError(f"row {lineno}: non-numeric value") from None
            if d is not None and len(values) != d:
                raise ValidationError(f"row {lineno}: expected {d} columns, found {len(values)}")
            if rows and len(values) != len(rows[0]):
                raise ValidationError(f"row {lineno}: ragged row of {len(values)} columns")
            if any(v < -CSV_TOLERANCE for v in values):
                raise ValidationError(f"row {lineno}: negative coordinate beyond tolerance")
            if sum(values) > 1.0 + CSV_TOLERANCE:
                raise ValidationError(f"row {lineno}: coordinate sum exceeds 1 beyond tolerance")
            rows.append(values)
        if not rows:
            raise ValidationError("no data rows found")
        arr = np.clip(np.asarray(rows, dtype=float), 0.0, None)
        sums = arr.sum(axis=1)
        arr[sums > 1.0] /= sums[sums > 1.0, None]
        return cls(arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def empirical_cdf(data: Dataset, x: "SimplexPoint | float | Sequence[float]") -> float:
    """Fraction of observations dominated by ``x`` in every coordinate (closed corner)."""
    x = SimplexPoint.of(x)
    if x.d != data.d:
        raise ValidationError(f"point dimension {x.d} does not match data dimension {data.d}")
    return float(np.all(data.points <= x.array, axis=1).mean())


def _empirical_cdf_on_lattice(data: Dataset, karr: np.ndarray, m: int) -> np.ndarray:
    """Empirical cdf evaluated at every lattice point k/m, as one vector."""
    pts = data.points
    if data.d == 1:
        ordered = np.sort(pts[:, 0])
        return np.searchsorted(ordered, karr[:, 0] / m, side="right") / data.n
    grid = karr / m
    out = np.empty(len(karr))
    step = max(1, _CDF_CHUNK // max(1, data.n))
    for start in range(0, len(karr), step):
        block = grid[start : start + step]
        inside = np.all(pts[None, :, :] <= block[:, None, :], axis=2)
        out[start : start + step] = inside.mean(axis=1)
    return out


def bernstein_cdf(data: Dataset, m: int, x: "SimplexPoint | float | Sequence[float]") -> float:
    """Degree-``m`` polynomial smoothing of the empirical cdf at ``x``.

    Evaluation is allowed anywhere on the simplex, but the smoothed cdf is
    only a sensible estimator when the observations' support is contained
    in a hyperrectangle inside the simplex; with full-support data the
    relevant cdf lives on the unit hypercube instead.  This is a caveat,
    not an error.
    """
    if m < 1:
        raise ValidationError(f"order m must be >= 1, got {m}")
    x = SimplexPoint.of(x)
    if x.d != data.d:
        raise ValidationError(f"point dimension {x.d} does not match data dimension {data.d}")
    check_lattice_size(m, data.d)
    karr = lattice_array(m, data.d)
    weights = np.exp(log_multinomial_pmf(karr, m, x))
    values = _empirical_cdf_on_lattice(data, karr, m)
    return float(np.dot(values, weights))


@dataclass(frozen=True)
class HistogramCounts:
    """Counts of observations per half-open cube ``(k/m, (k+1)/m]``.

    Points with a coordinate exactly 0 sit on a lower cube face, which the
    half-open convention would leave unassigned; they are counted in the
    lowest cube of that coordinate so the counts always sum to n.
    """

    m: int
    d: int
    counts: Mapping[LatticeIndex, int]

    def total(self) -> int:
        return int(sum(self.counts.values()))


def _cube_indices(points: np.ndarray, m: int) -> np.ndarray:
    idx = np.ceil(m * points).astype(np.int64) - 1
    np.clip(idx, 0, None, out=idx)
    return idx


def histogram_counts(data: Dataset, m: int) -> HistogramCounts:
    """Assign each observation to its cube of side 1/m."""
    if m < 1:
        raise ValidationError(f"order m must be >= 1, got {m}")
    idx = _cube_indices(data.points, m)
    if data.d == 1:
        flat = np.bincount(idx[:, 0], minlength=m)
        keys = np.nonzero(flat)[0]
        counts = {(int(k),): int(flat[k]) for k in keys}
    else:
        uniq, cnt = np.unique(idx, axis=0, return_counts=True)
        counts = {tuple(int(v) for v in row): int(c) for row, c in zip(uniq, cnt)}
    return HistogramCounts(m=m, d=data.d, counts=counts)


def bernstein_density(data: Dataset, m: int, x: "SimplexPoint | float | Sequence[float]") -> float:
    """Histogram of mesh 1/m smoothed with weights of order m - 1, at ``x``.

    Nonnegative everywhere; for m = 1 it degenerates to the constant 1 on
    the whole simplex.
    """
    counts = histogram_counts(data, m)
    return density_from_counts(counts, data.n, x)


def density_from_counts(
    counts: HistogramCounts, n: int, x: "SimplexPoint | float | Sequence[float]"
) -> float:
    """Evaluate the density estimator from precomputed cube counts."""
    x = SimplexPoint.of(x)
    if x.d != counts.d:
        raise ValidationError(f"point dimension {x.d} does not match histogram dimension {counts.d}")
    check_lattice_size(counts.m - 1, counts.d)
    if not counts.counts:
        return 0.0
    karr = np.array(list(counts.counts.keys()), dtype=np.int64)
    weights = np.array(list(counts.counts.values()), dtype=float)
    logp = log_multinomial_pmf(karr, counts.m - 1, x)
    return float(counts.m ** counts.d * np.dot(weights / n, np.exp(logp)))
