"""Geometry of the unit simplex and exact multinomial weight evaluation.

The unit simplex in dimension ``d`` is the set of points with nonnegative
coordinates summing to at most one.  Smoothing weights are probabilities of
a Multinomial(m, x) outcome ``k``, evaluated in log space so that orders in
the hundreds (needed for asymptotic checks) do not underflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import SizeLimitError, ValidationError

#: Tolerance used when validating simplex membership of a single point.
COORD_TOLERANCE = 1e-12

#: Refuse to enumerate lattices with more points than this.
MAX_LATTICE_SIZE = 10**8

LatticeIndex = tuple[int, ...]


@dataclass(frozen=True)
class SimplexPoint:
    """A validated point of the unit simplex.

    Coordinates must be nonnegative and sum to at most one; violations up
    to ``COORD_TOLERANCE`` are clamped, larger ones raise
    :class:`ValidationError`.
    """

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        if len(coords) == 0:
            raise ValidationError("a simplex point needs at least one coordinate")
        if any(not math.isfinite(c) for c in coords):
            raise ValidationError(f"non-finite coordinate in {coords}")
        if any(c < -COORD_TOLERANCE for c in coords):
            raise ValidationError(f"negative coordinate in {coords}")
        coords = tuple(max(c, 0.0) for c in coords)
        total = sum(coords)
        if total > 1.0 + COORD_TOLERANCE:
            raise ValidationError(
                f"coordinates sum to {total!r} > 1 (beyond tolerance {COORD_TOLERANCE})"
            )
        if total > 1.0:
            coords = tuple(c / total for c in coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, value: "SimplexPoint | float | Sequence[float]") -> "SimplexPoint":
        """Coerce a scalar, sequence or SimplexPoint into a SimplexPoint."""
        if isinstance(value, SimplexPoint):
            return value
        arr = np.atleast_1d(np.asarray(value, dtype=float))
        if arr.ndim != 1:
            raise ValidationError("a simplex point must be one-dimensional")
        return cls(tuple(arr))

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @property
    def remainder(self) -> float:
        """Mass left for the implicit last coordinate, ``1 - sum(coords)``."""
        return max(0.0, 1.0 - sum(self.coords))


# ---------------------------------------------------------------------------
# lattice enumeration
# ---------------------------------------------------------------------------

def lattice_size(m: int, d: int) -> int:
    """Number of nonnegative integer vectors of length ``d`` with sum <= m."""
    return math.comb(m + d, d)


def check_lattice_size(m: int, d: int) -> None:
    if m < 0 or d < 1:
        raise ValidationError(f"need m >= 0 and d >= 1, got m={m}, d={d}")
    size = lattice_size(m, d)
    if size > MAX_LATTICE_SIZE:
        raise SizeLimitError(
            f"lattice for (m={m}, d={d}) has {size} points, "
            f"exceeding the cap of {MAX_LATTICE_SIZE}"
        )


def _iter_lattice(m: int, d: int) -> Iterable[LatticeIndex]:
    if d == 1:
        for k in range(m + 1):
            yield (k,)
    else:
        for k in range(m + 1):
            for rest in _iter_lattice(m - k, d - 1):
                yield (k,) + rest


def lattice_points(m: int, d: int) -> list[LatticeIndex]:
    """All integer vectors ``k >= 0`` with ``sum(k) <= m``, lexicographically.

    The order is fixed so that downstream outputs are reproducible
    byte-for-byte.
    """
    check_lattice_size(m, d)
    return list(_iter_lattice(m, d))


def lattice_array(m: int, d: int) -> np.ndarray:
    """Same enumeration as :func:`lattice_points` as an ``(N, d)`` int array."""
    check_lattice_size(m, d)
    if d == 1:
        return np.arange(m + 1, dtype=np.int64)[:, None]
    return np.array(list(_iter_lattice(m, d)), dtype=np.int64)


# ---------------------------------------------------------------------------
# log-factorial table
# ---------------------------------------------------------------------------

_log_fact_cache = np.zeros(1)


def log_factorials(n: int) -> np.ndarray:
    """Cumulative table ``[log(0!), ..., log(n!)]``, grown lazily and cached."""
    global _log_fact_cache
    if n >= len(_log_fact_cache):
        top = max(n, 2 * len(_log_fact_cache))
        tail = np.log(np.arange(1.0, top + 1.0))
        _log_fact_cache = np.concatenate([[0.0], np.cumsum(tail)])
    return _log_fact_cache[: n + 1]


# ---------------------------------------------------------------------------
# multinomial pmf
# ---------------------------------------------------------------------------

def log_multinomial_pmf(karr: np.ndarray, m: int, x: SimplexPoint) -> np.ndarray:
    """Log pmf of Multinomial(m, x) at each row of ``karr``.

    ``karr`` has shape ``(N, d)``; entries with zero probability get
    ``-inf``.  The convention ``0**0 == 1`` applies, so boundary points of
    the simplex are legal arguments.
    """
    karr = np.asarray(karr, dtype=np.int64)
    if karr.ndim != 2 or karr.shape[1] != x.d:
        raise ValidationError("index array and point dimensions do not match")
    ksum = karr.sum(axis=1)
    if np.any(karr < 0) or np.any(ksum > m):
        raise ValidationError("lattice indices must be >= 0 with sum <= m")
    rem_k = m - ksum
    lf = log_factorials(m)
    out = lf[m] - lf[karr].sum(axis=1) - lf[rem_k]
    for i, xi in enumerate(x.coords):
        ki = karr[:, i]
        if xi > 0.0:
            out = out + ki * math.log(xi)
        else:
            out = np.where(ki > 0, -np.inf, out)
    rem_x = x.remainder
    if rem_x > 0.0:
        out = out + rem_k * math.log(rem_x)
    else:
        out = np.where(rem_k > 0, -np.inf, out)
    return out


def multinomial_pmf(k: Sequence[int], m: int, x: "SimplexPoint | Sequence[float]") -> float:
    """Probability of outcome ``k`` under Multinomial(m, x).

    Computed in log space from a cached log-factorial table, so large
    orders stay finite.
    """
    x = SimplexPoint.of(x)
    karr = np.asarray(k, dtype=np.int64).reshape(1, -1)
    return float(np.exp(log_multinomial_pmf(karr, m, x)[0]))


@dataclass(frozen=True)
class PmfTable:
    """Multinomial pmf over the lattice, optionally tail-truncated.

    ``truncation_mass`` is the exact probability dropped by truncation
    (zero for a full table); the retained entries therefore sum to
    ``1 - truncation_mass``.
    """

    m: int
    x: SimplexPoint
    entries: Mapping[LatticeIndex, float]
    truncated: bool
    truncation_mass: float

    def total(self) -> float:
        return float(sum(self.entries.values()))

    def marginal(self, p: int) -> np.ndarray:
        """Marginal pmf of coordinate ``p`` (0-based), a Binomial(m, x_p)."""
        out = np.zeros(self.m + 1)
        for k, prob in self.entries.items():
            out[k[p]] += prob
        return out


def _truncation_halfwidth(m: int, d: int, tol: float) -> float:
    # Hoeffding: P(|k_i - m x_i| >= t) <= 2 exp(-2 t^2 / m); a union bound
    # over the d coordinates keeps the dropped mass below tol.
    return math.sqrt(0.5 * m * math.log(2.0 * d / tol))


def pmf_table(
    m: int,
    x: "SimplexPoint | float | Sequence[float]",
    truncate: float | None = None,
) -> PmfTable:
    """Tabulate Multinomial(m, x) over the lattice.

    With ``truncate`` set, only indices within a per-coordinate window
    around ``m * x`` are kept; the window is wide enough that the dropped
    probability is below ``truncate``.
    """
    x = SimplexPoint.of(x)
    d = x.d
    if truncate is None:
        check_lattice_size(m, d)
        karr = lattice_array(m, d)
    else:
        if not 0.0 < truncate < 1.0:
            raise ValidationError(f"truncation tolerance must be in (0, 1), got {truncate}")
        w = _truncation_halfwidth(m, d, truncate)
        ranges = []
        for xi in x.coords:
            lo = max(0, math.ceil(m * xi - w))
            hi = min(m, math.floor(m * xi + w))
            ranges.append(range(lo, hi + 1))
        kept = [k for k in itertools.product(*ranges) if sum(k) <= m]
        if not kept:
            raise ValidationError("truncation window is empty; loosen the tolerance")
        karr = np.array(kept, dtype=np.int64)
    probs = np.exp(log_multinomial_pmf(karr, m, x))
    entries = {tuple(int(v) for v in row): float(p) for row, p in zip(karr, probs)}
    mass = float(probs.sum())
    truncated = truncate is not None
    return PmfTable(
        m=m,
        x=x,
        entries=entries,
        truncated=truncated,
        truncation_mass=max(0.0, 1.0 - mass) if truncated else 0.0,
    )
