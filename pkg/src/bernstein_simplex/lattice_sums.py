"""Exact finite-bandwidth lattice sums and their predicted limits.

Two families of sums drive the variance expansions: power sums of the
multinomial weights over the lattice, and the min-coupling sums measuring
how much the smoothed cdf of two independent draws co-moves.  Both are
computed exactly here (up to floating point) so the predicted limits can
be verified numerically at desk scale.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .asymptotics import BoundaryProfile, psi
from .bessel import poisson_equal_probability, poisson_within_one_probability
from .errors import ValidationError
from .simplex import SimplexPoint, check_lattice_size, lattice_array, log_multinomial_pmf


def sum_pmf_power(m: int, x: "SimplexPoint | float | Sequence[float]", power: int) -> float:
    """Sum of the order-(m-1) multinomial weights raised to ``power`` (2 or 3)."""
    if power not in (2, 3):
        raise ValidationError(f"power must be 2 or 3, got {power}")
    if m < 1:
        raise ValidationError(f"order m must be >= 1, got {m}")
    x = SimplexPoint.of(x)
    check_lattice_size(m - 1, x.d)
    karr = lattice_array(m - 1, x.d)
    logp = log_multinomial_pmf(karr, m - 1, x)
    return float(np.exp(power * logp).sum())


def pmf_square_sum_limit(profile: BoundaryProfile) -> float:
    """Limit of ``m^((d-|J|)/2)`` times the squared-weight sum at the profile."""
    factor = psi(profile.slice_point(), sorted(set(range(1, profile.d + 1)) - profile.j_set))
    for lam in profile.boundary.values():
        factor *= poisson_equal_probability(lam)
    return factor


def pmf_power_sum_scaled(m: int, profile: BoundaryProfile, power: int) -> float:
    """Exact power sum at the realized point, scaled by its limiting m-power.

    The square sum is scaled by ``m^((d-|J|)/2)``; the cube sum by
    ``m^(d-|J|)``, under which it stays bounded.
    """
    exact = sum_pmf_power(m, profile.realized_point(m), power)
    exponent = (profile.d - profile.j_size) * (0.5 if power == 2 else 1.0)
    return m**exponent * exact


# ---------------------------------------------------------------------------
# min-coupling sums (univariate reduction)
# ---------------------------------------------------------------------------

def _binomial_pmf(m: int, p: float) -> np.ndarray:
    karr = lattice_array(m, 1)
    return np.exp(log_multinomial_pmf(karr, m, SimplexPoint.of([p])))


def min_coupling_sum(m: int, x_p: float) -> float:
    """``E[min(K, L)/m] - x_p`` for K, L independent Binomial(m, x_p).

    Each coordinate of the multinomial is binomial, so the d-dimensional
    double sum over index pairs collapses to this univariate quantity.  It
    is computed in O(m) through the survival-function identity
    ``E[min(K, L)] = sum_t P(K >= t)^2`` and is always <= 0.
    """
    if m < 1:
        raise ValidationError(f"order m must be >= 1, got {m}")
    if not 0.0 < x_p < 1.0:
        raise ValidationError(f"x_p must lie strictly in (0, 1), got {x_p}")
    pmf = _binomial_pmf(m, x_p)
    # survival[t] = P(K >= t); reversed cumsum avoids cancellation in the tail
    survival = np.cumsum(pmf[::-1])[::-1]
    e_min = float(np.sum(survival[1:] ** 2))
    return e_min / m - x_p


def min_coupling_limit(m: float, profile: BoundaryProfile, p: int) -> float:
    """Predicted value of the min-coupling sum at bandwidth ``m`` for coordinate ``p``.

    Scaling coordinates give ``-m^-1 lam (P{X=Y} + P{X-Y=1})`` with the
    Poisson factors at ``lam``; fixed coordinates give the normal-range
    term ``-m^-1/2 sqrt(x(1-x)/pi)``.
    """
    if not 1 <= p <= profile.d:
        raise ValidationError(f"coordinate index {p} out of range 1..{profile.d}")
    if p in profile.j_set:
        lam = profile.boundary[p]
        return -lam * poisson_within_one_probability(lam) / m
    x_p = profile.interior[p]
    return -math.sqrt(x_p * (1.0 - x_p) / math.pi) / math.sqrt(m)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumDiagnostic:
    """One exact-vs-predicted comparison at a given bandwidth."""

    quantity: str
    m: int
    exact: float
    scaled_exact: float
    prediction: float
    rel_gap: float


def _diagnostic(quantity: str, m: int, exact: float, scaled: float, pred: float) -> SumDiagnostic:
    gap = abs(scaled - pred) / abs(pred) if pred != 0.0 else abs(scaled)
    return SumDiagnostic(
        quantity=quantity, m=m, exact=exact, scaled_exact=scaled, prediction=pred, rel_gap=gap
    )


def pmf_square_diagnostics(
    profile: BoundaryProfile, m_grid: Sequence[int]
) -> list[SumDiagnostic]:
    """Scaled squared-weight sums against their predicted limit, per bandwidth."""
    pred = pmf_square_sum_limit(profile)
    rows = []
    for m in m_grid:
        exact = sum_pmf_power(m, profile.realized_point(m), 2)
        scaled = m ** (0.5 * (profile.d - profile.j_size)) * exact
        rows.append(_diagnostic("pmf_square_sum", int(m), exact, scaled, pred))
    return rows


def min_coupling_diagnostics(
    profile: BoundaryProfile, p: int, m_grid: Sequence[int]
) -> list[SumDiagnostic]:
    """Scaled min-coupling sums for coordinate ``p`` against their limits."""
    if not 1 <= p <= profile.d:
        raise ValidationError(f"coordinate index {p} out of range 1..{profile.d}")
    rows = []
    boundary = p in profile.j_set
    if boundary:
        lam = profile.boundary[p]
        pred = -lam * poisson_within_one_probability(lam)
    else:
        x_p = profile.interior[p]
        pred = -math.sqrt(x_p * (1.0 - x_p) / math.pi)
    for m in m_grid:
        x_real = profile.realized_point(m)[p - 1]
        if not 0.0 < x_real < 1.0:
            raise ValidationError(
                f"coordinate {p} realizes to {x_real} at m={m}; the min-coupling sum "
                "needs a value strictly inside (0, 1)"
            )
        exact = min_coupling_sum(int(m), x_real)
        scaled = (m if boundary else math.sqrt(m)) * exact
        rows.append(_diagnostic(f"min_coupling_x{p}", int(m), exact, scaled, pred))
    return rows


def write_diagnostics_csv(rows: Sequence[SumDiagnostic], fh: io.TextIOBase) -> None:
    """Emit diagnostics as CSV with round-trippable float formatting."""
    writer = csv.writer(fh)
    writer.writerow(["quantity", "m", "scaled_exact", "prediction", "rel_gap"])
    for row in rows:
        writer.writerow(
            [row.quantity, row.m, repr(row.scaled_exact), repr(row.prediction), repr(row.rel_gap)]
        )
