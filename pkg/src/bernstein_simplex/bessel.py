"""Modified Bessel functions of the first kind, orders 0 and 1.

Only nonnegative real arguments are needed here (they enter as ``2*lambda``
with a fixed boundary parameter ``lambda``), so a direct series summation
with a geometric tail bound is both simple and accurate.  No large-argument
asymptotic expansion is provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

DEFAULT_TOL = 1e-14


@dataclass(frozen=True)
class BesselValue:
    """A truncated series value together with its remainder bound."""

    order: int
    argument: float
    value: float
    terms_used: int
    remainder_bound: float


def bessel_i(nu: int, z: float, tol: float = DEFAULT_TOL) -> BesselValue:
    """Evaluate I_nu(z) = sum_k (z/2)^(2k+nu) / (k! (k+nu)!) for nu in {0, 1}.

    The series is truncated once the next term falls below ``tol`` times the
    partial sum; since successive term ratios decrease, the dropped tail is
    bounded by a geometric series and recorded in ``remainder_bound``.
    """
    if nu not in (0, 1):
        raise ValidationError(f"order must be 0 or 1, got {nu}")
    if z < 0:
        raise ValidationError(f"argument must be >= 0, got {z}")
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    if z == 0.0:
        return BesselValue(order=nu, argument=0.0, value=1.0 if nu == 0 else 0.0,
                           terms_used=1, remainder_bound=0.0)
    half_sq = (z / 2.0) ** 2
    term = 1.0 if nu == 0 else z / 2.0
    total = term
    k = 0
    while True:
        next_term = term * half_sq / ((k + 1) * (k + 1 + nu))
        if next_term < tol * total:
            ratio = half_sq / ((k + 2) * (k + 2 + nu))
            remainder = next_term / (1.0 - ratio) if ratio < 1.0 else math.inf
            return BesselValue(
                order=nu,
                argument=float(z),
                value=total,
                terms_used=k + 1,
                remainder_bound=remainder,
            )
        term = next_term
        total += term
        k += 1


def bessel_i0(z: float) -> float:
    return bessel_i(0, z).value


def bessel_i1(z: float) -> float:
    return bessel_i(1, z).value


def poisson_equal_probability(lam: float) -> float:
    """P{X = Y} for X, Y independent Poisson(lam), i.e. exp(-2 lam) I_0(2 lam).

    This is the factor by which smoothing weights concentrate along a
    coordinate that sits a fixed number of lattice steps from the boundary.
    Equals 1 exactly at lam = 0 and decays like (4 pi lam)^(-1/2).
    """
    if lam < 0:
        raise ValidationError(f"lambda must be >= 0, got {lam}")
    return math.exp(-2.0 * lam) * bessel_i0(2.0 * lam)


def poisson_within_one_probability(lam: float) -> float:
    """P{0 <= X - Y <= 1} for X, Y independent Poisson(lam).

    Equals exp(-2 lam)(I_0(2 lam) + I_1(2 lam)); tends to 1 as lam -> 0.
    """
    if lam < 0:
        raise ValidationError(f"lambda must be >= 0, got {lam}")
    return math.exp(-2.0 * lam) * (bessel_i0(2.0 * lam) + bessel_i1(2.0 * lam))


def min_coupling_factor(lam: float) -> float:
    """lam * (1 - P{0 <= X - Y <= 1}) for X, Y independent Poisson(lam).

    The coefficient of the smoothed-distribution variance contributed by a
    coordinate at lattice distance ``lam`` from the boundary.  Vanishes at
    lam = 0 and is nonnegative everywhere.
    """
    return lam * (1.0 - poisson_within_one_probability(lam))
