"""Closed-form bias, variance, mse and bandwidth expansions near the boundary.

A point near the boundary is described by a :class:`BoundaryProfile`: the
coordinates in the index set J scale like ``lambda_i / m`` as the bandwidth
``m`` grows, the rest sit at fixed interior values.  All expansions below
are evaluated exactly as stated; the neglected error orders are attached as
metadata strings and never added into returned numbers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bessel import min_coupling_factor, poisson_equal_probability
from .errors import ValidationError
from .models import DensityModel
from .simplex import SimplexPoint

#: Numerical threshold for the vanishing-derivative precondition of the
#: reduced-bias mse expansion.
SHOULDER_TOL = 1e-8


@dataclass(frozen=True)
class BoundaryProfile:
    """Which coordinates scale with the bandwidth, and the fixed ones.

    ``boundary`` maps 1-based coordinate indices to their scale parameters
    ``lambda_i >= 0`` (the set J); ``interior`` maps the remaining indices
    to fixed values in (0, 1) whose sum stays below 1.
    """

    d: int
    boundary: Mapping[int, float] = field(default_factory=dict)
    interior: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.d}")
        boundary = {int(i): float(v) for i, v in dict(self.boundary).items()}
        interior = {int(i): float(v) for i, v in dict(self.interior).items()}
        keys = sorted(boundary) + sorted(interior)
        if sorted(keys) != list(range(1, self.d + 1)):
            raise ValidationError(
                f"boundary {sorted(boundary)} and interior {sorted(interior)} "
                f"must partition 1..{self.d}"
            )
        for i, lam in boundary.items():
            if not math.isfinite(lam) or lam < 0:
                raise ValidationError(f"lambda_{i} must be finite and >= 0, got {lam}")
        for i, xi in interior.items():
            if not 0.0 < xi < 1.0:
                raise ValidationError(f"x_{i} must lie strictly in (0, 1), got {xi}")
        if sum(interior.values()) >= 1.0:
            raise ValidationError("fixed interior coordinates must sum to less than 1")
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "interior", interior)

    @classmethod
    def interior_point(cls, x: "SimplexPoint | float | Sequence[float]") -> "BoundaryProfile":
        """Profile with empty J, i.e. a fixed interior evaluation point."""
        pt = SimplexPoint.of(x)
        return cls(d=pt.d, boundary={}, interior={i + 1: v for i, v in enumerate(pt.coords)})

    @classmethod
    def from_dict(cls, spec: Mapping[str, object]) -> "BoundaryProfile":
        return cls(
            d=int(spec["d"]),
            boundary={int(k): float(v) for k, v in dict(spec.get("boundary", {})).items()},
            interior={int(k): float(v) for k, v in dict(spec.get("interior", {})).items()},
        )

    def to_dict(self) -> dict[str, object]:
        return {
            "d": self.d,
            "boundary": {str(i): self.boundary[i] for i in sorted(self.boundary)},
            "interior": {str(i): self.interior[i] for i in sorted(self.interior)},
        }

    # -- derived views ------------------------------------------------------

    @property
    def j_set(self) -> frozenset[int]:
        return frozenset(self.boundary)

    @property
    def j_size(self) -> int:
        return len(self.boundary)

    @property
    def is_full_boundary(self) -> bool:
        return self.j_size == self.d

    @property
    def has_zero_lambda(self) -> bool:
        return any(v == 0.0 for v in self.boundary.values())

    def lambda_vector(self) -> np.ndarray:
        """Scale parameters as a length-d vector, zero off J."""
        lam = np.zeros(self.d)
        for i, v in self.boundary.items():
            lam[i - 1] = v
        return lam

    def slice_point(self) -> np.ndarray:
        """The profile's limit point: J coordinates exactly 0, others fixed."""
        x = np.zeros(self.d)
        for i, v in self.interior.items():
            x[i - 1] = v
        return x

    def realized_point(self, m: float) -> np.ndarray:
        """The evaluation point at bandwidth m: lambda_i / m on J, fixed elsewhere."""
        if m <= 0:
            raise ValidationError(f"bandwidth must be positive, got {m}")
        x = self.slice_point()
        for i, lam in self.boundary.items():
            x[i - 1] = lam / m
        if np.any(x > 1.0) or x.sum() > 1.0:
            raise ValidationError(f"bandwidth m={m} too small to realize the profile")
        return x


def psi(x: "SimplexPoint | float | Sequence[float]", subset: Iterable[int]) -> float:
    """Normal-approximation constant for the coordinates in ``subset``.

    Computes ``[(4 pi)^|A| (1 - sum_A x_i) prod_A x_i]^(-1/2)`` (1-based
    indices); the empty subset gives exactly 1.
    """
    pt = SimplexPoint.of(x)
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        return 1.0
    if subset[0] < 1 or subset[-1] > pt.d:
        raise ValidationError(f"subset {subset} out of range 1..{pt.d}")
    values = [pt.coords[i - 1] for i in subset]
    inner = (4.0 * math.pi) ** len(subset) * (1.0 - sum(values))
    for v in values:
        inner *= v
    if inner <= 0.0:
        raise ValidationError(
            "psi requires positive coordinates on the subset with sum below 1"
        )
    return inner ** -0.5


# ---------------------------------------------------------------------------
# density estimator: bias
# ---------------------------------------------------------------------------

def density_bias_terms(model: DensityModel, x: "SimplexPoint | float | Sequence[float]") -> tuple[float, float]:
    """First and second bias coefficients of the density estimator at ``x``.

    The estimator's mean is ``f(x) + c1/m + c2/m^2`` plus lower order; this
    returns ``(c1, c2)`` from the model's gradient and Hessian.
    """
    pt = SimplexPoint.of(x).array
    grad = np.asarray(model.density_grad(pt), dtype=float)
    hess = np.asarray(model.density_hessian(pt), dtype=float)
    d = len(pt)
    eye = np.eye(d)
    cov = pt[:, None] * eye - np.outer(pt, pt)
    delta1 = float(np.dot(0.5 - pt, grad) + 0.5 * np.sum(cov * hess))
    coeff2 = (
        (1.0 / 6.0) * eye
        + 0.125 * (1.0 - eye)
        - 0.5 * pt[:, None] * eye
        - 0.5 * pt[None, :]
        + np.outer(pt, pt)
    )
    delta2 = float(np.sum(coeff2 * hess))
    return delta1, delta2


@dataclass(frozen=True)
class BiasExpansion:
    """Evaluated bias brackets: ``value = bracket_m1/m + bracket_m2/m^2``."""

    bracket_m1: float
    bracket_m2: float
    m: float
    value: float
    order_note: str


def density_bias_boundary(model: DensityModel, profile: BoundaryProfile, m: float) -> BiasExpansion:
    """Two-term bias of the density estimator at a near-boundary profile.

    The leading bracket uses derivatives at the profile's limit point (J
    coordinates set to 0); the second bracket uses derivatives at the
    origin.  With empty J both brackets reduce exactly to the interior
    coefficients of :func:`density_bias_terms`.
    """
    _check_model(model, profile)
    if m <= 0:
        raise ValidationError(f"bandwidth must be positive, got {m}")
    d = profile.d
    if profile.j_size == 0:
        b1, b2 = density_bias_terms(model, profile.realized_point(m))
    else:
        xs = profile.slice_point()
        grad_s = np.asarray(model.density_grad(xs), dtype=float)
        hess_s = np.asarray(model.density_hessian(xs), dtype=float)
        off_j = np.array([i not in profile.j_set for i in range(1, d + 1)])
        b1 = float(np.dot(0.5 - xs * off_j, grad_s))
        if off_j.any():
            sub = np.ix_(off_j, off_j)
            x_sub = xs[off_j]
            cov = x_sub[:, None] * np.eye(off_j.sum()) - np.outer(x_sub, x_sub)
            b1 += 0.5 * float(np.sum(cov * hess_s[sub]))
        origin = np.zeros(d)
        grad_0 = np.asarray(model.density_grad(origin), dtype=float)
        hess_0 = np.asarray(model.density_hessian(origin), dtype=float)
        lam = profile.lambda_vector()
        eye = np.eye(d)
        coeff = (1.0 / 6.0 + lam[:, None]) * eye + (0.125 + 0.5 * lam[None, :]) * (1.0 - eye)
        b2 = float(-np.dot(lam, grad_0) + np.sum(coeff * hess_0))
    note = "o(m^-2)" if profile.is_full_boundary else "o(m^-2 + m^-1)"
    return BiasExpansion(
        bracket_m1=b1,
        bracket_m2=b2,
        m=float(m),
        value=b1 / m + b2 / m**2,
        order_note=note,
    )


# ---------------------------------------------------------------------------
# density estimator: variance, mse, optimal bandwidth
# ---------------------------------------------------------------------------

def _variance_factor(model: DensityModel, profile: BoundaryProfile) -> float:
    """The m- and n-free part of the leading variance term."""
    xs = profile.slice_point()
    f_slice = float(model.density(xs))
    psi_factor = psi(xs, sorted(set(range(1, profile.d + 1)) - profile.j_set))
    prod = 1.0
    for lam in profile.boundary.values():
        prod *= poisson_equal_probability(lam)
    return f_slice * psi_factor * prod


def density_variance_leading(
    model: DensityModel, profile: BoundaryProfile, m: float, n: float
) -> float:
    """Leading variance term ``n^-1 m^((d+|J|)/2)`` times the profile factor."""
    _check_model(model, profile)
    _check_mn(m, n)
    power = 0.5 * (profile.d + profile.j_size)
    return m**power / n * _variance_factor(model, profile)


_DENSITY_VAR_NOTE = "n^-1 m^((d+|J|)/2) (O(m^-1) + o(1) [J not full])"


def density_m_opt(
    model: DensityModel, profile: BoundaryProfile, n: float
) -> tuple[float, float] | None:
    """Bandwidth minimizing the two-term mse, with the mse it attains.

    Returns ``None`` when no interior optimum exists: either the leading
    bias bracket or the leading variance factor vanishes.
    """
    _check_model(model, profile)
    _check_mn(1.0, n)
    bracket = density_bias_boundary(model, profile, 1.0).bracket_m1
    vfactor = _variance_factor(model, profile)
    if bracket == 0.0 or vfactor == 0.0:
        return None
    a = profile.d + profile.j_size
    s = a + 4.0
    m_opt = n ** (2.0 / s) * abs(bracket) ** (4.0 / s) / ((a / 4.0) * vfactor) ** (2.0 / s)
    mse = (
        n ** (-4.0 / s)
        * abs(bracket) ** (2.0 * a / s)
        * (4.0 / a + 1.0)
        * ((a / 4.0) * vfactor) ** (4.0 / s)
    )
    return m_opt, mse


def _density_m_opt_note(bracket: float, vfactor: float) -> str:
    if bracket == 0.0:
        return "none (zero bias bracket)"
    return "none (zero variance factor)" if vfactor == 0.0 else ""


def density_mse(
    model: DensityModel, profile: BoundaryProfile, m: float, n: float
) -> "ExpansionReport":
    """Two-term mse of the density estimator: leading variance + squared leading bias."""
    bias = density_bias_boundary(model, profile, m)
    var = density_variance_leading(model, profile, m, n)
    mse = var + (bias.bracket_m1 / m) ** 2
    opt = density_m_opt(model, profile, n)
    vfactor = _variance_factor(model, profile)
    return ExpansionReport(
        estimator="density",
        model=model.name,
        profile=profile.to_dict(),
        m=float(m),
        n=float(n),
        terms={
            "bias_m1": bias.bracket_m1,
            "bias_m2": bias.bracket_m2,
            "bias": bias.value,
            "var_leading": var,
            "mse": mse,
        },
        order_notes={
            "bias": bias.order_note,
            "var_leading": _DENSITY_VAR_NOTE,
            "mse": "sum of the two error orders above",
        },
        m_opt=None if opt is None else opt[0],
        mse_at_m_opt=None if opt is None else opt[1],
        m_opt_note=_density_m_opt_note(bias.bracket_m1, vfactor) if opt is None else "",
    )


# -- reduced-bias variant under vanishing boundary derivatives --------------

def shoulder_bracket(model: DensityModel, profile: BoundaryProfile) -> float:
    """Second-order bias bracket once the first-order one vanishes.

    Requires the gradient to vanish on the profile's limit slice, and the
    Hessian to vanish there in every pair of non-scaling coordinates;
    violations raise with the offending derivative named.
    """
    _check_model(model, profile)
    xs = profile.slice_point()
    grad = np.asarray(model.density_grad(xs), dtype=float)
    hess = np.asarray(model.density_hessian(xs), dtype=float)
    d = profile.d
    for i in range(d):
        if abs(grad[i]) > SHOULDER_TOL:
            raise ValidationError(
                f"shoulder condition violated: df/dx_{i + 1} at the boundary slice is {grad[i]!r}"
            )
    off_j = [i for i in range(d) if (i + 1) not in profile.j_set]
    for i in off_j:
        for j in off_j:
            if abs(hess[i, j]) > SHOULDER_TOL:
                raise ValidationError(
                    "shoulder condition violated: "
                    f"d2f/dx_{i + 1}dx_{j + 1} at the boundary slice is {hess[i, j]!r}"
                )
    lam = profile.lambda_vector()
    total = 0.0
    for i in range(d):
        for j in range(d):
            if i in off_j and j in off_j:
                continue
            coeff = (1.0 / 6.0 + lam[i]) if i == j else (0.125 + 0.5 * lam[j])
            total += coeff * hess[i, j]
    return float(total)


def density_m_opt_shoulder(
    model: DensityModel, profile: BoundaryProfile, n: float
) -> tuple[float, float] | None:
    """Optimal bandwidth for the reduced-bias mse; defined only for full J."""
    if not profile.is_full_boundary:
        raise ValidationError(
            "the reduced-bias optimum is only defined when every coordinate scales "
            "with the bandwidth (J = {1..d})"
        )
    _check_mn(1.0, n)
    b2 = shoulder_bracket(model, profile)
    vfactor = _variance_factor(model, profile)
    if b2 == 0.0 or vfactor == 0.0:
        return None
    d = profile.d
    s = d + 4.0
    m_opt = n ** (1.0 / s) * abs(b2) ** (2.0 / s) / ((d / 4.0) * vfactor) ** (1.0 / s)
    mse = (
        n ** (-4.0 / s)
        * abs(b2) ** (2.0 * d / s)
        * (4.0 / d + 1.0)
        * ((d / 4.0) * vfactor) ** (4.0 / s)
    )
    return m_opt, mse


def density_mse_shoulder(
    model: DensityModel, profile: BoundaryProfile, m: float, n: float
) -> "ExpansionReport":
    """Mse with the m^-4 squared bias term, valid under the shoulder condition."""
    _check_mn(m, n)
    b2 = shoulder_bracket(model, profile)
    var = density_variance_leading(model, profile, m, n)
    mse = var + b2**2 / m**4
    opt = density_m_opt_shoulder(model, profile, n) if profile.is_full_boundary else None
    vfactor = _variance_factor(model, profile)
    if profile.is_full_boundary:
        note = "" if opt is not None else _density_m_opt_note(b2, vfactor)
    else:
        note = "none (optimum defined only for full J)"
    return ExpansionReport(
        estimator="density",
        model=model.name,
        profile=profile.to_dict(),
        m=float(m),
        n=float(n),
        terms={
            "bias_m2_shoulder": b2,
            "var_leading": var,
            "mse": mse,
        },
        order_notes={
            "var_leading": _DENSITY_VAR_NOTE,
            "mse": "+ o(m^-4 + m^-3 [J not full])",
        },
        m_opt=None if opt is None else opt[0],
        mse_at_m_opt=None if opt is None else opt[1],
        m_opt_note=note,
    )


# ---------------------------------------------------------------------------
# cdf estimator
# ---------------------------------------------------------------------------

_CDF_BIAS_NOTE = "O(m^-3) + o(m^-3/2) [J not full]"
_CDF_VAR_NOTE = "O(n^-1 m^-2) + o(n^-1 m^-1/2) [J not full]"


def cdf_bias_boundary(model: DensityModel, profile: BoundaryProfile, m: float) -> BiasExpansion:
    """Two-term bias of the smoothed cdf estimator at a near-boundary profile.

    A profile with a zero scale parameter pins the evaluation point to the
    boundary face where the estimator vanishes almost surely, so the bias
    is exactly zero there.
    """
    _check_model(model, profile)
    model.require_cdf()
    if m <= 0:
        raise ValidationError(f"bandwidth must be positive, got {m}")
    if profile.j_size > 0 and profile.has_zero_lambda:
        return BiasExpansion(0.0, 0.0, float(m), 0.0, "exact (estimator vanishes a.s.)")
    d = profile.d
    xs = profile.slice_point()
    hess_s = np.asarray(model.cdf_hessian(xs), dtype=float)
    off_j = np.array([i not in profile.j_set for i in range(1, d + 1)])
    b1 = 0.0
    if off_j.any():
        sub = np.ix_(off_j, off_j)
        x_sub = xs[off_j]
        cov = x_sub[:, None] * np.eye(off_j.sum()) - np.outer(x_sub, x_sub)
        b1 = 0.5 * float(np.sum(cov * hess_s[sub]))
    hess_0 = np.asarray(model.cdf_hessian(np.zeros(d)), dtype=float)
    lam = profile.lambda_vector()
    b2 = 0.5 * float(np.dot(lam, np.diag(hess_0)))
    return BiasExpansion(
        bracket_m1=b1,
        bracket_m2=b2,
        m=float(m),
        value=b1 / m + b2 / m**2,
        order_note=_CDF_BIAS_NOTE,
    )


@dataclass(frozen=True)
class VarianceExpansion:
    value: float
    order_note: str


def cdf_variance_boundary(
    model: DensityModel, profile: BoundaryProfile, m: float, n: float
) -> VarianceExpansion:
    """Leading variance of the smoothed cdf estimator near the boundary.

    Coordinates in J contribute a nonnegative coupling term of order
    ``n^-1 m^-1``; fixed interior coordinates reduce the empirical-cdf
    variance by a term of order ``n^-1 m^-1/2``.  Profiles pinned to the
    boundary (a zero scale parameter) give exactly zero.
    """
    _check_model(model, profile)
    model.require_cdf()
    _check_mn(m, n)
    if profile.j_size > 0 and profile.has_zero_lambda:
        return VarianceExpansion(0.0, "exact (estimator vanishes a.s.)")
    d = profile.d
    xs = profile.slice_point()
    grad_s = np.asarray(model.cdf_grad(xs), dtype=float)
    total = 0.0
    for i in range(1, d + 1):
        if i in profile.j_set:
            total += grad_s[i - 1] * min_coupling_factor(profile.boundary[i])
        else:
            xi = profile.interior[i]
            total -= grad_s[i - 1] * math.sqrt(m) * math.sqrt(xi * (1.0 - xi) / math.pi)
    value = total / (n * m)
    if profile.j_size == 0:
        f_val = float(model.cdf(profile.realized_point(m)))
        value += f_val * (1.0 - f_val) / n
    return VarianceExpansion(value=value, order_note=_CDF_VAR_NOTE)


def cdf_mse(model: DensityModel, profile: BoundaryProfile, m: float, n: float) -> "ExpansionReport":
    """Mse of the smoothed cdf estimator: variance expansion + squared bias.

    No finite bandwidth minimizes the mse for a nonempty J; the report
    carries an explicit marker instead of a number.
    """
    bias = cdf_bias_boundary(model, profile, m)
    var = cdf_variance_boundary(model, profile, m, n)
    mse = var.value + bias.value**2
    if profile.j_size > 0 and profile.has_zero_lambda:
        note = "none (estimator vanishes a.s.; mse exactly 0)"
    elif profile.j_size > 0:
        note = "none (no finite optimum in m)"
    else:
        note = "interior case: optimal m handled by the interior expansion, not here"
    return ExpansionReport(
        estimator="cdf",
        model=model.name,
        profile=profile.to_dict(),
        m=float(m),
        n=float(n),
        terms={
            "bias_m1": bias.bracket_m1,
            "bias_m2": bias.bracket_m2,
            "bias": bias.value,
            "var_leading": var.value,
            "mse": mse,
        },
        order_notes={
            "bias": bias.order_note,
            "var_leading": var.order_note,
            "mse": "sum of the two error orders above",
        },
        m_opt=None,
        mse_at_m_opt=None,
        m_opt_note=note,
    )


# ---------------------------------------------------------------------------
# report container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionReport:
    """Named leading terms with their error-order annotations.

    ``m_opt`` is ``None`` when no interior optimum exists; ``m_opt_note``
    then explains why.  Serialization keeps stable field names, with the
    note substituted into the ``m_opt`` slot when the value is undefined.
    """

    estimator: str
    model: str
    profile: dict
    m: float | None
    n: float | None
    terms: dict[str, float]
    order_notes: dict[str, str]
    m_opt: float | None
    mse_at_m_opt: float | None
    m_opt_note: str

    def to_dict(self) -> dict[str, object]:
        return {
            "estimator": self.estimator,
            "model": self.model,
            "profile": self.profile,
            "m": self.m,
            "n": self.n,
            "terms": dict(self.terms),
            "order_notes": dict(self.order_notes),
            "m_opt": self.m_opt if self.m_opt is not None else (self.m_opt_note or "none"),
            "mse_at_m_opt": self.mse_at_m_opt,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# shared validation helpers
# ---------------------------------------------------------------------------

def _check_model(model: DensityModel, profile: BoundaryProfile) -> None:
    if model.d != profile.d:
        raise ValidationError(
            f"model dimension {model.d} does not match profile dimension {profile.d}"
        )


def _check_mn(m: float, n: float) -> None:
    if m <= 0:
        raise ValidationError(f"bandwidth must be positive, got {m}")
    if n <= 0:
        raise ValidationError(f"sample size must be positive, got {n}")
