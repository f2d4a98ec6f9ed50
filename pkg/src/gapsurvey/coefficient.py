"""Parametric diffusion coefficient families on D = (0, 1).

Two families are supported:

* affine:      a(x, y) = a0 + sum_{j=1}^{s} y_j * (c0/j^2) * sin(j*pi*x)
* log-normal:  a(x, y) = a_star + exp(sum_{j=1}^{s} G^{-1}(y_j + 1/2) * (c0/j^2) * sin(j*pi*x))

where y_j ranges over [-1/2, 1/2] and G^{-1} is the inverse of the standard
normal CDF. The expansion is truncated at a finite stochastic dimension ``s``;
terms beyond ``s`` are identically zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CoercivityError

__all__ = [
    "Family",
    "CoefficientModel",
    "CoefficientBounds",
    "ParameterPoint",
    "NodeEvaluator",
    "evaluate",
    "bounds",
    "term_sup_norm",
    "summability",
    "inverse_normal_cdf",
]


class Family(enum.Enum):
    AFFINE = "affine"
    LOGNORMAL = "lognormal"

    @classmethod
    def parse(cls, name: str) -> "Family":
        try:
            return cls(str(name).strip().lower().replace("-", "").replace("_", ""))
        except ValueError:
            raise ValueError(f"unknown coefficient family {name!r}; "
                             f"expected 'affine' or 'lognormal'") from None


@dataclass(frozen=True)
class CoefficientModel:
    """Immutable description of one coefficient realisation family.

    Parameters
    ----------
    family : Family
        Affine or log-normal.
    a0 : float
        Constant mean term, must be positive. Ignored by the log-normal
        family (whose mean term is the shift ``a_star``).
    c0 : float
        Amplitude of the sine expansion, must be non-negative.
    s : int
        Stochastic dimension (number of active expansion terms), >= 1.
    a_star : float
        Additive shift of the log-normal family, >= 0. Ignored for affine.
    """

    family: Family
    a0: float = 1.0
    c0: float = 1.0
    s: int = 100
    a_star: float = 0.0

    def __post_init__(self):
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", Family.parse(self.family))
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if not self.a0 > 0:
            raise ValueError(f"a0 must be > 0, got {self.a0}")
        if self.c0 < 0:
            raise ValueError(f"c0 must be >= 0, got {self.c0}")
        if self.a_star < 0:
            raise ValueError(f"a_star must be >= 0, got {self.a_star}")

    @classmethod
    def affine(cls, a0=1.0, c0=1.0, s=100):
        return cls(Family.AFFINE, a0=a0, c0=c0, s=s)

    @classmethod
    def lognormal(cls, a_star=0.0, c0=1.0, s=100, a0=1.0):
        return cls(Family.LOGNORMAL, a0=a0, c0=c0, s=s, a_star=a_star)

    def basis_half_sum(self) -> float:
        """(c0/2) * sum_{j<=s} j^-2, the worst-case affine fluctuation."""
        return 0.5 * self.c0 * sum(1.0 / (j * j) for j in range(1, self.s + 1))


class ParameterPoint:
    """A point y in the parameter cube [-1/2, 1/2]^s.

    Out-of-range components are input errors and rejected on construction.
    """

    __slots__ = ("_y",)

    def __init__(self, y):
        arr = np.array(y, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise ValueError("parameter point must have at least one component")
        bad = np.nonzero(~(np.abs(arr) <= 0.5))[0]  # also catches NaN
        if bad.size:
            j = int(bad[0])
            raise ValueError(f"parameter component {j} = {arr[j]!r} outside [-1/2, 1/2]")
        arr.setflags(write=False)
        self._y = arr

    @property
    def values(self) -> np.ndarray:
        return self._y

    def __len__(self) -> int:
        return self._y.size

    def __repr__(self) -> str:
        return f"ParameterPoint(dim={self._y.size})"


def _as_components(y, s: int) -> np.ndarray:
    """First ``s`` components of a ParameterPoint or array-like."""
    arr = y.values if isinstance(y, ParameterPoint) else np.asarray(y, dtype=np.float64)
    if arr.ndim != 1 or arr.size < s:
        raise ValueError(f"parameter point must supply at least {s} components")
    return arr[:s]


def evaluate(model: CoefficientModel, x: float, y) -> float:
    """Coefficient value a(x, y) at a single spatial point.

    Raises
    ------
    CoercivityError
        If an affine model evaluates to a non-positive value (the uniform
        lower bound assumption is violated for this model).
    ValueError
        If ``x`` is outside [0, 1], ``y`` is too short, or a log-normal
        component maps onto the boundary of the normal quantile domain.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x = {x!r} outside [0, 1]")
    yv = _as_components(y, model.s)
    if model.family is Family.AFFINE:
        acc = model.a0
        for j in range(1, model.s + 1):
            acc += yv[j - 1] * (model.c0 / (j * j)) * math.sin(j * math.pi * x)
        if acc <= 0.0:
            raise CoercivityError(
                f"affine coefficient is {acc!r} <= 0 at x={x!r}; "
                "uniform positivity fails for this model")
        return float(acc)
    acc = 0.0
    for j in range(1, model.s + 1):
        u = yv[j - 1] + 0.5
        if not 0.0 < u < 1.0:
            raise ValueError(
                f"log-normal family needs |y_j| < 1/2 strictly; component {j - 1} "
                f"gives quantile argument {u!r}")
        acc += inverse_normal_cdf(u) * (model.c0 / (j * j)) * math.sin(j * math.pi * x)
    return float(model.a_star + math.exp(acc))


@dataclass(frozen=True)
class CoefficientBounds:
    """Uniform-in-(x, y) coefficient bounds; ``a_max`` is ``inf`` when none exist."""

    a_min: float
    a_max: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.a_max)

    @property
    def coercive(self) -> bool:
        return self.a_min > 0.0


def bounds(model: CoefficientModel) -> CoefficientBounds:
    """Uniform coefficient bounds for the model.

    For the affine family these are ``a0 -/+ (c0/2) sum j^-2`` (not sharp:
    the sine terms never peak at a common x, so the actual range is
    narrower). ``a_min <= 0`` is returned as-is; any caller that needs
    coercivity must reject such models itself.

    The log-normal family is positive but has no finite upper bound, so
    ``a_max`` is the explicit marker ``math.inf`` and ``a_min = a_star``.
    """
    if model.family is Family.AFFINE:
        half = model.basis_half_sum()
        return CoefficientBounds(model.a0 - half, model.a0 + half)
    return CoefficientBounds(model.a_star, math.inf)


def term_sup_norm(model: CoefficientModel, j: int) -> float:
    """Sup norm of the j-th expansion term on (0, 1): c0/j^2, or 0 beyond s."""
    if j < 1:
        raise ValueError(f"term index must be >= 1, got {j}")
    if j > model.s:
        return 0.0
    return model.c0 / (j * j)


def summability(model: CoefficientModel, p: float) -> float:
    """sum_{j=1}^{s} ||a_j||_sup^p for an exponent p in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return float(sum(term_sup_norm(model, j) ** p for j in range(1, model.s + 1)))


# Rational approximation of the inverse standard normal CDF (Wichura's
# PPND16 / algorithm AS 241). Three branches; relative error below 1e-15
# over (1e-300, 1 - 1e-16), far inside the 1e-9 contract of this module.
_ICDF_A = (3.3871328727963666080e0, 1.3314166789178437745e2,
           1.9715909503065514427e3, 1.3731693765509461125e4,
           4.5921953931549871457e4, 6.7265770927008700853e4,
           3.3430575583588128105e4, 2.5090809287301226727e3)
_ICDF_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
           5.3941960214247511077e3, 2.1213794301586595867e4,
           3.9307895800092710610e4, 2.8729085735721942674e4,
           5.2264952788528545610e3)
_ICDF_C = (1.42343711074968357734e0, 4.63033784615654529590e0,
           5.76949722146069140550e0, 3.64784832476320460504e0,
           1.27045825245236838258e0, 2.41780725177450611770e-1,
           2.27238449892691845833e-2, 7.74545014278341407640e-4)
_ICDF_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
           6.89767334985100004550e-1, 1.48103976427480074590e-1,
           1.51986665636164571966e-2, 5.47593808499534494600e-4,
           1.05075007164441684324e-9)
_ICDF_E = (6.65790464350110377720e0, 5.46378491116411436990e0,
           1.78482653991729133580e0, 2.96560571828504891230e-1,
           2.65321895265761230930e-2, 1.24266094738807843860e-3,
           2.71155556874348757815e-5, 2.01033439929228813265e-7)
_ICDF_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
           1.48753612908506148525e-2, 7.86869131145613259100e-4,
           1.84631831751005468180e-5, 1.42151175831644588870e-7,
           2.04426310338993978564e-15)


def _horner(coeffs, r):
    acc = coeffs[7]
    for c in reversed(coeffs[:7]):
        acc = acc * r + c
    return acc


def inverse_normal_cdf(u):
    """Inverse of the standard normal CDF.

    Accepts a scalar or ndarray with entries strictly inside (0, 1) and
    returns the matching quantiles. Absolute error is below 1e-9 for
    u in [1e-10, 1 - 1e-10] (the approximation is in fact good to about
    machine precision there).
    """
    arr = np.asarray(u, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("inverse_normal_cdf requires 0 < u < 1")
    q = arr - 0.5
    central = np.abs(q) <= 0.425

    r_c = 0.180625 - q * q
    x_central = q * _horner(_ICDF_A, r_c) / _horner(_ICDF_B, r_c)

    r_t = np.where(q < 0.0, arr, 1.0 - arr)
    # clamp so the unused central lanes stay finite inside sqrt/log
    r_t = np.sqrt(-np.log(np.where(central, 0.25, r_t)))
    near = r_t <= 5.0
    x_near = _horner(_ICDF_C, r_t - 1.6) / _horner(_ICDF_D, r_t - 1.6)
    x_far = _horner(_ICDF_E, r_t - 5.0) / _horner(_ICDF_F, r_t - 5.0)
    x_tail = np.where(near, x_near, x_far)
    x_tail = np.where(q < 0.0, -x_tail, x_tail)

    out = np.where(central, x_central, x_tail)
    if np.isscalar(u) or arr.ndim == 0:
        return float(out)
    return out


class NodeEvaluator:
    """Evaluates a(x, .) at a fixed set of spatial sites for batches of rows.

    The sine basis is sampled once at construction; per-sample evaluation
    then accumulates the expansion term by term in a fixed j order, so a
    sample's values do not depend on batch size or on how work is split
    across threads. The survey and the assembly routines share this path.
    """

    def __init__(self, model: CoefficientModel, x):
        self.model = model
        self.x = np.ascontiguousarray(x, dtype=np.float64)
        if self.x.ndim != 1:
            raise ValueError("x must be a 1-d array of sites")
        j = np.arange(1, model.s + 1, dtype=np.float64)
        self._basis = (model.c0 / (j * j))[:, None] * np.sin(
            j[:, None] * np.pi * self.x[None, :])

    def values(self, rows) -> np.ndarray:
        """Coefficient values, shape (batch, len(x)).

        ``rows`` is a (batch, >= s) array of parameter components. For the
        log-normal family every component must satisfy |y_j| < 1/2 strictly;
        call sites that stream arbitrary realisations should pre-filter with
        :meth:`invalid_rows`.
        """
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))[:, : self.model.s]
        if rows.shape[1] < self.model.s:
            raise ValueError(f"rows must supply {self.model.s} components")
        if self.model.family is Family.AFFINE:
            acc = np.full((rows.shape[0], self.x.size), self.model.a0)
            for jdx in range(self.model.s):
                acc += rows[:, jdx : jdx + 1] * self._basis[jdx]
            return acc
        t = inverse_normal_cdf(rows + 0.5)
        acc = np.zeros((rows.shape[0], self.x.size))
        for jdx in range(self.model.s):
            acc += t[:, jdx : jdx + 1] * self._basis[jdx]
        return self.model.a_star + np.exp(acc)

    def invalid_rows(self, rows) -> np.ndarray:
        """Boolean mask of rows the log-normal transform must reject."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))[:, : self.model.s]
        if self.model.family is Family.AFFINE:
            return np.zeros(rows.shape[0], dtype=bool)
        u = rows + 0.5
        return np.any((u <= 0.0) | (u >= 1.0), axis=1)
