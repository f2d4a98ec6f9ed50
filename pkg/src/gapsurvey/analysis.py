"""Computable spectral-gap diagnostics.

Everything here is plain arithmetic on the model metadata plus, for the
empirical check, a sampling pass through the solver:

* min-max eigenvalue brackets  a_min*chi_k <= lambda_k(y) <= a_max*chi_k,
  with chi_k the k-th Dirichlet Laplacian eigenvalue on (0, 1);
* the sufficient gap condition a_min/a_max > chi_1/chi_2 and its floor
  a_min*chi_2 - a_max*chi_1 on lambda_2 - lambda_1;
* term-norm summability sums and the reparametrised Lipschitz constant
  built from the weights alpha_j = ||a_j||^epsilon + 1/j with
  epsilon = 1 - p, q = p/(1 - p);
* the log-log least-squares power-law fit used for the distance column.

Reports carry both continuum chi values (pi^2, 4 pi^2) and their discrete
counterparts; machine-checked invariants elsewhere in the package use the
discrete ones only, because those are theorems of the discretised system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coefficient import CoefficientModel, Family, bounds, term_sup_norm
from .errors import FitError, UnboundedCoefficientError

__all__ = [
    "CHI1_CONTINUUM",
    "CHI2_CONTINUUM",
    "GapCondition",
    "LipschitzReport",
    "LipschitzCheck",
    "PowerLawFit",
    "TheoryReport",
    "gap_condition_report",
    "eigenvalue_brackets",
    "reparametrisation_weights",
    "lipschitz_report",
    "power_law_fit",
    "empirical_lipschitz_check",
    "theory_report",
]

CHI1_CONTINUUM = math.pi ** 2
CHI2_CONTINUUM = 4.0 * math.pi ** 2


@dataclass(frozen=True)
class GapCondition:
    holds: bool
    floor: Optional[float]
    coefficient_ratio: float
    chi_ratio: float


def gap_condition_report(model: CoefficientModel, chi1: float = CHI1_CONTINUUM,
                         chi2: float = CHI2_CONTINUUM) -> GapCondition:
    """Sufficient condition a_min/a_max > chi1/chi2 for a uniform gap floor.

    When it holds, every realisation's gap is at least
    a_min*chi2 - a_max*chi1 > 0. Needs finite bounds with a_min > 0;
    unbounded (log-normal) models raise UnboundedCoefficientError.
    """
    bb = bounds(model)
    if not bb.bounded:
        raise UnboundedCoefficientError(
            "gap condition needs finite coefficient bounds; the log-normal "
            "family has none")
    if not bb.coercive:
        raise UnboundedCoefficientError(
            f"gap condition needs a_min > 0, got a_min = {bb.a_min!r}")
    ratio = bb.a_min / bb.a_max
    holds = ratio > chi1 / chi2
    floor = bb.a_min * chi2 - bb.a_max * chi1 if holds else None
    return GapCondition(holds=holds, floor=floor, coefficient_ratio=ratio,
                        chi_ratio=chi1 / chi2)


def eigenvalue_brackets(a_min: float, a_max: float, chi) -> list:
    """Per-k intervals [a_min*chi_k, a_max*chi_k] from the min-max principle."""
    if not 0.0 < a_min <= a_max:
        raise ValueError(f"need 0 < a_min <= a_max, got ({a_min!r}, {a_max!r})")
    chi = np.asarray(chi, dtype=np.float64)
    if np.any(chi <= 0.0) or np.any(np.diff(chi) < 0.0):
        raise ValueError("chi values must be positive and ascending")
    return [(float(a_min * c), float(a_max * c)) for c in chi]


def reparametrisation_weights(model: CoefficientModel, p: float) -> np.ndarray:
    """Weights alpha_j = ||a_j||^epsilon + 1/j with epsilon = 1 - p.

    They decay slowly enough that rescaling y_j by alpha_j keeps the
    parameter box inside an l^q-majorised (hence compact) set while the sum
    of ||a_j||/alpha_j stays finite; all entries are positive by the 1/j term.
    """
    if not 0.5 < p < 1.0:
        raise ValueError(f"p must lie in (1/2, 1), got {p}")
    eps = 1.0 - p
    j = np.arange(1, model.s + 1, dtype=np.float64)
    norms = np.array([term_sup_norm(model, int(jj)) for jj in range(1, model.s + 1)])
    return norms ** eps + 1.0 / j


@dataclass(frozen=True)
class LipschitzReport:
    epsilon: float
    q: float
    c_tilde: float
    weight_sum: float      # sum ||a_j|| / alpha_j
    prefactor: float       # a_max^2 chi_k^2 / (a_min^2 chi_1)


def lipschitz_report(model: CoefficientModel, p: float, k: int,
                     chi1: float = CHI1_CONTINUUM,
                     chik: Optional[float] = None) -> LipschitzReport:
    """Reparametrised Lipschitz constant for eigenvalue k:

        C~ = a_max^2 chi_k^2 / (a_min^2 chi_1) * sum_j ||a_j|| / alpha_j,

    with alpha_j = ||a_j||^(1-p) + 1/j and q = p/(1-p). The weighted sum is
    bounded by the summability sum of exponent p, so C~ is finite whenever
    that sum is.
    """
    if not 0.5 < p < 1.0:
        raise ValueError(f"p must lie in (1/2, 1), got {p}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    bb = bounds(model)
    if not bb.bounded or not bb.coercive:
        raise UnboundedCoefficientError(
            "Lipschitz constants need finite bounds with a_min > 0")
    if chik is None:
        chik = (k * math.pi) ** 2
    eps = 1.0 - p
    q = p / eps
    alpha = reparametrisation_weights(model, p)
    norms = np.array([term_sup_norm(model, j) for j in range(1, model.s + 1)])
    weight_sum = float(np.sum(norms / alpha))
    prefactor = (bb.a_max ** 2 * chik ** 2) / (bb.a_min ** 2 * chi1)
    return LipschitzReport(epsilon=eps, q=q, c_tilde=prefactor * weight_sum,
                           weight_sum=weight_sum, prefactor=prefactor)


@dataclass(frozen=True)
class PowerLawFit:
    """alpha * N^(-beta) fitted by ordinary least squares in log-log space."""

    alpha: float
    beta: float
    residual_ss: float
    n_used: int
    n_filtered: int


def power_law_fit(points) -> PowerLawFit:
    """Fit d ~ alpha * N^(-beta) to (N, d) pairs.

    Pairs with d <= 0 (or non-finite) are dropped first and counted in
    ``n_filtered``; fewer than two surviving pairs, or all-equal N, raise
    FitError.
    """
    pts = [(float(n), float(d)) for n, d in points]
    usable = [(n, d) for n, d in pts
              if d > 0.0 and math.isfinite(d) and n > 0.0 and math.isfinite(n)]
    n_filtered = len(pts) - len(usable)
    if len(usable) < 2:
        raise FitError(f"need >= 2 positive points for the fit, have {len(usable)} "
                       f"({n_filtered} filtered)")
    x = np.log([n for n, _ in usable])
    yv = np.log([d for _, d in usable])
    xm = x.mean()
    ym = yv.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise FitError("all N values coincide; slope is undefined")
    slope = float(np.sum((x - xm) * (yv - ym))) / sxx
    intercept = ym - slope * xm
    resid = yv - (slope * x + intercept)
    return PowerLawFit(alpha=float(math.exp(intercept)), beta=float(-slope),
                       residual_ss=float(np.sum(resid ** 2)),
                       n_used=len(usable), n_filtered=n_filtered)


@dataclass(frozen=True)
class LipschitzCheck:
    max_ratio: float
    bound: float
    pairs_used: int


def empirical_lipschitz_check(model: CoefficientModel, mesh, pairs: int,
                              seed: int = 0, rule=None,
                              options=None) -> LipschitzCheck:
    """Largest observed |lambda_1(y) - lambda_1(y')| / ||y - y'||_inf over
    random pairs, against the (loose) theoretical bound
    a_max^2 chi_1^h / a_min^2 * sum ||a_j|| built from discrete chi values.
    """
    from .discretization import GaussLegendre
    from .eigensolve import discrete_laplacian_eigenvalue
    from .survey import SolverOptions, solve_gap_batch

    bb = bounds(model)
    if not bb.bounded or not bb.coercive:
        raise UnboundedCoefficientError("empirical check needs a coercive affine model")
    if pairs < 1:
        raise ValueError("need at least one pair")
    rule = rule or GaussLegendre(2)
    options = options or SolverOptions()
    rng = np.random.default_rng(seed)
    rows = rng.uniform(-0.5, 0.5, size=(2 * pairs, model.s))
    lam1, _, _, _, status = solve_gap_batch(model, mesh, rule, rows, options)
    if np.any(status != 0):
        raise UnboundedCoefficientError("unexpected solver failure on affine samples")
    a = lam1[0::2]
    b = lam1[1::2]
    denom = np.max(np.abs(rows[0::2] - rows[1::2]), axis=1)
    keep = denom > 0.0  # identical pairs are degenerate and skipped
    ratios = np.abs(a[keep] - b[keep]) / denom[keep]
    chi1h = discrete_laplacian_eigenvalue(mesh, 1)
    norm_sum = sum(term_sup_norm(model, j) for j in range(1, model.s + 1))
    bound = (bb.a_max ** 2 * chi1h ** 2) / (bb.a_min ** 2 * chi1h) * norm_sum
    max_ratio = float(ratios.max()) if ratios.size else 0.0
    return LipschitzCheck(max_ratio=max_ratio, bound=float(bound),
                          pairs_used=int(np.sum(keep)))


@dataclass
class TheoryReport:
    """Bundle of every computable diagnostic for one model/mesh pair."""

    family: str
    a_min: float
    a_max: Optional[float]          # None encodes "unbounded"
    chi_continuum: tuple
    chi_discrete: Optional[tuple]
    brackets_continuum: Optional[list]
    brackets_discrete: Optional[list]
    condition: Optional[GapCondition]
    condition_discrete: Optional[GapCondition]
    summability: dict
    lipschitz: Optional[dict]
    epsilon: Optional[float]
    q: Optional[float]
    alpha_preview: Optional[list]
    notes: list

    def to_json_dict(self) -> dict:
        def cond(c):
            if c is None:
                return None
            return {"holds": c.holds, "floor": c.floor,
                    "coefficient_ratio": c.coefficient_ratio,
                    "chi_ratio": c.chi_ratio}

        return {
            "family": self.family,
            "a_min": self.a_min,
            "a_max": self.a_max,
            "bounded": self.a_max is not None,
            "chi_continuum": list(self.chi_continuum),
            "chi_discrete": list(self.chi_discrete) if self.chi_discrete else None,
            "brackets_continuum": self.brackets_continuum,
            "brackets_discrete": self.brackets_discrete,
            "condition": cond(self.condition),
            "condition_discrete": cond(self.condition_discrete),
            "summability": {str(p): v for p, v in self.summability.items()},
            "lipschitz": ({str(k): v for k, v in self.lipschitz.items()}
                          if self.lipschitz else None),
            "epsilon": self.epsilon,
            "q": self.q,
            "alpha_preview": self.alpha_preview,
            "notes": self.notes,
        }


def theory_report(model: CoefficientModel, mesh=None,
                  summability_exponents=(0.6, 0.75, 0.9, 1.0),
                  lipschitz_p: float = 0.75, k_max: int = 2) -> TheoryReport:
    """Assemble the full diagnostic report.

    For log-normal models the bracket/condition entries are inapplicable and
    reported as such instead of being faked from a sentinel upper bound.
    """
    from .coefficient import summability
    from .eigensolve import discrete_laplacian_eigenvalue

    bb = bounds(model)
    chi_c = tuple((k * math.pi) ** 2 for k in range(1, k_max + 1))
    chi_d = None
    if mesh is not None:
        chi_d = tuple(discrete_laplacian_eigenvalue(mesh, k) for k in range(1, k_max + 1))
    sums = {p: summability(model, p) for p in summability_exponents}
    notes = []
    if model.family is Family.LOGNORMAL or not bb.bounded or not bb.coercive:
        if model.family is Family.LOGNORMAL:
            notes.append("coefficient unbounded: brackets, gap condition and "
                         "Lipschitz constants are inapplicable")
        else:
            notes.append("a_min <= 0: uniform positivity fails, brackets and "
                         "gap condition are inapplicable")
        return TheoryReport(
            family=model.family.value, a_min=bb.a_min,
            a_max=bb.a_max if bb.bounded else None,
            chi_continuum=chi_c, chi_discrete=chi_d,
            brackets_continuum=None, brackets_discrete=None,
            condition=None, condition_discrete=None,
            summability=sums, lipschitz=None, epsilon=None, q=None,
            alpha_preview=None, notes=notes)

    cond_c = gap_condition_report(model, chi_c[0], chi_c[1])
    cond_d = None
    if chi_d is not None:
        cond_d = gap_condition_report(model, chi_d[0], chi_d[1])
    brackets_c = eigenvalue_brackets(bb.a_min, bb.a_max, chi_c)
    brackets_d = eigenvalue_brackets(bb.a_min, bb.a_max, chi_d) if chi_d else None
    lips = {}
    eps = q = None
    for k in range(1, k_max + 1):
        rep = lipschitz_report(model, lipschitz_p, k, chi_c[0], chi_c[k - 1])
        lips[k] = rep.c_tilde
        eps, q = rep.epsilon, rep.q
    alpha = reparametrisation_weights(model, lipschitz_p)[:8]
    notes.append("affine coefficient bounds are not sharp")
    return TheoryReport(
        family=model.family.value, a_min=bb.a_min, a_max=bb.a_max,
        chi_continuum=chi_c, chi_discrete=chi_d,
        brackets_continuum=brackets_c, brackets_discrete=brackets_d,
        condition=cond_c, condition_discrete=cond_d,
        summability=sums, lipschitz=lips, epsilon=eps, q=q,
        alpha_preview=[float(v) for v in alpha], notes=notes)
