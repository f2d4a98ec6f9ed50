"""Gap survey driver: map QMC realisations to spectral gaps, track the
running minimum at dyadic sample counts, and estimate the distance to the
final minimum.

The per-sample work is a pure function of the lattice index, so the survey
shards index ranges over worker threads and writes results into
preallocated per-index arrays; output is identical for any worker count.
The running minimum delta_N is taken over lattice indices 0..N-1 exactly
(prefix semantics), snapshotted at every N = 2^m.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as kernels
from . import analysis
from .coefficient import CoefficientModel, Family, NodeEvaluator, ParameterPoint, bounds
from .discretization import GaussLegendre, UniformMesh, assemble_from_node_values, assemble_mass
from .eigensolve import discrete_laplacian_eigenvalue, inverse_iteration
from .errors import (ClusterError, CoercivityError, FitError, InvariantViolation,
                     SampleFailedError)
from .qmc import LatticeSequence, lattice_points_block

__all__ = [
    "SolverOptions",
    "GapSample",
    "FailedSample",
    "SurveyLevel",
    "SurveyResult",
    "sample_gap",
    "solve_gap_batch",
    "run_survey",
    "write_gap_csv",
    "read_levels_csv",
]

_SHARD = 4096            # fixed shard size; must not depend on worker count
_AUDIT_STRIDE = 1024     # --residual-audit checks every 1024th sample
_BRACKET_SLACK = 1e-9    # relative slack of the per-sample bracket check


@dataclass(frozen=True)
class SolverOptions:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_bisections: int = 200
    residual_audit: bool = False
    residual_tol: float = 1e-8


@dataclass(frozen=True)
class GapSample:
    index: int
    lambda1: float
    lambda2: float
    gap: float
    coeff_lo: float
    coeff_hi: float


@dataclass(frozen=True)
class FailedSample:
    index: int
    reason: str


@dataclass
class SurveyLevel:
    m: int
    n_points: int
    delta: float
    argmin_index: int
    diff: float = math.nan
    failed: int = 0


@dataclass
class SurveyResult:
    levels: list
    n_star: int
    fit: Optional[analysis.PowerLawFit]
    config_echo: dict
    failed: list = field(default_factory=list)
    failed_count: int = 0
    clustered_count: int = 0
    residual_audit: Optional[dict] = None
    backend: str = kernels.BACKEND

    @property
    def delta_star(self) -> float:
        return self.levels[-1].delta if self.levels else math.nan


def _coercivity_guard(model: CoefficientModel):
    if model.family is Family.AFFINE and not bounds(model).coercive:
        raise CoercivityError(
            "affine model has a_min <= 0; the survey requires a coercive model")


def solve_gap_batch(model: CoefficientModel, mesh: UniformMesh, rule: GaussLegendre,
                    rows: np.ndarray, options: SolverOptions = SolverOptions(),
                    evaluator: NodeEvaluator | None = None):
    """Two smallest eigenvalues for a batch of parameter rows.

    Returns (lam1, lam2, coeff_lo, coeff_hi, status) aligned with ``rows``;
    status follows the kernel codes plus 5 for log-normal rows that touch
    the quantile-domain boundary. Lanes with nonzero status carry NaNs.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if mesh.dof < 2:
        raise ValueError("the gap needs two eigenvalues; use a mesh with n >= 3")
    if evaluator is None:
        evaluator = NodeEvaluator(model, mesh.quadrature_nodes(rule))
    B = rows.shape[0]
    lam1 = np.full(B, np.nan)
    lam2 = np.full(B, np.nan)
    lo = np.full(B, np.nan)
    hi = np.full(B, np.nan)
    status = np.zeros(B, dtype=np.int8)

    bad = evaluator.invalid_rows(rows)
    status[bad] = kernels.STATUS_PARAMETER_BOUNDARY
    good = np.nonzero(~bad)[0]
    if good.size:
        vals = evaluator.values(rows[good])
        chi1h = discrete_laplacian_eigenvalue(mesh, 1)
        chi2h = discrete_laplacian_eigenvalue(mesh, 2)
        out = kernels.batch_gap(
            vals, mesh.n, rule.npoints, rule.weights, float(mesh.n),
            2.0 * mesh.h / 3.0, mesh.h / 6.0, chi1h, chi2h,
            options.abs_tol, options.rel_tol, options.max_bisections)
        lam1[good], lam2[good], lo[good], hi[good], status[good] = out
    return lam1, lam2, lo, hi, status


def _check_brackets(lam1, lam2, lo, hi, status, chi1h, chi2h, base_index=0):
    """Per-sample spectral sandwich lo*chi_k <= lam_k <= hi*chi_k, with
    relative slack; a violation means a solver bug, not a data property."""
    okm = status == kernels.STATUS_OK
    up = 1.0 + _BRACKET_SLACK
    dn = 1.0 - _BRACKET_SLACK
    viol = okm & ~(
        (lam1 >= lo * chi1h * dn) & (lam1 <= hi * chi1h * up)
        & (lam2 >= lo * chi2h * dn) & (lam2 <= hi * chi2h * up))
    if viol.any():
        b = int(np.nonzero(viol)[0][0])
        raise InvariantViolation(
            f"sample {base_index + b}: eigenvalues ({lam1[b]!r}, {lam2[b]!r}) "
            f"escape brackets [{lo[b] * chi1h!r}, {hi[b] * chi1h!r}] / "
            f"[{lo[b] * chi2h!r}, {hi[b] * chi2h!r}]")


def sample_gap(model: CoefficientModel, mesh: UniformMesh, y,
               rule: GaussLegendre = GaussLegendre(2),
               options: SolverOptions = SolverOptions()) -> GapSample:
    """Assemble, solve and bracket-check a single realisation.

    Shares the batched kernel with the survey, so a sample computed here is
    bit-identical to the same realisation inside a survey.
    """
    _coercivity_guard(model)
    yv = y.values if isinstance(y, ParameterPoint) else np.asarray(y, dtype=np.float64)
    lam1, lam2, lo, hi, status = solve_gap_batch(model, mesh, rule, yv[None, :], options)
    if status[0] != kernels.STATUS_OK:
        raise SampleFailedError(0, kernels.STATUS_REASONS.get(int(status[0]), "unknown"))
    chi1h = discrete_laplacian_eigenvalue(mesh, 1)
    chi2h = discrete_laplacian_eigenvalue(mesh, 2)
    _check_brackets(lam1, lam2, lo, hi, status, chi1h, chi2h)
    return GapSample(index=0, lambda1=float(lam1[0]), lambda2=float(lam2[0]),
                     gap=float(lam2[0] - lam1[0]), coeff_lo=float(lo[0]),
                     coeff_hi=float(hi[0]))


def _resolve_fail_policy(policy: Optional[str], model: CoefficientModel) -> str:
    if policy is None:
        # affine failures indicate misconfiguration; log-normal near-zero
        # draws are a finding, so they are recorded rather than fatal
        return "record" if model.family is Family.LOGNORMAL else "strict"
    if policy not in ("strict", "record"):
        raise ValueError(f"fail_policy must be 'strict' or 'record', got {policy!r}")
    return policy


def _residual_audit(model, mesh, rule, seq, indices, lam1, lam2, status, options):
    """Recompute eigenvectors for a sparse subsample and report residuals."""
    mass = assemble_mass(mesh)
    evaluator = NodeEvaluator(model, mesh.quadrature_nodes(rule))
    worst = 0.0
    audited = 0
    clusters = 0
    for i in indices:
        if status[i] != kernels.STATUS_OK:
            continue
        rows = lattice_points_block(seq, np.array([i]))
        vals = evaluator.values(rows)[0]
        stiff = assemble_from_node_values(vals, mesh, rule)
        for lam in (lam1[i], lam2[i]):
            try:
                _, res = inverse_iteration(stiff, mass, float(lam),
                                           tol=options.residual_tol)
            except ClusterError:
                clusters += 1
                continue
            worst = max(worst, res)
        audited += 1
    return {"samples": audited, "max_residual": worst, "cluster_skips": clusters,
            "stride": _AUDIT_STRIDE}


def run_survey(*, model: CoefficientModel, mesh: UniformMesh, seq: LatticeSequence,
               rule: GaussLegendre = GaussLegendre(2),
               options: SolverOptions = SolverOptions(),
               fail_policy: Optional[str] = None, workers: int = 1,
               config_echo: Optional[dict] = None) -> SurveyResult:
    """Run the full survey over 2^m_max lattice realisations.

    delta_N is non-increasing by construction and diff = delta_N - delta_N*
    is zero at the final level. Under the "record" policy failed samples are
    excluded from the minima and counted; under "strict" the first failure
    aborts with SampleFailedError.
    """
    _coercivity_guard(model)
    policy = _resolve_fail_policy(fail_policy, model)
    n_total = seq.n_max
    chi1h = discrete_laplacian_eigenvalue(mesh, 1)
    chi2h = discrete_laplacian_eigenvalue(mesh, 2)
    evaluator = NodeEvaluator(model, mesh.quadrature_nodes(rule))

    lam1 = np.full(n_total, np.nan)
    lam2 = np.full(n_total, np.nan)
    lo = np.full(n_total, np.nan)
    hi = np.full(n_total, np.nan)
    status = np.zeros(n_total, dtype=np.int8)

    def work(a: int, b: int):
        idx = np.arange(a, b, dtype=np.int64)
        rows = lattice_points_block(seq, idx)
        out = solve_gap_batch(model, mesh, rule, rows, options, evaluator=evaluator)
        lam1[a:b], lam2[a:b], lo[a:b], hi[a:b], status[a:b] = out

    shards = [(a, min(a + _SHARD, n_total)) for a in range(0, n_total, _SHARD)]
    if workers <= 1 or len(shards) == 1:
        for a, b in shards:
            work(a, b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda ab: work(*ab), shards))

    _check_brackets(lam1, lam2, lo, hi, status, chi1h, chi2h)

    failed_idx = np.nonzero(status != kernels.STATUS_OK)[0]
    if failed_idx.size and policy == "strict":
        first = int(failed_idx[0])
        raise SampleFailedError(first, kernels.STATUS_REASONS.get(int(status[first]), "unknown"))
    failed = [FailedSample(int(i), kernels.STATUS_REASONS.get(int(status[i]), "unknown"))
              for i in failed_idx[:100]]

    gaps = lam2 - lam1
    masked = np.where(status == kernels.STATUS_OK, gaps, np.inf)
    running = np.minimum.accumulate(masked)
    failed_running = np.cumsum(status != kernels.STATUS_OK)

    levels = []
    for m in range(seq.m_max + 1):
        n_m = 1 << m
        delta = float(running[n_m - 1])
        if math.isinf(delta):
            levels.append(SurveyLevel(m=m, n_points=n_m, delta=math.nan,
                                      argmin_index=-1, failed=int(failed_running[n_m - 1])))
        else:
            arg = int(np.argmin(masked[:n_m]))
            levels.append(SurveyLevel(m=m, n_points=n_m, delta=delta,
                                      argmin_index=arg, failed=int(failed_running[n_m - 1])))
    delta_star = levels[-1].delta
    for lev in levels:
        lev.diff = lev.delta - delta_star

    fit = None
    pts = [(float(lev.n_points), float(lev.diff)) for lev in levels[:-1]
           if math.isfinite(lev.diff) and lev.diff > 0.0]
    if len(pts) >= 2:
        try:
            fit = analysis.power_law_fit(pts)
        except FitError:
            fit = None

    solved = status == kernels.STATUS_OK
    tol_scale = np.maximum(options.abs_tol, options.rel_tol * np.abs(lam2))
    clustered = int(np.sum(solved & (gaps <= 2.0 * tol_scale)))

    audit = None
    if options.residual_audit:
        audit = _residual_audit(model, mesh, rule, seq,
                                range(0, n_total, _AUDIT_STRIDE),
                                lam1, lam2, status, options)

    return SurveyResult(levels=levels, n_star=n_total, fit=fit,
                        config_echo=dict(config_echo or {}), failed=failed,
                        failed_count=int(failed_idx.size), clustered_count=clustered,
                        residual_audit=audit)


def gap_samples(model, mesh, seq, indices, rule=GaussLegendre(2),
                options=SolverOptions()):
    """GapSample records for explicit lattice indices (used by --dump-gaps)."""
    idx = np.asarray(indices, dtype=np.int64)
    rows = lattice_points_block(seq, idx)
    lam1, lam2, lo, hi, status = solve_gap_batch(model, mesh, rule, rows, options)
    out = []
    for pos, i in enumerate(idx):
        if status[pos] != kernels.STATUS_OK:
            continue
        out.append(GapSample(index=int(i), lambda1=float(lam1[pos]),
                             lambda2=float(lam2[pos]),
                             gap=float(lam2[pos] - lam1[pos]),
                             coeff_lo=float(lo[pos]), coeff_hi=float(hi[pos])))
    return out


def _fmt(x) -> str:
    """Shortest round-trip decimal for floats; plain rendering otherwise."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_gap_csv(records, path, provenance: Optional[dict] = None):
    """Write survey output as CSV.

    ``records`` is either a list of SurveyLevel (columns
    m,N,delta_N,argmin_index,diff) or of GapSample (columns
    index,lambda1,lambda2,gap,coeff_lo,coeff_hi). Floats use shortest
    round-trip formatting; provenance entries go into leading '#' comments.
    """
    lines = []
    for key, value in (provenance or {}).items():
        lines.append(f"# {key}={value}")
    if records and isinstance(records[0], GapSample):
        lines.append("index,lambda1,lambda2,gap,coeff_lo,coeff_hi")
        for r in records:
            lines.append(",".join([str(r.index), _fmt(r.lambda1), _fmt(r.lambda2),
                                   _fmt(r.gap), _fmt(r.coeff_lo), _fmt(r.coeff_hi)]))
    else:
        lines.append("m,N,delta_N,argmin_index,diff")
        for r in records:
            lines.append(",".join([str(r.m), str(r.n_points), _fmt(r.delta),
                                   str(r.argmin_index), _fmt(r.diff)]))
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_levels_csv(path):
    """Parse a levels CSV back into SurveyLevel records (floats round-trip)."""
    levels = []
    try:
        with open(path) as fh:
            rows = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    if not rows or rows[0] != "m,N,delta_N,argmin_index,diff":
        raise ValueError(f"{path}: not a levels CSV (missing header)")
    for ln in rows[1:]:
        cols = ln.split(",")
        if len(cols) != 5:
            raise ValueError(f"{path}: malformed row {ln!r}")
        levels.append(SurveyLevel(m=int(cols[0]), n_points=int(cols[1]),
                                  delta=float(cols[2]), argmin_index=int(cols[3]),
                                  diff=float(cols[4])))
    return levels
