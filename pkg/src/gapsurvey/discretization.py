"""Uniform 1D mesh and P1 finite-element assembly on D = (0, 1).

Homogeneous Dirichlet conditions are imposed by eliminating the boundary
rows/columns, so every assembled operator is a symmetric tridiagonal matrix
over the ``n - 1`` interior nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .coefficient import CoefficientModel, Family, NodeEvaluator, ParameterPoint, bounds
from .errors import CoercivityError

__all__ = [
    "UniformMesh",
    "GaussLegendre",
    "TridiagonalSymmetric",
    "assemble_mass",
    "assemble_stiffness",
    "assemble_from_node_values",
    "coefficient_range_on_quadrature",
    "element_averages_exact_affine",
]


@dataclass(frozen=True)
class UniformMesh:
    """Uniform mesh of ``n`` cells on (0, 1); degrees of freedom sit at the
    ``n - 1`` interior nodes."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"mesh needs n >= 2 cells, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def dof(self) -> int:
        return self.n - 1

    def interior_nodes(self) -> np.ndarray:
        return np.arange(1, self.n, dtype=np.float64) * self.h

    def quadrature_nodes(self, rule: "GaussLegendre") -> np.ndarray:
        """All quadrature sites, element-major: site e*nq + q lies in cell e."""
        ref = rule.points
        return ((np.arange(self.n, dtype=np.float64)[:, None] + ref[None, :]) * self.h).ravel()


@lru_cache(maxsize=None)
def _gauss_on_unit(npoints: int):
    # map Gauss-Legendre from (-1, 1) to (0, 1); weights renormalised to sum 1
    x, w = np.polynomial.legendre.leggauss(npoints)
    pts = 0.5 * (x + 1.0)
    wts = 0.5 * w
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


@dataclass(frozen=True)
class GaussLegendre:
    """Gauss-Legendre quadrature on the reference cell (0, 1).

    Two points per cell is the default: exact for the mean term and accurate
    to O((j*pi*h)^4) for the j-th sine term of the coefficient expansion.
    """

    npoints: int = 2

    def __post_init__(self):
        if not 1 <= self.npoints <= 16:
            raise ValueError(f"quadrature order must be in 1..16, got {self.npoints}")

    @property
    def points(self) -> np.ndarray:
        return _gauss_on_unit(self.npoints)[0]

    @property
    def weights(self) -> np.ndarray:
        """Averaging weights (they sum to 1)."""
        return _gauss_on_unit(self.npoints)[1]


@dataclass
class TridiagonalSymmetric:
    """Symmetric tridiagonal matrix stored as diagonal and off-diagonal arrays."""

    diag: np.ndarray
    off: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        self.diag = np.ascontiguousarray(self.diag, dtype=np.float64)
        self.off = np.ascontiguousarray(self.off, dtype=np.float64)
        if self.diag.ndim != 1 or self.off.ndim != 1:
            raise ValueError("diag and off must be 1-d arrays")
        if self.diag.size < 1 or self.off.size != self.diag.size - 1:
            raise ValueError(
                f"off-diagonal length {self.off.size} does not match size {self.diag.size}")

    @property
    def size(self) -> int:
        return self.diag.size

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        out = self.diag * v
        if self.off.size:
            out[:-1] += self.off * v[1:]
            out[1:] += self.off * v[:-1]
        return out

    def quadratic_form(self, v) -> float:
        return float(np.asarray(v) @ self.matvec(v))

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.off.size:
            m += np.diag(self.off, 1) + np.diag(self.off, -1)
        return m

    def norm_inf(self) -> float:
        return float(np.abs(self.to_dense()).sum(axis=1).max()) if self.size else 0.0


def assemble_mass(mesh: UniformMesh) -> TridiagonalSymmetric:
    """Interior-node P1 mass matrix: diag 2h/3, off-diagonal h/6 (exact)."""
    h = mesh.h
    return TridiagonalSymmetric(
        np.full(mesh.dof, 2.0 * h / 3.0), np.full(max(mesh.dof - 1, 0), h / 6.0))


def assemble_from_node_values(vals: np.ndarray, mesh: UniformMesh,
                              rule: GaussLegendre) -> TridiagonalSymmetric:
    """Stiffness matrix from coefficient values at the quadrature sites.

    ``vals`` has one entry per site of ``mesh.quadrature_nodes(rule)``. The
    arithmetic (term order, division realised as multiplication by n = 1/h)
    mirrors the solver kernels exactly so that matrices assembled here match
    the survey path bit for bit.
    """
    nq = rule.npoints
    w = rule.weights
    vals = np.asarray(vals, dtype=np.float64)
    if vals.shape != (mesh.n * nq,):
        raise ValueError(f"expected {mesh.n * nq} site values, got {vals.shape}")
    if np.min(vals) <= 0.0:
        raise CoercivityError("coefficient is non-positive at a quadrature site")
    abar = w[0] * vals[0::nq]
    for q in range(1, nq):
        abar = abar + w[q] * vals[q::nq]
    inv_h = float(mesh.n)
    diag = (abar[:-1] + abar[1:]) * inv_h
    off = -abar[1:-1] * inv_h
    return TridiagonalSymmetric(diag, off)


def assemble_stiffness(mesh: UniformMesh, model: CoefficientModel, y,
                       rule: GaussLegendre = GaussLegendre(2)) -> TridiagonalSymmetric:
    """Stiffness matrix of the weighted Laplacian for one realisation.

    Entry (i, i) is (abar_i + abar_{i+1})/h and entry (i, i+1) is
    -abar_{i+1}/h, where abar_e is the quadrature average of the coefficient
    over cell e (the gradient factors contribute +-1/h^2 times cell length h).

    Raises CoercivityError if an affine model has no positive uniform lower
    bound, or if the coefficient is non-positive at any quadrature site.
    """
    if model.family is Family.AFFINE and not bounds(model).coercive:
        raise CoercivityError(
            "affine model has a_min <= 0; eigensolves require a coercive model")
    yv = y.values if isinstance(y, ParameterPoint) else np.asarray(y, dtype=np.float64)
    vals = NodeEvaluator(model, mesh.quadrature_nodes(rule)).values(yv[None, :])[0]
    return assemble_from_node_values(vals, mesh, rule)


def coefficient_range_on_quadrature(mesh: UniformMesh, model: CoefficientModel, y,
                                    rule: GaussLegendre = GaussLegendre(2)):
    """(min, max) of the coefficient over all quadrature sites of the mesh.

    These realised bounds feed the per-sample eigenvalue brackets; for the
    log-normal family they replace the non-existent uniform bounds.
    """
    yv = y.values if isinstance(y, ParameterPoint) else np.asarray(y, dtype=np.float64)
    vals = NodeEvaluator(model, mesh.quadrature_nodes(rule)).values(yv[None, :])[0]
    return float(np.min(vals)), float(np.max(vals))


def element_averages_exact_affine(mesh: UniformMesh, model: CoefficientModel, y) -> np.ndarray:
    """Cell averages of an affine coefficient by exact antiderivatives.

    Reference integration used as a test oracle for the quadrature-based
    assembly; not part of the solve path.
    """
    if model.family is not Family.AFFINE:
        raise ValueError("exact-affine averages are defined for the affine family only")
    yv = y.values if isinstance(y, ParameterPoint) else np.asarray(y, dtype=np.float64)
    yv = yv[: model.s]
    edges = np.arange(mesh.n + 1, dtype=np.float64) * mesh.h
    avg = np.full(mesh.n, model.a0)
    for j in range(1, model.s + 1):
        # (1/h) * integral of sin(j pi x) over [x_e, x_{e+1}]
        anti = -np.cos(j * np.pi * edges) / (j * np.pi)
        avg += yv[j - 1] * (model.c0 / (j * j)) * (anti[1:] - anti[:-1]) * mesh.n
    return avg
