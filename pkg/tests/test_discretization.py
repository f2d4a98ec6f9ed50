import math

import numpy as np
import pytest

from gapsurvey.coefficient import CoefficientModel, ParameterPoint
from gapsurvey.discretization import (GaussLegendre, TridiagonalSymmetric,
                                      UniformMesh, assemble_from_node_values,
                                      assemble_mass, assemble_stiffness,
                                      coefficient_range_on_quadrature,
                                      element_averages_exact_affine)
from gapsurvey.eigensolve import inertia, smallest_eigenvalues
from gapsurvey.errors import CoercivityError


def test_mesh_basics():
    mesh = UniformMesh(64)
    assert mesh.h == 1.0 / 64
    assert mesh.dof == 63
    assert mesh.interior_nodes()[0] == pytest.approx(1.0 / 64)
    with pytest.raises(ValueError):
        UniformMesh(1)


def test_gauss_rule_weights_normalised():
    for npts in (1, 2, 3, 5):
        rule = GaussLegendre(npts)
        assert rule.weights.sum() == pytest.approx(1.0, rel=1e-15)
        assert np.all((rule.points > 0) & (rule.points < 1))
    # degree-3 exactness of the 2-point rule on the reference cell
    rule = GaussLegendre(2)
    for k, exact in ((1, 0.5), (2, 1.0 / 3.0), (3, 0.25)):
        assert float(rule.weights @ rule.points**k) == pytest.approx(exact, rel=1e-14)


def test_tridiagonal_validation_and_matvec():
    with pytest.raises(ValueError):
        TridiagonalSymmetric(np.ones(3), np.ones(3))
    t = TridiagonalSymmetric(np.array([2.0, 3.0, 2.0]), np.array([-1.0, 0.5]))
    v = np.array([1.0, 2.0, 3.0])
    assert np.allclose(t.matvec(v), t.to_dense() @ v)
    assert t.quadratic_form(v) == pytest.approx(v @ t.to_dense() @ v)
    assert t.norm_inf() == pytest.approx(4.5)


def test_mass_matrix_exact_values():
    m4 = assemble_mass(UniformMesh(4))
    assert np.allclose(m4.diag, 1.0 / 6.0, rtol=0, atol=1e-16)
    assert np.allclose(m4.off, 1.0 / 24.0, rtol=0, atol=1e-16)
    m2 = assemble_mass(UniformMesh(2))
    assert m2.diag.tolist() == [pytest.approx(1.0 / 3.0)]
    assert m2.off.size == 0


def test_mass_interior_row_sums_are_h():
    # partition of unity: interior rows away from the boundary sum to h
    mesh = UniformMesh(16)
    m = assemble_mass(mesh)
    for i in range(1, mesh.dof - 1):
        row = m.off[i - 1] + m.diag[i] + m.off[i]
        assert row == pytest.approx(mesh.h, rel=1e-15)


def test_mass_positive_definite():
    for n in (2, 8, 128):
        mesh = UniformMesh(n)
        m = assemble_mass(mesh)
        ident = TridiagonalSymmetric(np.ones(mesh.dof), np.zeros(max(mesh.dof - 1, 0)))
        smallest = smallest_eigenvalues(m, ident, 1).values[0]
        assert smallest > 0.0


def test_stiffness_constant_coefficient():
    mesh = UniformMesh(64)
    model = CoefficientModel.affine(c0=0.0)
    a = assemble_stiffness(mesh, model, ParameterPoint(np.zeros(100)))
    assert np.allclose(a.diag, 128.0, rtol=0, atol=1e-12)
    assert np.allclose(a.off, -64.0, rtol=0, atol=1e-12)


def test_stiffness_single_sine_term_against_exact_integral():
    # element averages of 1 + 0.5 sin(pi x) on (0, 1/2), (1/2, 1): the exact
    # average is 1 + 1/pi per half cell, so diag = (abar1 + abar2)/h = 5.27324.
    # Gauss-2 average error per cell is amplitude * pi^4 h^4 / 4320, so the
    # assembled entry sits within 4 * that / h of the exact value.
    mesh = UniformMesh(2)
    model = CoefficientModel.affine(c0=1.0, s=1)
    a = assemble_stiffness(mesh, model, [0.5])
    exact_diag = 2.0 * (2.0 * (1.0 + 1.0 / math.pi))
    assert exact_diag == pytest.approx(5.27324, abs=1e-5)
    quad_err = 4.0 * (0.5 * math.pi**4 * mesh.h**4 / 4320.0) / mesh.h
    assert abs(a.diag[0] - exact_diag) <= quad_err
    assert a.diag[0] == pytest.approx(exact_diag, abs=3e-3)


def test_stiffness_requires_coercive_model():
    mesh = UniformMesh(8)
    with pytest.raises(CoercivityError):
        assemble_stiffness(mesh, CoefficientModel.affine(c0=2.0), np.zeros(100))


def test_assemble_rejects_nonpositive_node_values():
    mesh = UniformMesh(4)
    rule = GaussLegendre(2)
    vals = np.full(8, 1.0)
    vals[3] = 0.0
    with pytest.raises(CoercivityError):
        assemble_from_node_values(vals, mesh, rule)


def test_quadratic_form_sandwich_random_realisations():
    # v^T A v within [a_min v^T K v, a_max v^T K v] for the c0 = 0 stiffness K
    mesh = UniformMesh(8)
    model = CoefficientModel.affine(c0=1.0, s=20)
    from gapsurvey.coefficient import bounds
    b = bounds(model)
    k = assemble_stiffness(mesh, CoefficientModel.affine(c0=0.0, s=20), np.zeros(20))
    rng = np.random.default_rng(17)
    for _ in range(8):
        y = rng.uniform(-0.5, 0.5, 20)
        a = assemble_stiffness(mesh, model, y)
        for _ in range(4):
            v = rng.standard_normal(mesh.dof)
            qa = a.quadratic_form(v)
            qk = k.quadratic_form(v)
            assert b.a_min * qk - 1e-9 <= qa <= b.a_max * qk + 1e-9


def test_quadratic_form_monotone_in_coefficient():
    # pointwise larger coefficient at every quadrature site -> larger form
    mesh = UniformMesh(16)
    rule = GaussLegendre(2)
    rng = np.random.default_rng(23)
    vals = rng.uniform(0.5, 1.5, mesh.n * rule.npoints)
    bigger = vals + rng.uniform(0.0, 0.5, vals.size)
    a1 = assemble_from_node_values(vals, mesh, rule)
    a2 = assemble_from_node_values(bigger, mesh, rule)
    for _ in range(16):
        v = rng.standard_normal(mesh.dof)
        assert a1.quadratic_form(v) <= a2.quadratic_form(v) + 1e-12


def test_spectral_sandwich_via_inertia():
    # lo*K <= A <= hi*K as forms: pencil (A, K) eigenvalues must lie in [lo, hi]
    mesh = UniformMesh(16)
    model = CoefficientModel.affine(c0=1.0, s=30)
    rule = GaussLegendre(2)
    k = assemble_stiffness(mesh, CoefficientModel.affine(c0=0.0, s=30), np.zeros(30))
    rng = np.random.default_rng(29)
    for _ in range(10):
        y = rng.uniform(-0.5, 0.5, 30)
        a = assemble_stiffness(mesh, model, y, rule)
        lo, hi = coefficient_range_on_quadrature(mesh, model, y, rule)
        assert inertia(a, k, lo * (1.0 - 1e-12)) == 0
        assert inertia(a, k, hi * (1.0 + 1e-12)) == mesh.dof


def test_coefficient_range_examples():
    mesh = UniformMesh(64)
    const = CoefficientModel.affine(c0=0.0)
    assert coefficient_range_on_quadrature(mesh, const, np.zeros(100)) == (1.0, 1.0)
    model = CoefficientModel.affine(c0=1.0, s=100)
    from gapsurvey.coefficient import bounds
    b = bounds(model)
    lo, hi = coefficient_range_on_quadrature(mesh, model, np.full(100, -0.5))
    assert b.a_min - 1e-12 <= lo <= hi <= b.a_max + 1e-12
    logn = CoefficientModel.lognormal(a_star=0.0, c0=1.0, s=100)
    lo, hi = coefficient_range_on_quadrature(mesh, logn, np.zeros(100))
    assert lo == pytest.approx(1.0, abs=1e-14)
    assert hi == pytest.approx(1.0, abs=1e-14)


def test_gauss2_matches_exact_affine_per_term():
    # cell-average error of the 2-point rule on sin(j pi x) stays below
    # (j pi h)^4 / 180 per unit amplitude, checked against the antiderivative
    mesh = UniformMesh(64)
    rule = GaussLegendre(2)
    sites = mesh.quadrature_nodes(rule)
    for j in range(1, 9):
        model = CoefficientModel.affine(c0=float(j * j), s=j)  # unit amplitude term j
        y = np.zeros(j)
        y[j - 1] = 0.5
        exact = element_averages_exact_affine(mesh, model, y)
        vals = 1.0 + 0.5 * np.sin(j * np.pi * sites)
        quad = rule.weights[0] * vals[0::2] + rule.weights[1] * vals[1::2]
        bound = (j * math.pi * mesh.h) ** 4 / 180.0
        assert np.max(np.abs(quad - exact)) <= bound


def test_exact_affine_requires_affine():
    with pytest.raises(ValueError):
        element_averages_exact_affine(UniformMesh(4), CoefficientModel.lognormal(), np.zeros(100))
