import math

import numpy as np
import pytest
from scipy.special import ndtri

from conftest import inverse_normal_oracle
from gapsurvey.coefficient import (CoefficientModel, Family, NodeEvaluator,
                                   ParameterPoint, bounds, evaluate,
                                   inverse_normal_cdf, summability, term_sup_norm)
from gapsurvey.errors import CoercivityError


def test_model_validation():
    with pytest.raises(ValueError):
        CoefficientModel.affine(a0=0.0)
    with pytest.raises(ValueError):
        CoefficientModel.affine(c0=-0.1)
    with pytest.raises(ValueError):
        CoefficientModel(Family.AFFINE, s=0)
    with pytest.raises(ValueError):
        CoefficientModel.lognormal(a_star=-1.0)
    assert CoefficientModel("affine").family is Family.AFFINE
    assert Family.parse("log-normal") is Family.LOGNORMAL


def test_parameter_point_validation():
    p = ParameterPoint([0.5, -0.5, 0.0])
    assert len(p) == 3
    with pytest.raises(ValueError):
        ParameterPoint([0.6])
    with pytest.raises(ValueError):
        ParameterPoint([math.nan])
    with pytest.raises(ValueError):
        ParameterPoint([])
    with pytest.raises(ValueError):
        p.values[0] = 0.0  # read-only


def test_evaluate_affine_trivials():
    m = CoefficientModel.affine(c0=1.0, s=100)
    assert evaluate(m, 0.3, np.zeros(100)) == 1.0
    m1 = CoefficientModel.affine(c0=1.0, s=1)
    assert evaluate(m1, 0.5, [0.5]) == pytest.approx(1.5, abs=1e-15)


def test_evaluate_lognormal_trivials():
    m = CoefficientModel.lognormal(a_star=0.0, c0=1.0, s=100)
    assert evaluate(m, 0.3, np.zeros(100)) == pytest.approx(1.0, abs=1e-15)
    # quantile argument hits 0 exactly
    with pytest.raises(ValueError):
        evaluate(m, 0.3, np.full(100, -0.5))


def test_evaluate_domain_checks():
    m = CoefficientModel.affine(s=3)
    with pytest.raises(ValueError):
        evaluate(m, -0.1, np.zeros(3))
    with pytest.raises(ValueError):
        evaluate(m, 0.5, np.zeros(2))  # too short


def test_evaluate_noncoercive_raises():
    # single-term model with c0 = 3: a(1/2) = 1 - 1.5 < 0 at the corner
    m = CoefficientModel.affine(c0=3.0, s=1)
    with pytest.raises(CoercivityError):
        evaluate(m, 0.5, [-0.5])


def test_bounds_paper_configurations():
    half = 0.5 * sum(1.0 / j**2 for j in range(1, 101))
    b1 = bounds(CoefficientModel.affine(c0=1.0, s=100))
    assert b1.a_min == pytest.approx(1.0 - half, rel=1e-15)
    assert b1.a_max == pytest.approx(1.0 + half, rel=1e-15)
    assert round(b1.a_min, 2) == 0.18 and round(b1.a_max, 2) == 1.82
    b2 = bounds(CoefficientModel.affine(c0=1.223, s=100))
    assert 1.9e-4 < b2.a_min < 2.2e-4
    assert b2.a_max == pytest.approx(2.0, abs=3e-4)
    b3 = bounds(CoefficientModel.affine(c0=0.5, s=100))
    assert round(b3.a_min, 2) == 0.59 and round(b3.a_max, 2) == 1.41
    assert b3.coercive and b3.bounded


def test_bounds_lognormal_unbounded_marker():
    b = bounds(CoefficientModel.lognormal(a_star=0.0))
    assert b.a_min == 0.0
    assert math.isinf(b.a_max)
    assert not b.bounded
    assert bounds(CoefficientModel.lognormal(a_star=0.18)).a_min == 0.18


def test_term_sup_norm():
    m = CoefficientModel.affine(c0=1.0, s=100)
    assert term_sup_norm(m, 1) == 1.0
    assert term_sup_norm(m, 10) == 0.01
    assert term_sup_norm(m, 101) == 0.0  # truncated series
    with pytest.raises(ValueError):
        term_sup_norm(m, 0)
    norms = [term_sup_norm(m, j) for j in range(1, 120)]
    assert all(a >= b for a, b in zip(norms, norms[1:]))


def test_summability_direct_sums():
    m = CoefficientModel.affine(c0=1.0, s=100)
    assert summability(m, 1.0) == pytest.approx(sum(j**-2 for j in range(1, 101)), rel=1e-14)
    assert summability(m, 0.5) == pytest.approx(sum(1.0 / j for j in range(1, 101)), rel=1e-14)
    assert summability(m, 0.5) == pytest.approx(5.187377517639621, rel=1e-12)
    assert summability(CoefficientModel.affine(c0=0.0), 0.7) == 0.0
    with pytest.raises(ValueError):
        summability(m, 0.0)
    # every term is <= 1 for c0 <= 1, so t^p shrinks as p grows and the sum
    # is non-increasing in p (the p=0.5 and p=1 values above show it too)
    ps = np.linspace(0.1, 1.0, 10)
    sums = [summability(m, p) for p in ps]
    assert all(a >= b - 1e-12 for a, b in zip(sums, sums[1:]))


def test_inverse_normal_cdf_values():
    assert inverse_normal_cdf(0.5) == 0.0
    assert inverse_normal_cdf(0.975) == pytest.approx(inverse_normal_oracle(0.975), abs=1e-9)
    assert inverse_normal_cdf(0.975) == pytest.approx(1.959964, abs=1e-6)
    assert inverse_normal_cdf(0.841344746) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        inverse_normal_cdf(0.0)
    with pytest.raises(ValueError):
        inverse_normal_cdf(1.0)
    with pytest.raises(ValueError):
        inverse_normal_cdf(-0.3)


def test_inverse_normal_cdf_accuracy_grid():
    us = np.concatenate([
        np.array([1e-10, 1e-9, 1e-6, 1e-3]),
        np.linspace(0.01, 0.99, 99),
        1.0 - np.array([1e-10, 1e-9, 1e-6, 1e-3]),
    ])
    ours = inverse_normal_cdf(us)
    for u, x in zip(us, ours):
        assert abs(x - inverse_normal_oracle(u)) <= 1e-9
    assert np.max(np.abs(ours - ndtri(us))) <= 1e-9


def test_inverse_normal_cdf_symmetry_and_monotone():
    us = np.linspace(1e-6, 1 - 1e-6, 1000)
    x = inverse_normal_cdf(us)
    assert np.all(np.diff(x) > 0)
    assert np.max(np.abs(inverse_normal_cdf(us) + inverse_normal_cdf(1.0 - us))) <= 1e-9


def test_affine_in_y_midpoint_identity():
    m = CoefficientModel.affine(c0=1.0, s=50)
    rng = np.random.default_rng(11)
    for _ in range(50):
        y1 = rng.uniform(-0.5, 0.5, 50)
        y2 = rng.uniform(-0.5, 0.5, 50)
        x = float(rng.uniform(0, 1))
        mid = evaluate(m, x, (y1 + y2) / 2.0)
        avg = 0.5 * (evaluate(m, x, y1) + evaluate(m, x, y2))
        assert mid == pytest.approx(avg, rel=1e-12)


def test_affine_values_within_bounds_bulk():
    # uniform bounds hold over a large random cloud of (x, y)
    m = CoefficientModel.affine(c0=1.0, s=100)
    b = bounds(m)
    rng = np.random.default_rng(5)
    xs = rng.uniform(0.0, 1.0, 128)
    ev = NodeEvaluator(m, xs)
    rows = rng.uniform(-0.5, 0.5, size=(1024, 100))
    vals = ev.values(rows)  # 1024 x 128 > 1e5 point evaluations
    assert vals.size >= 10**5
    assert vals.min() >= b.a_min - 1e-12
    assert vals.max() <= b.a_max + 1e-12


def test_node_evaluator_matches_scalar_evaluate():
    rng = np.random.default_rng(2)
    xs = rng.uniform(0, 1, 7)
    for m in (CoefficientModel.affine(c0=1.0, s=20),
              CoefficientModel.lognormal(a_star=0.3, c0=0.7, s=20)):
        ev = NodeEvaluator(m, xs)
        row = rng.uniform(-0.49, 0.49, 20)
        got = ev.values(row[None, :])[0]
        want = [evaluate(m, float(x), row) for x in xs]
        assert got == pytest.approx(want, rel=1e-12)


def test_node_evaluator_invalid_rows():
    m = CoefficientModel.lognormal(s=4)
    ev = NodeEvaluator(m, np.array([0.5]))
    rows = np.array([[0.0, 0.0, 0.0, 0.0], [-0.5, 0.0, 0.0, 0.0]])
    assert ev.invalid_rows(rows).tolist() == [False, True]
    affine_ev = NodeEvaluator(CoefficientModel.affine(s=4), np.array([0.5]))
    assert not affine_ev.invalid_rows(rows).any()
