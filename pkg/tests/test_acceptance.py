"""Acceptance gate: one test per criterion, each printing a PASS line with
its measured numbers (run with ``pytest tests/test_acceptance.py -v -s``)."""

import json
import math
import pathlib
import time

import numpy as np
import pytest
from scipy.linalg import eigh

from conftest import random_pencil
from gapsurvey.analysis import gap_condition_report, lipschitz_report, power_law_fit
from gapsurvey.cli import main
from gapsurvey.coefficient import CoefficientModel, bounds, summability
from gapsurvey.config import load_config
from gapsurvey.discretization import GaussLegendre, UniformMesh
from gapsurvey.eigensolve import discrete_laplacian_eigenvalue, smallest_eigenvalues
from gapsurvey.qmc import LatticeSequence, korobov_vector, lattice_points_block
from gapsurvey.survey import run_survey, solve_gap_batch

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"
MESH = UniformMesh(64)
RULE = GaussLegendre(2)


def _chi(mesh):
    return (discrete_laplacian_eigenvalue(mesh, 1),
            discrete_laplacian_eigenvalue(mesh, 2))


def _lattice(model, m_max, seed=1):
    z = korobov_vector(model.s, max(m_max, 1))
    return LatticeSequence.create(z, m_max, model.s, seed=seed)


def test_criterion_01_eigensolver_matches_dense_oracle():
    rng = np.random.default_rng(2024)
    t0 = time.monotonic()
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 17))
        a, m = random_pencil(rng, n)
        ours = smallest_eigenvalues(a, m, 2).values
        ref = eigh(a.to_dense(), m.to_dense(), eigvals_only=True)[:2]
        worst = max(worst, float(np.max(np.abs(ours - ref) / np.abs(ref))))
    elapsed = time.monotonic() - t0
    assert worst <= 1e-10
    assert elapsed < 5.0
    print(f"PASS criterion 1: 500 pencils, max rel err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_closed_form_laplacian_eigenvalues():
    worst = 0.0
    for n in (8, 16, 32, 64, 128):
        mesh = UniformMesh(n)
        model = CoefficientModel.affine(c0=0.0)
        lam1, lam2, _, _, status = solve_gap_batch(model, mesh, RULE,
                                                   np.zeros((1, 100)))
        assert status[0] == 0
        for k, lam in ((1, lam1[0]), (2, lam2[0])):
            want = discrete_laplacian_eigenvalue(mesh, k)
            worst = max(worst, abs(lam - want) / want)
    assert worst <= 1e-10
    mesh64 = UniformMesh(64)
    assert discrete_laplacian_eigenvalue(mesh64, 1) == pytest.approx(9.871577, abs=1e-4)
    assert discrete_laplacian_eigenvalue(mesh64, 2) == pytest.approx(39.51006, abs=1e-3)
    print(f"PASS criterion 2: closed form matched to {worst:.2e} rel")


def test_criterion_03_bracket_invariant_all_affine_configs():
    chi1, chi2 = _chi(MESH)
    t0 = time.monotonic()
    total = 0
    for c0 in (0.5, 1.0, 1.223):
        model = CoefficientModel.affine(c0=c0, s=100)
        seq = _lattice(model, 14)
        rows = lattice_points_block(seq, np.arange(10_000))
        lam1, lam2, lo, hi, status = solve_gap_batch(model, MESH, RULE, rows)
        assert np.all(status == 0)
        up, dn = 1.0 + 1e-9, 1.0 - 1e-9
        ok = ((lam1 >= lo * chi1 * dn) & (lam1 <= hi * chi1 * up)
              & (lam2 >= lo * chi2 * dn) & (lam2 <= hi * chi2 * up))
        assert np.all(ok), f"c0={c0}: {np.sum(~ok)} bracket violations"
        total += rows.shape[0]
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    print(f"PASS criterion 3: {total} samples, 0 violations, {elapsed:.1f}s")


def test_criterion_04_gap_floor_c0_half():
    model = CoefficientModel.affine(c0=0.5, s=100)
    b = bounds(model)
    chi1, chi2 = _chi(MESH)
    floor = b.a_min * chi2 - b.a_max * chi1
    assert floor == pytest.approx(9.455, abs=2e-3)
    seq = _lattice(model, 14)
    rows = lattice_points_block(seq, np.arange(1 << 14))
    lam1, lam2, _, _, status = solve_gap_batch(model, MESH, RULE, rows)
    assert np.all(status == 0)
    gaps = lam2 - lam1
    violations = int(np.sum(gaps < floor))
    assert violations == 0
    print(f"PASS criterion 4: 2^14 gaps >= {floor:.4f}, min gap {gaps.min():.4f}")


def test_criterion_05_figure1_qualitative_plateau():
    cfg = load_config(CONFIG_DIR / "fig1_affine_c1.json")
    cfg.m_max = 16
    t0 = time.monotonic()
    res = run_survey(model=cfg.model, mesh=cfg.mesh, seq=cfg.lattice(),
                     rule=cfg.rule, options=cfg.solver)
    elapsed = time.monotonic() - t0
    deltas = [lev.delta for lev in res.levels]
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))
    assert deltas[16] > 0.0
    rel_change = (deltas[12] - deltas[16]) / deltas[16]
    assert rel_change <= 0.10
    assert res.fit is not None and res.fit.beta > 0.0
    assert elapsed < 120.0
    print(f"PASS criterion 5: delta_2^16 = {deltas[16]:.4f}, "
          f"rel change {rel_change:.4f}, beta = {res.fit.beta:.3f}, {elapsed:.1f}s")


def test_criterion_06_qmc_prefix_structure():
    z = np.array([1, 5, 9, 13])
    seq = LatticeSequence.create(z, 8, 4, no_shift=True)
    for m in range(9):
        n = 1 << m
        pts = lattice_points_block(seq, np.arange(n)) + 0.5
        direct = np.array([[(k * int(zz)) % n / n for zz in z] for k in range(n)])
        assert sorted(map(tuple, pts)) == sorted(map(tuple, direct))
    first_two = lattice_points_block(seq, np.arange(2))
    assert np.array_equal(first_two[0], np.full(4, -0.5))
    assert np.array_equal(first_two[1], np.zeros(4))
    print("PASS criterion 6: prefix-lattice equality for m <= 8, analytic rows")


def test_criterion_07_worker_count_determinism(tmp_path):
    cfg_path = CONFIG_DIR / "fig1_affine_c1.json"
    out1 = tmp_path / "w1.csv"
    out8 = tmp_path / "w8.csv"
    common = ["--m-max", "12", "--report-json", str(tmp_path / "r.json"),
              "--svg", str(tmp_path / "c.svg")]
    assert main(["survey", "--config", str(cfg_path), "--levels-csv", str(out1),
                 "--workers", "1", *common]) == 0
    assert main(["survey", "--config", str(cfg_path), "--levels-csv", str(out8),
                 "--workers", "8", *common]) == 0
    assert out1.read_bytes() == out8.read_bytes()
    print("PASS criterion 7: workers 1 vs 8 give byte-identical levels CSV")


def test_criterion_08_fit_recovery():
    ns = 2.0 ** np.arange(1, 11)
    exact = power_law_fit(list(zip(ns, 3.0 * ns ** -0.5)))
    assert abs(exact.alpha - 3.0) <= 1e-10
    assert abs(exact.beta - 0.5) <= 1e-10
    rng = np.random.default_rng(7)
    noisy = power_law_fit(list(zip(ns, 2.0 / ns * (1.0 + 1e-3 * rng.uniform(-1, 1, 10)))))
    assert abs(noisy.beta - 1.0) <= 0.01
    print(f"PASS criterion 8: exact fit to 1e-10, noisy beta {noisy.beta:.4f}")


def test_criterion_09_lognormal_smoke_surveys():
    chi1, chi2 = _chi(MESH)
    for a_star in (0.0, 0.18):
        model = CoefficientModel.lognormal(a_star=a_star, c0=1.0, s=100)
        seq = _lattice(model, 12)
        res = run_survey(model=model, mesh=MESH, seq=seq, fail_policy="record")
        assert math.isfinite(res.levels[-1].delta)
        # realised-bound brackets for every non-failed sample, re-checked here
        rows = lattice_points_block(seq, np.arange(1 << 12))
        lam1, lam2, lo, hi, status = solve_gap_batch(model, MESH, RULE, rows)
        good = status == 0
        assert np.sum(good) + res.failed_count == 1 << 12
        up, dn = 1.0 + 1e-9, 1.0 - 1e-9
        ok = ((lam1[good] >= lo[good] * chi1 * dn) & (lam1[good] <= hi[good] * chi1 * up)
              & (lam2[good] >= lo[good] * chi2 * dn) & (lam2[good] <= hi[good] * chi2 * up))
        assert np.all(ok)
        print(f"PASS criterion 9: lognormal a*={a_star} survey complete, "
              f"{res.failed_count} failed, brackets hold on {int(np.sum(good))} samples")


def test_criterion_10_theory_report_arithmetic():
    assert gap_condition_report(CoefficientModel.affine(c0=0.5, s=100)).holds
    assert not gap_condition_report(CoefficientModel.affine(c0=1.0, s=100)).holds
    model = CoefficientModel.affine(c0=1.0, s=100)
    for p in (0.6, 0.75, 0.9):
        rep = lipschitz_report(model, p, 1)
        assert rep.weight_sum <= summability(model, p) + 1e-12
    print("PASS criterion 10: condition verdicts and weighted-sum inequality hold")
