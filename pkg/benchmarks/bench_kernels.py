#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the batched gap solve (assembly + two bisections per realisation) and
the scalar inertia count on identical inputs, checks that both backends
agree bit for bit, and prints per-sample costs plus the speedup.

    python benchmarks/bench_kernels.py [--n 64] [--samples 4096] [--repeat 3]
"""

import argparse
import time

import numpy as np

from gapsurvey.coefficient import CoefficientModel, NodeEvaluator
from gapsurvey.discretization import GaussLegendre, UniformMesh, assemble_mass
from gapsurvey.eigensolve import discrete_laplacian_eigenvalue
from gapsurvey._kernels import _fallback

try:
    from gapsurvey._kernels import _native
except ImportError:
    _native = None


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=64, help="mesh cells")
    ap.add_argument("--samples", type=int, default=4096, help="batch size")
    ap.add_argument("--repeat", type=int, default=3, help="timing repeats")
    args = ap.parse_args()

    model = CoefficientModel.affine(c0=1.0, s=100)
    mesh = UniformMesh(args.n)
    rule = GaussLegendre(2)
    rng = np.random.default_rng(0)
    rows = rng.uniform(-0.5, 0.5, size=(args.samples, model.s))

    t0 = time.perf_counter()
    vals = NodeEvaluator(model, mesh.quadrature_nodes(rule)).values(rows)
    t_eval = time.perf_counter() - t0

    chi1 = discrete_laplacian_eigenvalue(mesh, 1)
    chi2 = discrete_laplacian_eigenvalue(mesh, 2)
    gap_args = (vals, mesh.n, rule.npoints, rule.weights, float(mesh.n),
                2.0 * mesh.h / 3.0, mesh.h / 6.0, chi1, chi2, 1e-12, 1e-12, 200)

    print(f"batch: {args.samples} samples, n={args.n} "
          f"({mesh.dof} dof), node evaluation {t_eval:.3f}s (shared)")
    t_fb, out_fb = bench(_fallback.batch_gap, gap_args, args.repeat)
    print(f"  fallback batch_gap: {t_fb:.3f}s "
          f"({1e6 * t_fb / args.samples:.1f} us/sample)")
    if _native is None:
        print("  native backend not built; skipping comparison")
        return
    t_nt, out_nt = bench(_native.batch_gap, gap_args, args.repeat)
    print(f"  native   batch_gap: {t_nt:.3f}s "
          f"({1e6 * t_nt / args.samples:.1f} us/sample)")
    print(f"  speedup: {t_fb / t_nt:.1f}x")
    agree = all(np.array_equal(a, b) for a, b in zip(out_fb, out_nt))
    print(f"  outputs bit-identical: {agree}")

    mass = assemble_mass(mesh)
    diag = vals[:, 0::2][0]
    ad = (np.concatenate([diag, diag])[: mesh.dof] + 2.0) * mesh.n
    ao = -np.abs(diag[: mesh.dof - 1]) * mesh.n * 0.5
    sigmas = np.linspace(chi1 * 0.5, chi2 * 2.0, 2000)

    def sweep(impl):
        return [impl.pencil_inertia(ad, ao, mass.diag, mass.off, s) for s in sigmas]

    t_fb, counts_fb = bench(lambda: sweep(_fallback), (), args.repeat)
    t_nt, counts_nt = bench(lambda: sweep(_native), (), args.repeat)
    print(f"scalar pencil_inertia x{len(sigmas)}: fallback {t_fb:.3f}s, "
          f"native {t_nt:.3f}s, speedup {t_fb / t_nt:.1f}x, "
          f"equal: {counts_fb == counts_nt}")


if __name__ == "__main__":
    main()
