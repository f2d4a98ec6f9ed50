"""Command line front end.

Subcommands:

    survey   run the gap survey from a JSON config, write CSV/JSON/SVG
    theory   print the computable diagnostics report as JSON
    points   dump the first lattice points as CSV (external validation)
    fit      recompute the power-law fit from a finished levels CSV
"""

from __future__ import annotations

import argparse
import json
import sys

from . import _kernels as kernels
from . import analysis, svgplot
from .config import config_hash, load_config
from .errors import (ConfigError, FitError, GapSurveyError, SampleFailedError)
from .qmc import genvec_checksum, lattice_points_block
from .survey import gap_samples, read_levels_csv, run_survey, write_gap_csv

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_SAMPLE = 3
EXIT_FIT = 4


def _apply_overrides(cfg, args):
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "genvec", None) is not None:
        cfg.genvec_path = args.genvec
    if getattr(args, "m_max", None) is not None:
        cfg.m_max = args.m_max
    if getattr(args, "no_shift", False):
        cfg.no_shift = True
    if getattr(args, "dump_gaps", None) is not None:
        cfg.dump_gaps = args.dump_gaps
    if getattr(args, "levels_csv", None) is not None:
        cfg.levels_csv = args.levels_csv
    if getattr(args, "report_json", None) is not None:
        cfg.report_json = args.report_json
    if getattr(args, "svg", None) is not None:
        cfg.svg = args.svg
    return cfg


def _provenance(cfg, seq):
    return {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "genvec": seq.source,
        "genvec_sha256": genvec_checksum(seq.z),
    }


def cmd_survey(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    seq = cfg.lattice()
    prov = _provenance(cfg, seq)
    echo = cfg.semantic_dict()
    echo.update(prov)
    result = run_survey(model=cfg.model, mesh=cfg.mesh, seq=seq, rule=cfg.rule,
                        options=cfg.solver, fail_policy=cfg.fail_policy,
                        workers=args.workers, config_echo=echo)

    if cfg.levels_csv:
        write_gap_csv(result.levels, cfg.levels_csv, provenance=prov)
        print(f"levels -> {cfg.levels_csv}")
    if cfg.dump_gaps:
        samples = gap_samples(cfg.model, cfg.mesh, seq, range(seq.n_max),
                              rule=cfg.rule, options=cfg.solver)
        write_gap_csv(samples, cfg.dump_gaps, provenance=prov)
        print(f"samples -> {cfg.dump_gaps}")
    if cfg.report_json:
        payload = {
            "provenance": result.config_echo,
            "backend": result.backend,
            "n_star": result.n_star,
            "delta_star": result.delta_star,
            "failed_count": result.failed_count,
            "clustered_count": result.clustered_count,
            "fit": (None if result.fit is None else
                    {"alpha": result.fit.alpha, "beta": result.fit.beta,
                     "n_used": result.fit.n_used}),
            "residual_audit": result.residual_audit,
            "levels": [{"m": l.m, "N": l.n_points, "delta_N": l.delta,
                        "argmin_index": l.argmin_index, "diff": l.diff,
                        "failed": l.failed} for l in result.levels],
        }
        with open(cfg.report_json, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        print(f"report -> {cfg.report_json}")
    if cfg.svg:
        min_series = svgplot.Series(
            "min gap", [(l.n_points, l.delta) for l in result.levels], "circle")
        diff_series = svgplot.Series(
            "distance", [(l.n_points, l.diff) for l in result.levels], "triangle")
        fit = None if result.fit is None else (result.fit.alpha, result.fit.beta)
        svgplot.write_loglog_svg(cfg.svg, [min_series, diff_series], fit=fit,
                                 title=f"gap minimum, {cfg.model.family.value} "
                                       f"c0={cfg.model.c0}")
        print(f"svg -> {cfg.svg}")

    print(f"backend={result.backend} N*={result.n_star} "
          f"delta_N*={result.delta_star!r} failed={result.failed_count}")
    if result.fit is not None:
        print(f"fit: alpha={result.fit.alpha!r} beta={result.fit.beta!r} "
              f"({result.fit.n_used} points)")
    else:
        print("fit: insufficient positive distance points")
    return EXIT_OK


def cmd_theory(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    report = analysis.theory_report(cfg.model, cfg.mesh).to_json_dict()
    report["config_hash"] = config_hash(cfg)
    text = json.dumps(report, indent=2)
    if cfg.report_json:
        with open(cfg.report_json, "w") as fh:
            fh.write(text + "\n")
        print(f"report -> {cfg.report_json}")
    else:
        print(text)
    return EXIT_OK


def cmd_points(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    seq = cfg.lattice()
    if args.count > seq.n_max:
        print(f"error: count {args.count} exceeds 2^m_max = {seq.n_max}",
              file=sys.stderr)
        return EXIT_CONFIG
    rows = lattice_points_block(seq, range(args.count))
    header = ",".join(f"y{j + 1}" for j in range(seq.s))
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"points -> {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fit(args) -> int:
    levels = read_levels_csv(args.levels_csv)
    pts = [(l.n_points, l.diff) for l in levels[:-1]]
    fit = analysis.power_law_fit(pts)
    print(f"fit: alpha={fit.alpha!r} beta={fit.beta!r} "
          f"({fit.n_used} points, {fit.n_filtered} filtered)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapsurvey",
        description="survey the spectral gap of a random-coefficient elliptic "
                    "eigenvalue problem over QMC realisations")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_outputs=True):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, help="override qmc.seed")
        p.add_argument("--genvec", help="override qmc.genvec_path")
        p.add_argument("--m-max", type=int, dest="m_max", help="override qmc.m_max")
        p.add_argument("--no-shift", action="store_true",
                       help="suppress the random shift (deterministic lattice)")
        if with_outputs:
            p.add_argument("--report-json", help="override output.report_json")

    p_survey = sub.add_parser("survey", help="run the gap survey")
    common(p_survey)
    p_survey.add_argument("--workers", type=int, default=1,
                          help="worker threads (result is worker-independent)")
    p_survey.add_argument("--dump-gaps", help="write per-sample CSV here")
    p_survey.add_argument("--levels-csv", help="override output.levels_csv")
    p_survey.add_argument("--svg", help="override output.svg")
    p_survey.set_defaults(func=cmd_survey)

    p_theory = sub.add_parser("theory", help="print the diagnostics report")
    common(p_theory)
    p_theory.set_defaults(func=cmd_theory)

    p_points = sub.add_parser("points", help="dump lattice points as CSV")
    common(p_points, with_outputs=False)
    p_points.add_argument("--count", type=int, required=True,
                          help="number of points to dump")
    p_points.add_argument("--out", help="output path (default stdout)")
    p_points.set_defaults(func=cmd_points)

    p_fit = sub.add_parser("fit", help="recompute the fit from a levels CSV")
    p_fit.add_argument("levels_csv", help="levels CSV from a finished survey")
    p_fit.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SampleFailedError as exc:
        print(f"survey aborted: {exc}", file=sys.stderr)
        return EXIT_SAMPLE
    except FitError as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (GapSurveyError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
