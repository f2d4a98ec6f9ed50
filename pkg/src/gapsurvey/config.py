"""Survey configuration: JSON schema, validation, provenance hashing.

Config files look like

    {
      "coefficient": {"family": "affine", "a0": 1.0, "c0": 1.0, "s": 100,
                      "a_star": 0.0},
      "mesh": {"n": 64},
      "quadrature": {"points": 2},
      "qmc": {"m_max": 20, "seed": 1, "genvec_path": null,
              "korobov_a": 334293, "no_shift": false},
      "solver": {"abs_tol": 1e-12, "rel_tol": 1e-12, "max_bisections": 200,
                 "residual_audit": false},
      "survey": {"fail_policy": null, "dump_gaps": null},
      "output": {"levels_csv": "levels.csv", "report_json": null, "svg": null}
    }

Unknown keys and out-of-range values raise ConfigError with the dotted field
path. The provenance hash covers only semantic fields (coefficient, mesh,
quadrature, qmc, solver, fail policy), never output paths or worker counts,
so reruns of one experiment hash identically regardless of where results go.
"""

from __future__ import annotations

import hashlib
import json
import pathlib
from dataclasses import dataclass, field
from typing import Optional

from .coefficient import CoefficientModel, Family
from .discretization import GaussLegendre, UniformMesh
from .errors import ConfigError
from .qmc import (DEFAULT_KOROBOV_MULTIPLIER, LatticeSequence, genvec_checksum,
                  korobov_vector, parse_generating_vector)
from .survey import SolverOptions

__all__ = ["SurveyConfig", "load_config", "config_from_dict", "config_hash"]


@dataclass
class SurveyConfig:
    model: CoefficientModel
    mesh: UniformMesh
    rule: GaussLegendre
    m_max: int
    seed: int
    genvec_path: Optional[str] = None
    korobov_a: int = DEFAULT_KOROBOV_MULTIPLIER
    no_shift: bool = False
    solver: SolverOptions = field(default_factory=SolverOptions)
    fail_policy: Optional[str] = None
    dump_gaps: Optional[str] = None
    levels_csv: Optional[str] = None
    report_json: Optional[str] = None
    svg: Optional[str] = None

    def lattice(self) -> LatticeSequence:
        """Build the lattice stream: explicit vector file if configured,
        otherwise the built-in Korobov-form fallback."""
        if self.genvec_path:
            text = pathlib.Path(self.genvec_path).read_text()
            z = parse_generating_vector(text, s=self.model.s)
            source = f"file:{pathlib.Path(self.genvec_path).name}"
        else:
            z = korobov_vector(self.model.s, self.m_max, self.korobov_a)
            source = f"korobov:a={self.korobov_a}"
        return LatticeSequence.create(z, self.m_max, self.model.s,
                                      seed=self.seed, no_shift=self.no_shift,
                                      source=source)

    def semantic_dict(self) -> dict:
        """Fields that define the experiment (hash input and config echo)."""
        return {
            "coefficient": {
                "family": self.model.family.value,
                "a0": self.model.a0,
                "c0": self.model.c0,
                "s": self.model.s,
                "a_star": self.model.a_star,
            },
            "mesh": {"n": self.mesh.n},
            "quadrature": {"points": self.rule.npoints},
            "qmc": {
                "m_max": self.m_max,
                "seed": self.seed,
                "genvec_path": self.genvec_path,
                "korobov_a": None if self.genvec_path else self.korobov_a,
                "no_shift": self.no_shift,
            },
            "solver": {
                "abs_tol": self.solver.abs_tol,
                "rel_tol": self.solver.rel_tol,
                "max_bisections": self.solver.max_bisections,
            },
            "fail_policy": self.fail_policy,
        }


def config_hash(cfg: SurveyConfig) -> str:
    payload = json.dumps(cfg.semantic_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _section(data: dict, name: str, allowed: set, where: str = ""):
    sec = data.get(name, {})
    path = f"{where}{name}"
    if not isinstance(sec, dict):
        raise ConfigError(path, "must be an object")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown field")
    return sec


def _num(sec: dict, path: str, key: str, default, kind=float, minimum=None,
         maximum=None, strict_min=False):
    raw = sec.get(key, default)
    if raw is None:
        return None
    try:
        val = kind(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}", f"must be a {kind.__name__}") from None
    if kind is int and isinstance(raw, float) and raw != int(raw):
        raise ConfigError(f"{path}.{key}", "must be an integer")
    if minimum is not None:
        if strict_min and not val > minimum:
            raise ConfigError(f"{path}.{key}", f"must be > {minimum}")
        if not strict_min and not val >= minimum:
            raise ConfigError(f"{path}.{key}", f"must be >= {minimum}")
    if maximum is not None and not val <= maximum:
        raise ConfigError(f"{path}.{key}", f"must be <= {maximum}")
    return val


def config_from_dict(data: dict) -> SurveyConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    for key in data:
        if key not in {"coefficient", "mesh", "quadrature", "qmc", "solver",
                       "survey", "output"}:
            raise ConfigError(key, "unknown section")

    coeff = _section(data, "coefficient", {"family", "a0", "c0", "s", "a_star"})
    try:
        family = Family.parse(coeff.get("family", "affine"))
    except ValueError as exc:
        raise ConfigError("coefficient.family", str(exc)) from None
    a0 = _num(coeff, "coefficient", "a0", 1.0, float, minimum=0.0, strict_min=True)
    c0 = _num(coeff, "coefficient", "c0", 1.0, float, minimum=0.0)
    s = _num(coeff, "coefficient", "s", 100, int, minimum=1)
    a_star = _num(coeff, "coefficient", "a_star", 0.0, float, minimum=0.0)
    try:
        model = CoefficientModel(family, a0=a0, c0=c0, s=s, a_star=a_star)
    except ValueError as exc:
        raise ConfigError("coefficient", str(exc)) from None

    mesh_sec = _section(data, "mesh", {"n"})
    n = _num(mesh_sec, "mesh", "n", 64, int, minimum=2)
    mesh = UniformMesh(n)

    quad = _section(data, "quadrature", {"points"})
    npts = _num(quad, "quadrature", "points", 2, int, minimum=1, maximum=16)
    rule = GaussLegendre(npts)

    qmc_sec = _section(data, "qmc", {"m_max", "seed", "genvec_path", "korobov_a",
                                     "no_shift"})
    m_max = _num(qmc_sec, "qmc", "m_max", 20, int, minimum=0, maximum=32)
    seed = _num(qmc_sec, "qmc", "seed", 1, int)
    genvec_path = qmc_sec.get("genvec_path")
    if genvec_path is not None and not isinstance(genvec_path, str):
        raise ConfigError("qmc.genvec_path", "must be a string path or null")
    korobov_a = _num(qmc_sec, "qmc", "korobov_a", DEFAULT_KOROBOV_MULTIPLIER,
                     int, minimum=1)
    if korobov_a % 2 == 0:
        raise ConfigError("qmc.korobov_a", "must be odd")
    no_shift = bool(qmc_sec.get("no_shift", False))

    solver_sec = _section(data, "solver", {"abs_tol", "rel_tol", "max_bisections",
                                           "residual_audit"})
    solver = SolverOptions(
        abs_tol=_num(solver_sec, "solver", "abs_tol", 1e-12, float, minimum=0.0,
                     strict_min=True),
        rel_tol=_num(solver_sec, "solver", "rel_tol", 1e-12, float, minimum=0.0),
        max_bisections=_num(solver_sec, "solver", "max_bisections", 200, int,
                            minimum=1),
        residual_audit=bool(solver_sec.get("residual_audit", False)),
    )

    survey_sec = _section(data, "survey", {"fail_policy", "dump_gaps"})
    fail_policy = survey_sec.get("fail_policy")
    if fail_policy is not None and fail_policy not in ("strict", "record"):
        raise ConfigError("survey.fail_policy", "must be 'strict', 'record' or null")
    dump_gaps = survey_sec.get("dump_gaps")
    if dump_gaps is not None and not isinstance(dump_gaps, str):
        raise ConfigError("survey.dump_gaps", "must be a string path or null")

    out = _section(data, "output", {"levels_csv", "report_json", "svg"})
    for key in ("levels_csv", "report_json", "svg"):
        if out.get(key) is not None and not isinstance(out[key], str):
            raise ConfigError(f"output.{key}", "must be a string path or null")

    return SurveyConfig(model=model, mesh=mesh, rule=rule, m_max=m_max, seed=seed,
                        genvec_path=genvec_path, korobov_a=korobov_a,
                        no_shift=no_shift, solver=solver, fail_policy=fail_policy,
                        dump_gaps=dump_gaps, levels_csv=out.get("levels_csv"),
                        report_json=out.get("report_json"), svg=out.get("svg"))


def load_config(path) -> SurveyConfig:
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    return config_from_dict(data)
