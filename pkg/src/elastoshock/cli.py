"""Command-line front end.

    elastoshock rh-solve  --config run.ini --out DIR
    elastoshock classify  --config run.ini --out DIR [--allow-formal]
    elastoshock sweep     --config run.ini --out DIR [--workers N]
    elastoshock verify    --out DIR --seed 42 [--count 50]
    elastoshock pointwise --config run.ini --out DIR --eps 1e-3

Configs are INI files; see README.md for the sections each command reads.
Exit status: 0 ok, 2 invalid config, 3 admissibility failure,
4 internal-consistency failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import sampling
from .analytic import Verdict, classify, pointwise_margin
from .eos import EOSError, from_reference
from .errors import AdmissibilityError, InternalConsistencyError, ParameterError
from .lax import check_lax_pointwise
from .spectral import ScanGrid, scan_stability
from .states import (
    DimensionlessShock,
    MaterialState,
    SurfacePointData,
    nondimensionalize,
    pair_from_text,
    pair_to_text,
    solve_downstream,
)

EXIT_OK, EXIT_CONFIG, EXIT_ADMISSIBILITY, EXIT_INTERNAL = 0, 2, 3, 4

AXES = ("M", "R", "Mminus") + tuple(f"F{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3))
SWEEP_COLUMNS = ("axis1", "axis2", "verdict", "min_margin", "argmin_theta", "lax_pass")
VERIFY_COLUMNS = (
    "index", "M", "Mminus", "R", "M1", "analytic_verdict", "analytic_margin", "band",
    "spectral_verdict", "spectral_min_rel", "in_band", "agree",
)


class ConfigError(ParameterError):
    pass


@dataclass
class RunConfig:
    command: str
    sections: dict[str, dict[str, str]] = field(default_factory=dict)
    out: Path = Path(".")
    seed: int = 0
    allow_formal: bool = False
    tol: float = 1e-6
    angles: int = 1024
    grid_xi: tuple[float, float, int] | None = None
    workers: int = 1
    count: int | None = None
    eps: float | None = None

    def section(self, name: str, required: bool = True) -> dict[str, str]:
        if name not in self.sections:
            if required:
                raise ConfigError(f"config needs a [{name}] section")
            return {}
        return self.sections[name]


# --- parsing helpers --------------------------------------------------------------

def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"not a list of numbers: {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} numbers, got {len(vals)} in {text!r}")
    return vals


def _float(sec: dict, key: str, default: float | None = None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        return float(sec[key])
    except ValueError as exc:
        raise ConfigError(f"{key} is not a number: {sec[key]!r}") from exc


def parse_range(text: str) -> tuple[float, float, int]:
    """'A:B:N' -> (A, B, N) with N >= 2."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must look like A:B:N, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}") from exc
    if n < 2 or not b > a:
        raise ConfigError(f"range needs B > A and N >= 2, got {text!r}")
    return a, b, n


def read_ini(path: str | Path) -> dict[str, dict[str, str]]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return {name: dict(cp[name]) for name in cp.sections()}


def shock_from_section(sec: dict, allow_formal: bool) -> DimensionlessShock:
    """[shock] with M, R, F (9 numbers, row-major) and optional Mminus."""
    F = np.array(_floats(sec.get("F", "0 0 0 0 0 0 0 0 0"), 9)).reshape(3, 3)
    M, R = _float(sec, "M"), _float(sec, "R")
    formal = np.linalg.det(F) <= 0
    if formal and not allow_formal:
        raise AdmissibilityError("det F <= 0 (e.g. the F = 0 gas limit) needs --allow-formal")
    Mminus = _float(sec, "Mminus", _auto_mminus(M, F))
    return DimensionlessShock(M, Mminus, R, F, formal=formal)


def _auto_mminus(M: float, F: np.ndarray) -> float:
    """Twice the smallest upstream Mach number allowed by the Lax conditions."""
    mt2 = M**2 - float(F[0] @ F[0])
    return 2.0 * M / math.sqrt(mt2) if mt2 > 0 else 1.0


def load_shock(cfg: RunConfig) -> DimensionlessShock:
    if "shock" in cfg.sections:
        return shock_from_section(cfg.sections["shock"], cfg.allow_formal)
    if "pair" in cfg.sections:
        buf = io.StringIO()
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["pair"] = cfg.sections["pair"]
        cp.write(buf)
        return nondimensionalize(pair_from_text(buf.getvalue()))
    raise ConfigError("config needs a [shock] or [pair] section")


def _grid(cfg: RunConfig) -> ScanGrid:
    g = ScanGrid()
    if cfg.grid_xi:
        g.xi_min, g.xi_max, g.xi_count = cfg.grid_xi
    return g


# --- commands ----------------------------------------------------------------------

def cmd_rh_solve(cfg: RunConfig) -> int:
    eos = from_reference(cfg.section("eos").get("ref", ""))
    up = cfg.section("upstream")
    rho = _float(up, "rho")
    F = np.array(_floats(up.get("F", "1 0 0 0 1 0 0 0 1"), 9)).reshape(3, 3)
    unimodular = up.get("unimodular", "false").strip().lower() in ("1", "true", "yes")
    state = MaterialState(rho, np.zeros(3), F, unimodular=unimodular)
    pair = solve_downstream(eos, state, _float(up, "R"))
    text = pair_to_text(pair)
    (cfg.out / "pair.ini").write_text(text)
    summary = {"lax_pass": pair.lax_pass, "max_residual": pair.max_residual()}
    (cfg.out / "pair_summary.json").write_text(json.dumps(summary, sort_keys=True) + "\n")
    print(text, end="")
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    shock = load_shock(cfg)
    method = cfg.sections.get("classify", {}).get("method", "analytic")
    if method == "analytic":
        report = classify(shock, scan_points=cfg.angles)
    elif method == "spectral":
        grid = _grid(cfg)
        grid.theta_count = int(cfg.sections["classify"].get("theta_count", grid.theta_count))
        report = scan_stability(shock, grid, tol=cfg.tol)
    else:
        raise ConfigError(f"unknown classify method {method!r}")
    line = report.to_json()
    (cfg.out / "report.json").write_text(line + "\n")
    print(line)
    return EXIT_OK


def _sweep_cell(args) -> tuple:
    base, a1, v1, a2, v2, angles, mminus_fixed = args
    F = base["F"].copy()
    vals = {"M": base["M"], "R": base["R"], "Mminus": mminus_fixed}
    for name, v in ((a1, v1), (a2, v2)):
        if name.startswith("F"):
            F[int(name[1]) - 1, int(name[2]) - 1] = v
        else:
            vals[name] = v
    Mminus = vals["Mminus"] if vals["Mminus"] is not None else _auto_mminus(vals["M"], F)
    try:
        shock = DimensionlessShock(vals["M"], Mminus, vals["R"], F, formal=base["formal"])
    except ParameterError:
        return v1, v2, "non_lax", math.nan, math.nan, False
    if not shock.is_lax or (not base["formal"] and shock.detF <= 0):
        return v1, v2, "non_lax", math.nan, math.nan, False
    r = classify(shock, scan_points=angles)
    return v1, v2, r.verdict.value, r.min_margin, r.argmin_angle, True


def _sweep_row(args) -> list[tuple]:
    base, a1, v1, a2, values2, angles, mminus = args
    return [_sweep_cell((base, a1, v1, a2, v2, angles, mminus)) for v2 in values2]


def sweep_rows(cfg: RunConfig) -> list[tuple]:
    sec = cfg.section("sweep")
    a1, a2 = sec.get("axis1", "M"), sec.get("axis2", "R")
    for a in (a1, a2):
        if a not in AXES:
            raise ConfigError(f"unknown sweep axis {a!r}; choose from {AXES}")
    if a1 == a2:
        raise ConfigError("sweep axes must differ")
    r1, r2 = parse_range(sec.get("range1", "")), parse_range(sec.get("range2", ""))
    shock_sec = cfg.sections.get("shock", {})
    F = np.array(_floats(shock_sec.get("F", "0 0 0 0 0 0 0 0 0"), 9)).reshape(3, 3)
    formal = bool(np.linalg.det(F) <= 0) and not any(a.startswith("F") for a in (a1, a2))
    if formal and not cfg.allow_formal:
        raise AdmissibilityError("det F <= 0 (e.g. the F = 0 gas limit) needs --allow-formal")
    if any(a.startswith("F") for a in (a1, a2)):
        formal = cfg.allow_formal
    base = {"F": F, "M": _float(shock_sec, "M", 0.5), "R": _float(shock_sec, "R", 2.0), "formal": formal}
    mminus = float(shock_sec["Mminus"]) if "Mminus" in shock_sec else None
    v1s = np.linspace(*r1[:2], r1[2])
    v2s = np.linspace(*r2[:2], r2[2])
    jobs = [(base, a1, float(v1), a2, [float(v) for v in v2s], cfg.angles, mminus) for v1 in v1s]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_sweep_row, jobs))
    else:
        chunks = [_sweep_row(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def cmd_sweep(cfg: RunConfig) -> int:
    rows = sweep_rows(cfg)
    with open(cfg.out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    n_uniform = sum(r[2] == Verdict.UNIFORM.value for r in rows)
    print(f"{len(rows)} cells, {n_uniform} uniformly stable -> {cfg.out / 'sweep.csv'}")
    return EXIT_OK


def _verify_one(args) -> tuple:
    seed, i, sampler, grid, tol, angles = args
    shock = sampling.physical_shock(seed, i) if sampler == "physical" else sampling.dimensionless_shock(seed, i)
    a = classify(shock, scan_points=angles)
    b = scan_stability(shock, grid, tol=tol)
    band = 1e-3 * shock.Mstar**4
    in_band = abs(a.min_margin) <= band
    return (i, shock.M, shock.Mminus, shock.R, shock.M1, a.verdict.value, a.min_margin, band,
            b.verdict.value, b.min_margin + tol, in_band, a.verdict == b.verdict)


def verify_rows(cfg: RunConfig) -> list[tuple]:
    sec = cfg.sections.get("verify", {})
    n = cfg.count if cfg.count is not None else int(sec.get("count", 50))
    sampler = sec.get("sampler", "dimensionless")
    if sampler not in ("dimensionless", "physical"):
        raise ConfigError(f"unknown sampler {sampler!r}")
    if n < 1:
        raise ConfigError("count must be positive")
    grid = _grid(cfg)
    jobs = [(cfg.seed, i, sampler, grid, cfg.tol, cfg.angles) for i in range(n)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            return list(pool.map(_verify_one, jobs))
    return [_verify_one(j) for j in jobs]


def cmd_verify(cfg: RunConfig) -> int:
    rows = verify_rows(cfg)
    with open(cfg.out / "verify.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VERIFY_COLUMNS)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    outside = [r for r in rows if not r[10]]
    agree = sum(r[11] for r in outside)
    summary = {
        "count": len(rows),
        "in_band": len(rows) - len(outside),
        "agree_outside_band": agree,
        "disagree_outside_band": len(outside) - agree,
        "agree_total": sum(r[11] for r in rows),
    }
    (cfg.out / "verify_summary.json").write_text(json.dumps(summary, sort_keys=True) + "\n")
    print(f"agreement {summary['agree_total']}/{len(rows)}; outside band {agree}/{len(outside)}")
    return EXIT_OK if agree == len(outside) else EXIT_INTERNAL


POINT_KEYS = ("rho_plus", "rho_minus", "c_plus", "c_minus")


def cmd_pointwise(cfg: RunConfig) -> int:
    eps = cfg.eps
    if eps is None and "pointwise" in cfg.sections:
        eps = _float(cfg.sections["pointwise"], "eps")
    if eps is None or not eps > 0:
        raise ConfigError("pointwise needs a positive eps (--eps or [pointwise] eps); there is no default")
    names = [n for n in cfg.sections if n.startswith("point") and n != "pointwise"]
    if not names:
        raise ConfigError("no [point ...] sections")
    rows = []
    status = EXIT_OK
    for name in names:
        sec = cfg.sections[name]
        point = SurfacePointData(
            *(_float(sec, k) for k in POINT_KEYS),
            v_plus=_floats(sec.get("v_plus", ""), 3),
            v_minus=_floats(sec.get("v_minus", ""), 3),
            F_plus=_floats(sec.get("F_plus", ""), 9),
            F_minus=_floats(sec.get("F_minus", ""), 9),
            phi_t=_float(sec, "phi_t", 0.0),
            phi_x2=_float(sec, "phi_x2", 0.0),
            phi_x3=_float(sec, "phi_x3", 0.0),
        )
        if not check_lax_pointwise(point):
            rows.append((name, False, math.nan, False))
            status = EXIT_ADMISSIBILITY
            continue
        m = pointwise_margin(point, scan_points=cfg.angles)
        rows.append((name, True, m, m >= eps))
    with open(cfg.out / "pointwise.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("point", "lax_pass", "min_margin", "structurally_stable"))
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    for row in rows:
        print(",".join(_fmt(x) for x in row))
    return status


COMMANDS = {
    "rh-solve": cmd_rh_solve,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "pointwise": cmd_pointwise,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elastoshock", description="Planar elastic shock stability")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-formal", action="store_true", help="accept det F <= 0 inputs such as F = 0")
    p.add_argument("--tol", type=float, default=1e-6, help="relative zero threshold of the spectral scan")
    p.add_argument("--angles", type=int, default=1024, help="circle scan points of the analytic classifier")
    p.add_argument("--grid-xi", help="spectral xi grid as A:B:N")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--count", type=int, help="number of random shocks for verify")
    p.add_argument("--eps", type=float, help="structural-stability threshold for pointwise")
    return p


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    sections = read_ini(ns.config) if ns.config else {}
    if not 0 <= ns.seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    if ns.workers < 1:
        raise ConfigError("workers must be >= 1")
    if not ns.tol > 0:
        raise ConfigError("tol must be positive")
    return RunConfig(
        command=ns.command,
        sections=sections,
        out=ns.out,
        seed=ns.seed,
        allow_formal=ns.allow_formal,
        tol=ns.tol,
        angles=ns.angles,
        grid_xi=parse_range(ns.grid_xi) if ns.grid_xi else None,
        workers=ns.workers,
        count=ns.count,
        eps=ns.eps,
    )


def run(cfg: RunConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return COMMANDS[cfg.command](cfg)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except SystemExit as exc:
        # argparse usage errors
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except AdmissibilityError as exc:
        print(f"admissibility failure: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (ParameterError, EOSError, KeyError, ValueError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
