"""Command line front door.

    hartree5d <subcommand> <config.json>

Subcommands: groundstate, evolve, classify, check-potential, verify.
Outputs are written under $HARTREE5D_OUTDIR (default: current directory) as
CSV/JSON with fixed formatting, so identical configs produce byte-identical
data files; per-invocation metadata goes to the run_meta.json sidecar only.

Exit codes: 0 success (or scattering_candidate / completed / all gates pass),
1 config error, 2 ground state not converged or a verify gate failed,
3 blow-up detected (or blowup_candidate), 4 dt underflow, 5 indeterminate.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import REGIME_BLOWUP, REGIME_SCATTERING, classify
from .config import ConfigError, load_config, merge_override, validate_config
from .evolution import (
    STATUS_BLOWUP,
    STATUS_COMPLETED,
    STATUS_UNDERFLOW,
    EvolutionConfig,
    evolve,
)
from .functionals import CSV_COLUMNS
from .grid import RadialField, RadialGrid, make_grid
from .ground_state import GroundStateResult, solve_ground_state
from .potentials import PotentialSpec, build_potential, check_hypotheses
from .verify import run_all_gates

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOCONV = 2
EXIT_BLOWUP = 3
EXIT_UNDERFLOW = 4
EXIT_INDETERMINATE = 5

OUTDIR_ENV = "HARTREE5D_OUTDIR"


def fmt_float(x) -> str:
    """Fixed 17-significant-digit formatting; round-trips float64 exactly."""
    return f"{float(x):.17g}"


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_sidecar(out_dir: Path, command: str, config_path: str) -> None:
    # Deliberately the only file carrying a timestamp.
    meta = {
        "command": command,
        "config": str(config_path),
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    write_json(out_dir / "run_meta.json", meta)


# -- builders -----------------------------------------------------------------


def _grid_from_cfg(cfg: dict) -> RadialGrid:
    try:
        return make_grid(cfg["grid"]["n"], cfg["grid"]["r_max"])
    except ValueError as err:
        raise ConfigError(f"grid: {err}") from err


def _potential_from_cfg(cfg: dict, grid: RadialGrid):
    p = cfg["potential"]
    try:
        if p["family"] == "zero":
            spec = PotentialSpec.zero()
        elif p["family"] == "gaussian":
            spec = PotentialSpec.gaussian(p["a"], p["b"])
        elif p["family"] == "lorentzian":
            spec = PotentialSpec.lorentzian(p["a"], p["p"])
        elif p["family"] == "table":
            spec = PotentialSpec.table(p["r"], p["v"])
        else:
            raise ValueError(f"unknown potential family {p['family']!r}")
        return build_potential(spec, grid)
    except ValueError as err:
        raise ConfigError(f"potential: {err}") from err


def _solve_groundstate(cfg: dict, grid: RadialGrid) -> GroundStateResult:
    g = cfg["groundstate"]
    try:
        return solve_ground_state(
            grid, tol=g["tol"], max_iter=g["max_iter"], init_amplitude=g["init_amp"]
        )
    except ValueError as err:
        raise ConfigError(f"groundstate: {err}") from err


def _load_groundstate_dir(path: str, grid: RadialGrid) -> GroundStateResult:
    """Rebuild a ground-state result from a prior groundstate run directory.

    Derived scalars are recomputed from the stored profile so downstream
    numbers cannot drift from a stale summary.
    """
    base = Path(path)
    meta_file = base / "groundstate.json"
    q_file = base / "Q.csv"
    if not meta_file.is_file() or not q_file.is_file():
        raise ConfigError(f"groundstate_dir {path!r} lacks groundstate.json / Q.csv")
    meta = json.loads(meta_file.read_text())
    if meta["grid"]["n"] != grid.n_points or meta["grid"]["r_max"] != grid.r_max:
        raise ConfigError(
            f"groundstate_dir grid ({meta['grid']}) does not match the config grid "
            f"(n={grid.n_points}, r_max={grid.r_max})"
        )
    data = np.loadtxt(q_file, delimiter=",", skiprows=1)
    r, q = data[:, 0], data[:, 1]
    if r.shape != grid.nodes.shape or np.max(np.abs(r - grid.nodes)) > 1e-9 * grid.h:
        raise ConfigError("Q.csv radii do not match the config grid nodes")

    from .grid import grad_norm_sq
    from .newton import interaction_p

    field = RadialField(grid, q)
    mass_q = grid.integrate(q**2)
    grad_sq_q = grad_norm_sq(field)
    p_q = interaction_p(field)
    return GroundStateResult(
        q=field,
        iterations=meta["iterations"],
        residual=meta["residual"],
        pohozaev_grad_ratio=grad_sq_q / mass_q,
        pohozaev_p_ratio=p_q / mass_q,
        c_gn=p_q / (np.sqrt(mass_q) * grad_sq_q**1.5),
        converged=meta["converged"],
        init_amplitude=meta["init_amplitude"],
        mass_q=mass_q,
        grad_sq_q=grad_sq_q,
        p_q=p_q,
    )


def _get_groundstate(cfg: dict, grid: RadialGrid) -> GroundStateResult:
    gs_dir = cfg["evolve"]["groundstate_dir"]
    if gs_dir is not None:
        return _load_groundstate_dir(gs_dir, grid)
    return _solve_groundstate(cfg, grid)


def _u0_from_cfg(cfg: dict, grid: RadialGrid, gs: GroundStateResult) -> RadialField:
    u0 = cfg["evolve"]["u0"]
    if u0["kind"] == "scaled_Q":
        return RadialField(grid, u0["c"] * gs.q.values)
    if u0["kind"] == "gaussian":
        if not u0["width"] > 0.0:
            raise ConfigError("evolve.u0.width must be positive")
        return RadialField(
            grid, u0["amp"] * np.exp(-grid.nodes**2 / (2.0 * u0["width"] ** 2))
        )
    raise ConfigError(f"evolve.u0.kind must be 'scaled_Q' or 'gaussian', got {u0['kind']!r}")


def _evolution_config(cfg: dict) -> EvolutionConfig:
    e = cfg["evolve"]
    try:
        return EvolutionConfig(
            dt=e["dt"],
            t_end=e["t_end"],
            output_every=e["output_every"],
            blowup_grad_factor=e["caps"]["blowup_grad_factor"],
            blowup_sup_cap=e["caps"]["blowup_sup_cap"],
            phase_cap=e["caps"]["phase_cap"],
            local_mass_radius=e["local_mass_radius"],
            morawetz_radius=e["morawetz_radius"],
        )
    except ValueError as err:
        raise ConfigError(f"evolve: {err}") from err


# -- subcommands --------------------------------------------------------------


def cmd_groundstate(cfg: dict, out_dir: Path) -> int:
    grid = _grid_from_cfg(cfg)
    try:
        gs = _solve_groundstate(cfg, grid)
    except RuntimeError as err:
        print(f"groundstate: {err}", file=sys.stderr)
        return EXIT_NOCONV
    write_csv(out_dir / "Q.csv", ("r", "Q"), zip(grid.nodes, gs.q.values.real))
    write_json(out_dir / "groundstate.json", gs.summary_dict())
    return EXIT_OK if gs.converged else EXIT_NOCONV


def cmd_evolve(cfg: dict, out_dir: Path) -> int:
    grid = _grid_from_cfg(cfg)
    V = _potential_from_cfg(cfg, grid)
    gs = _get_groundstate(cfg, grid)
    if not gs.converged:
        print("evolve: ground state did not converge", file=sys.stderr)
        return EXIT_NOCONV
    u0 = _u0_from_cfg(cfg, grid, gs)
    outcome = evolve(u0, V, _evolution_config(cfg), gs)

    rows = (
        tuple(getattr(row, col) for col in CSV_COLUMNS) for row in outcome.series
    )
    write_csv(out_dir / "series.csv", CSV_COLUMNS, rows)
    write_json(out_dir / "outcome.json", outcome.summary_dict())
    return {
        STATUS_COMPLETED: EXIT_OK,
        STATUS_BLOWUP: EXIT_BLOWUP,
        STATUS_UNDERFLOW: EXIT_UNDERFLOW,
    }[outcome.status]


def cmd_classify(cfg: dict, out_dir: Path) -> int:
    grid = _grid_from_cfg(cfg)
    V = _potential_from_cfg(cfg, grid)
    gs = _get_groundstate(cfg, grid)
    if not gs.converged:
        print("classify: ground state did not converge", file=sys.stderr)
        return EXIT_NOCONV
    u0 = _u0_from_cfg(cfg, grid, gs)
    report = classify(u0, V, gs)
    write_json(out_dir / "classification.json", report.to_dict())
    if report.regime == REGIME_SCATTERING:
        return EXIT_OK
    if report.regime == REGIME_BLOWUP:
        return EXIT_BLOWUP
    return EXIT_INDETERMINATE


def cmd_check_potential(cfg: dict, out_dir: Path) -> int:
    grid = _grid_from_cfg(cfg)
    V = _potential_from_cfg(cfg, grid)
    write_json(out_dir / "hypotheses.json", check_hypotheses(V).to_dict())
    return EXIT_OK


def cmd_verify(cfg: dict, out_dir: Path) -> int:
    grid = _grid_from_cfg(cfg)
    vcfg = cfg["verify"]
    for r in vcfg["probe_radii"]:
        if not 0.0 < r <= grid.r_max:
            raise ConfigError(f"verify.probe_radii: {r} outside (0, r_max]")
    gs = _solve_groundstate(cfg, grid)
    if not gs.converged:
        print("verify: ground state did not converge", file=sys.stderr)
        return EXIT_NOCONV
    gates = run_all_gates(grid, gs, vcfg)
    all_passed = all(g["passed"] for g in gates)
    write_json(out_dir / "verify.json", {"gates": gates, "all_passed": all_passed})
    for g in gates:
        print(f"{'PASS' if g['passed'] else 'FAIL'}  {g['name']}")
    return EXIT_OK if all_passed else EXIT_NOCONV


COMMANDS = {
    "groundstate": cmd_groundstate,
    "evolve": cmd_evolve,
    "classify": cmd_classify,
    "check-potential": cmd_check_potential,
    "verify": cmd_verify,
}


# -- driver -------------------------------------------------------------------


def _run_single(command: str, cfg: dict, out_dir: Path, config_path: str) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    code = COMMANDS[command](cfg, out_dir)
    write_sidecar(out_dir, command, config_path)
    return code


def _run_sweep(command: str, cfg: dict, out_root: Path, config_path: str) -> int:
    sweep = cfg.pop("sweep")
    base = {k: v for k, v in cfg.items()}
    # Validate every merged override before running anything.
    merged = []
    for i, override in enumerate(sweep["runs"]):
        if "sweep" in override:
            raise ConfigError(f"sweep.runs[{i}]: nested sweep is not allowed")
        merged.append(validate_config(merge_override(base, override)))

    def one(i_cfg):
        i, run_cfg = i_cfg
        sub = out_root / f"sweep_{i:03d}"
        return {"dir": sub.name, "exit_code": _run_single(command, run_cfg, sub, config_path)}

    if sweep["parallel"] > 1:
        with concurrent.futures.ThreadPoolExecutor(sweep["parallel"]) as pool:
            results = list(pool.map(one, enumerate(merged)))
    else:
        results = [one(item) for item in enumerate(merged)]

    out_root.mkdir(parents=True, exist_ok=True)
    write_json(out_root / "sweep_summary.json", {"command": command, "runs": results})
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hartree5d",
        description="Radial laboratory for the focusing quartic Hartree flow on R^5.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to the JSON run configuration")
    args = parser.parse_args(argv)

    out_root = Path(os.environ.get(OUTDIR_ENV, "."))
    try:
        cfg = load_config(args.config)
        if "sweep" in cfg:
            return _run_sweep(args.command, cfg, out_root, args.config)
        return _run_single(args.command, cfg, out_root, args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
