"""Command-line interface: ebb <command> --config <file> --out <dir>.

Commands: fluxes, sweep-e, sweep-l, equivalence, validate. Each run
writes CSV data files plus a JSON summary embedding the run manifest.
CSV bodies are byte-identical across runs of the same configuration; the
manifest timestamp is the only varying field, and it lives in the JSON.

Exit codes: 0 success, 1 numerical-invariant failure, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, scan
from .config import RunConfig, parse_config
from .errors import ConfigError, NumericalFailure
from .fluxes import integrate_fluxes, integration_window


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, str)):
        return str(x)
    return format(x, ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _manifest(command: str, run: RunConfig, args, max_residual: float) -> dict:
    seeds = {}
    pot = run.resolved["sample"]["potential"]
    if pot.get("type") == "anderson":
        seeds["anderson"] = pot["seed"]
    return {
        "tool_version": __version__,
        "command": command,
        "config": run.resolved,
        "seeds": seeds,
        "seed_override": args.seed_override,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "max_unitarity_residual": max_residual,
    }


def _chunked(seq, n):
    size = max(1, -(-len(seq) // n))
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _parallel_map(fn, chunks, threads):
    if threads <= 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _require_e_grid(run: RunConfig):
    if run.sweep.e_grid is None:
        raise ConfigError("sweep.e_grid: required for this command")
    window = integration_window(run.system)
    for E in run.sweep.e_grid:
        if not window.contains(E):
            raise ConfigError(
                f"sweep.e_grid: E={E} is outside the open-channel window"
            )
    return list(run.sweep.e_grid)


def cmd_fluxes(run: RunConfig, args) -> int:
    result = integrate_fluxes(run.system)
    summary = {
        "energy_flux_l": result.energy_flux_l,
        "charge_flux_l": result.charge_flux_l,
        "entropy_flux": result.entropy_flux,
        "quadrature_error_estimate": result.quadrature_error_estimate,
        "evaluations": result.evaluations,
        "no_open_channel": result.no_open_channel,
        "energy_flux_r": result.energy_flux_r,
        "charge_flux_r": result.charge_flux_r,
        "converged": result.converged,
        "manifest": _manifest("fluxes", run, args, result.max_unitarity_residual),
    }
    _dump_json(os.path.join(args.out, "fluxes.json"), summary)
    return 0


def cmd_sweep_e(run: RunConfig, args) -> int:
    grid = _require_e_grid(run)
    system = run.system

    def worker(chunk):
        return scan.energy_sweep(
            run.potential_spec, system.sample.length, system.lead_l,
            system.lead_r, system.thermo, chunk,
        )

    points = [p for part in _parallel_map(worker, _chunked(grid, args.threads), args.threads) for p in part]
    _write_csv(
        os.path.join(args.out, "sweep_e.csv"),
        "E,transmission,phi_l,j_l,sigma,unitarity_residual",
        [(p.E, p.transmission, p.phi_l, p.j_l, p.sigma, p.unitarity_residual) for p in points],
    )
    max_residual = max((p.unitarity_residual for p in points if p.error is None), default=0.0)
    failures = [p.E for p in points if p.error is not None]
    _dump_json(
        os.path.join(args.out, "sweep_e.json"),
        {
            "points": len(points),
            "failed_points": failures,
            "manifest": _manifest("sweep-e", run, args, max_residual),
        },
    )
    return 0


def cmd_sweep_l(run: RunConfig, args) -> int:
    if run.sweep.energy is None:
        raise ConfigError("sweep.energy: required for sweep-l")
    system = run.system
    points = scan.l_sweep(
        run.potential_spec, run.sweep.energy, system.lead_l, system.lead_r,
        system.thermo, run.sweep.l_checkpoints,
    )
    cls = scan.classify_transport(points, run.sweep.thresholds)
    _write_csv(
        os.path.join(args.out, "sweep_l.csv"),
        "L,sigma_density,transmission,log_transfer_norm,resonance_flag",
        [(p.L, p.sigma_density, p.transmission, p.log_transfer_norm, p.resonance_flag) for p in points],
    )
    _dump_json(
        os.path.join(args.out, "sweep_l.json"),
        {
            "classification": cls.label,
            "norm_slope": cls.norm_slope,
            "norm_r2": cls.norm_r2,
            "sigma_slope": cls.sigma_slope,
            "sigma_r2": cls.sigma_r2,
            "l_max": cls.l_max,
            "sigma_underflowed": cls.underflowed,
            "manifest": _manifest("sweep-l", run, args, 0.0),
        },
    )
    return 0


def cmd_equivalence(run: RunConfig, args) -> int:
    grid = _require_e_grid(run)
    system = run.system

    def worker(chunk):
        return scan.equivalence_rows(
            run.potential_spec, chunk, run.sweep.l_checkpoints, system.lead_l,
            system.lead_r, system.thermo, run.sweep.thresholds,
        )

    rows = [r for part in _parallel_map(worker, _chunked(grid, args.threads), args.threads) for r in part]
    report = scan.summarize_equivalence(rows, int(max(run.sweep.l_checkpoints)))
    _write_csv(
        os.path.join(args.out, "equivalence.csv"),
        "E,label,norm_slope,sigma_slope,sigma_at_l_max,contradiction",
        [(r.E, r.label, r.norm_slope, r.sigma_slope, r.sigma_at_l_max, r.contradiction) for r in rows],
    )
    _dump_json(
        os.path.join(args.out, "equivalence.json"),
        {
            "counts": report.counts,
            "contradictions": report.contradictions,
            "mean_sigma_persistent": report.mean_sigma_persistent,
            "mean_sigma_vanishing": report.mean_sigma_vanishing,
            "l_max": report.l_max,
            "manifest": _manifest("equivalence", run, args, 0.0),
        },
    )
    return 0


def cmd_validate(run: RunConfig, args) -> int:
    from .validate import run_all

    results = run_all()
    all_ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        all_ok = all_ok and res.passed
    _dump_json(
        os.path.join(args.out, "validate.json"),
        {
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
            ],
            "all_passed": all_ok,
            "manifest": _manifest("validate", run, args, 0.0),
        },
    )
    return 0 if all_ok else 1


def _dump_json(path, payload):
    def _default(o):
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(f"not serializable: {o!r}")

    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_default, allow_nan=True)
        fh.write("\n")


_COMMANDS = {
    "fluxes": cmd_fluxes,
    "sweep-e": cmd_sweep_e,
    "sweep-l": cmd_sweep_l,
    "equivalence": cmd_equivalence,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ebb",
        description="Steady-state transport through a 1D tight-binding sample "
        "between two thermal reservoirs.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="run configuration JSON")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--seed-override", type=int, default=None,
        help="replace the disorder seed from the config",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = parse_config(args.config, seed_override=args.seed_override)
        os.makedirs(args.out, exist_ok=True)
        return _COMMANDS[args.command](run, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
