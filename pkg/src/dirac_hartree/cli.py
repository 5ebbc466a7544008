"""Command line: ``run``, ``verify`` and ``convergence``.

Exit codes: 0 success, 1 a verifier check failed, 2 configuration error,
3 numerical abort (partial outputs are kept).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import verify as verify_mod
from .config import (
    ConfigError,
    RunConfig,
    dump_json,
    load_run_config,
    load_verify_config,
)
from .diagnostics import envelope_protocol, max_relative_drift, record
from .dirac import propagator_step, sobolev_norm
from .evolution import NumericalAbort, PicardDivergence, Trajectory, evolve
from .initial_data import eigen_projected_plane_wave, gaussian, modulated_gaussian, scale_to_norm
from .snapshot import SnapshotError, read_snapshot, write_snapshot
from .spectral import SpinorField

log = logging.getLogger("dirac_hartree")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


# -- initial data ------------------------------------------------------------------


def _spinor(values) -> tuple:
    """Spinor entries as numbers or ``[re, im]`` pairs."""
    if len(values) != 2:
        raise ConfigError("spinor needs two entries")
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            out.append(complex(v[0], v[1]))
        else:
            out.append(complex(v))
    return tuple(out)


def build_initial_data(cfg: RunConfig, base_dir: Path = Path(".")) -> SpinorField:
    grid = cfg.grid.grid
    ic = cfg.initial_data
    p = dict(ic.parameters)
    peak = ic.amplitude if ic.amplitude_mode == "peak" else 1.0
    try:
        if ic.kind == "gaussian":
            psi = gaussian(grid, p.get("width", 2.0), peak, _spinor(p.get("spinor", [1.0, 0.0])), p.get("center"))
        elif ic.kind == "modulated_gaussian":
            psi = modulated_gaussian(
                grid, p["xi0"], p.get("width", 2.0), peak, _spinor(p.get("spinor", [1.0, 0.0])), p.get("center")
            )
        elif ic.kind == "eigen_projected_plane_wave":
            # peak mode: pointwise modulus equals the amplitude
            psi = eigen_projected_plane_wave(grid, p["xi0"], cfg.model.m, p.get("sign", 1), peak * grid.box_length)
        else:
            path = Path(p["path"])
            if not path.is_absolute():
                path = base_dir / path
            psi, _, _ = read_snapshot(path)
            if psi.grid != grid:
                raise ConfigError(f"snapshot grid n={psi.grid.n}, L={psi.grid.box_length} differs from the config grid")
            psi = psi * peak
    except (KeyError, TypeError, ValueError, OSError, SnapshotError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"initial_data: {exc}") from exc
    if ic.amplitude_mode == "l2":
        psi = scale_to_norm(psi, ic.amplitude, 0.0)
    elif ic.amplitude_mode == "h_half":
        psi = scale_to_norm(psi, ic.amplitude, 0.5)
    return psi


# -- outputs -------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def csv_columns(s_list: Sequence[float]) -> list[str]:
    return ["t", "mass", "energy", "kinetic", "h_half"] + [f"h_s_{s!r}" for s in s_list] + ["potential_term"]


def write_csv(path: Path, traj: Trajectory, s_list: Sequence[float]) -> None:
    lines = [",".join(csv_columns(s_list))]
    for r in traj.records:
        row = [r.t, r.mass, r.energy, r.kinetic, r.h_half] + [r.h_s[s] for s in s_list] + [r.potential_term]
        lines.append(",".join(_fmt(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _growth_summary(times, values, model: str) -> dict:
    series = np.column_stack([times, values])
    try:
        verdict = envelope_protocol(series, model)
    except ValueError as exc:
        return {"model": model, "status": "skipped", "reason": str(exc)}
    fit = verdict.fit
    return {
        "model": model,
        "status": "fitted",
        "params": list(fit.params),
        "residual": fit.residual,
        "fit_range": list(fit.t_range),
        "passed": verdict.passed,
        "worst_margin": float(np.max(verdict.values / verdict.bounds)),
    }


def build_summary(cfg: RunConfig, traj: Trajectory, psi0: SpinorField, status: str, message: str = "") -> dict:
    recs = traj.records
    t = np.array(traj.times)
    summary = {
        "config": cfg.to_dict(),
        "status": status,
        "samples": len(recs),
        "t_last": float(t[-1]) if len(t) else None,
        "conservation": {
            "mass_max_rel_drift": max_relative_drift([r.mass for r in recs]),
            "energy_max_rel_drift": max_relative_drift([r.energy for r in recs]),
        },
        "growth": {
            # the kinetic form is indefinite; its modulus is what the single-exponential bound controls
            "kinetic_abs": _growth_summary(t, np.abs([r.kinetic for r in recs]), "single_exponential"),
            "h_half": _growth_summary(t, [r.h_half for r in recs], "double_exponential"),
        },
    }
    if message:
        summary["message"] = message
    if cfg.model.params.linear and traj.final_state is not None:
        exact = propagator_step(psi0, float(t[-1]), cfg.model.params.dirac)
        err = sobolev_norm(traj.final_state - exact, 0.0) / sobolev_norm(exact, 0.0)
        summary["linear_exact_rel_error"] = err
    return summary


def _write_snapshots(out: Path, cfg: RunConfig, traj: Trajectory) -> list[str]:
    m, b = cfg.model.m, cfg.model.b
    names = []
    if cfg.diagnostics.snapshots == "all" and traj.states is not None:
        for i, state in enumerate(traj.states):
            name = f"state_{i:05d}.dhrt"
            write_snapshot(out / name, state, m, b)
            names.append(name)
    elif cfg.diagnostics.snapshots == "final" and traj.final_state is not None:
        write_snapshot(out / "state_final.dhrt", traj.final_state, m, b)
        names.append("state_final.dhrt")
    return names


# -- commands ----------------------------------------------------------------------


def cmd_run(config_path, out_dir: Optional[str] = None) -> int:
    cfg = load_run_config(config_path)
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    psi0 = build_initial_data(cfg, Path(config_path).parent)
    ev = cfg.evolution_config()
    s_list = list(cfg.diagnostics.s)
    model = cfg.model.params

    def hook(psi, t):
        return record(psi, t, model, s_list)

    status, message, code = "completed", "", EXIT_OK
    try:
        traj = evolve(psi0, ev, hook, keep_states=cfg.diagnostics.snapshots == "all")
    except (NumericalAbort, PicardDivergence) as exc:
        traj = exc.trajectory
        status, message, code = "aborted", str(exc), EXIT_NUMERICAL
        log.error("numerical abort: %s", exc)
    write_csv(out / "diagnostics.csv", traj, s_list)
    summary = build_summary(cfg, traj, psi0, status, message)
    summary["snapshots"] = _write_snapshots(out, cfg, traj)
    dump_json(summary, out / "summary.json")
    return code


def cmd_verify(config_path, out_dir: Optional[str] = None, freeze: bool = False) -> int:
    suite = load_verify_config(config_path)
    out = Path(out_dir or suite.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = verify_mod.run_suite(suite)
    if freeze:
        target = Path(verify_mod.__file__).with_name(verify_mod.BASELINE_FILE)
        verify_mod.freeze_baselines(report, target)
        report = verify_mod.run_suite(suite)
    (out / "verify_report.json").write_text(verify_mod.report_json(report))
    for r in report["checks"]:
        print(f"{r['check']:<18} max_ratio={r['max_ratio']:.6g} baseline={r['baseline']} {'PASS' if r['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


MIN_RUNGS = 4
EXACT_LEVEL = 1e-12


def convergence_study(cfg: RunConfig) -> dict:
    """Final-time errors of a Strang ladder against a finer reference run."""
    ladder = cfg.evolution.ladder
    if ladder is None or len(ladder) < MIN_RUNGS:
        raise ConfigError(f"convergence needs a dt ladder of at least {MIN_RUNGS} rungs")
    if cfg.evolution.method != "strang":
        raise ConfigError("convergence studies use the strang method")
    ladder = sorted((float(h) for h in ladder), reverse=True)
    ref_dt = float(cfg.evolution.reference_dt or ladder[-1] / 8)
    if ref_dt >= ladder[-1]:
        raise ConfigError("reference_dt must be finer than every rung")
    for h in ladder + [ref_dt]:
        cfg.evolution_config(h)  # every rung must tile t_final
    psi0 = build_initial_data(cfg)

    def final(dt):
        ev = dataclasses.replace(cfg.evolution_config(dt), sample_every=10**9)
        return evolve(psi0, ev, lambda psi, t: None).final_state

    ref = final(ref_dt)
    scale = sobolev_norm(ref, 0.0)
    rows = [{"dt": h, "error": sobolev_norm(final(h) - ref, 0.0) / scale} for h in ladder]
    errs = np.array([r["error"] for r in rows])
    result = {"reference_dt": ref_dt, "rows": rows}
    if cfg.model.params.linear:
        exact = propagator_step(psi0, cfg.evolution.t_final, cfg.model.params.dirac)
        result["reference_exact_rel_error"] = sobolev_norm(ref - exact, 0.0) / sobolev_norm(exact, 0.0)
    if np.all(errs <= EXACT_LEVEL):
        result["order"] = "exact"
    else:
        slope = np.polyfit(np.log([r["dt"] for r in rows]), np.log(errs), 1)[0]
        result["order"] = float(slope)
    return result


def cmd_convergence(config_path, out_dir: Optional[str] = None) -> int:
    cfg = load_run_config(config_path)
    result = convergence_study(cfg)
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_json({"config": cfg.to_dict(), **result}, out / "convergence.json")
    print(f"{'dt':>24} {'error':>24}")
    for r in result["rows"]:
        print(f"{_fmt(r['dt']):>24} {_fmt(r['error']):>24}")
    order = result["order"]
    print(f"order: {order if isinstance(order, str) else f'{order:.4f}'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirac-hartree", description="Dirac-Hartree evolution and verifier runs")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evolve one configuration")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    ver = sub.add_parser("verify", help="run verifier sweeps")
    ver.add_argument("--config", required=True)
    ver.add_argument("--out")
    ver.add_argument("--freeze", action="store_true", help="record this run's maxima as the regression baselines")
    conv = sub.add_parser("convergence", help="dt ladder against a fine reference")
    conv.add_argument("--config", required=True)
    conv.add_argument("--out")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out)
        if args.command == "verify":
            return cmd_verify(args.config, args.out, args.freeze)
        return cmd_convergence(args.config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
