"""Command-line entry point: critical | simulate | sweep | density | study.

Every command reads a run config, writes plot-ready tables into the output
directory and prints a short report. Exit codes: 0 success, 2 usage error,
3 config error, 4 integration diverged, 5 no solution.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import analysis
from .config import ConfigError, RunConfig, load_config, save_config
from .field import density_evolution, lattice_grid
from .integrate import (ConservationViolation, IntegrationDiverged, Trajectory, settling_time,
                        simulate)
from .model import uniform_state

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_DIVERGED = 4
EXIT_NO_SOLUTION = 5

SETTLE_BAND = 0.02

TRAJECTORY_HEADER = ["t", "n0", "nL", "nR", "intensity_I", "filter_s", "scattered"]
SWEEP_HEADER = ["F", "omega", "n0", "nL", "nR", "stability"]
SWEEP_APPROX_HEADER = ["n0_approx", "nL_approx", "nR_approx"]
STUDY_HEADER = ["value", "gain", "tau", "gain_d", "F", "settling_time", "final_nL", "target_nL"]

log = logging.getLogger("bragg_feedback")


class NoSolution(RuntimeError):
    pass


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _short(x) -> str:
    return "never" if x is None else f"{x:.6g}"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) for v in row])


def _write_json(path: Path, doc) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    out = Path(override or cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands -----------------------------------------------------------------

def cmd_critical(cfg: RunConfig, out: Path, fmt: str = "csv") -> dict:
    cp = analysis.critical_feedback_parameter(cfg.system)
    doc = {"f_c": cp.f_c, "omega_c": list(cp.omega_c), "n0_c": list(cp.n0_c),
           "nL_c": list(cp.nL_c)}
    if fmt == "json":
        _write_json(out / "critical.json", doc)
    else:
        rows = [[cp.f_c, w, n0, nL] for w, n0, nL in zip(cp.omega_c, cp.n0_c, cp.nL_c)]
        _write_csv(out / "critical.csv", ["f_c", "omega_c", "n0_c", "nL_c"], rows)
    print(f"F_c = {cp.f_c:.6f}")
    for w, n0, nL in zip(cp.omega_c, cp.n0_c, cp.nL_c):
        print(f"  omega_c = {w:+.6f}: n0_c = {n0:.4f}, nL_c = {nL:.4f}")
    return doc


def _trajectory_rows(traj: Trajectory):
    return zip(traj.times, traj.n0, traj.nL, traj.nR, traj.intensity_I, traj.filter_s,
               traj.scattered)


def summarize(traj: Trajectory, cfg: RunConfig, band: float = SETTLE_BAND) -> dict:
    """Final occupations, nearest stable branch and settling time of a run."""
    fb = cfg.feedback
    final = traj.final_state.occupations
    branch = None
    if fb.f > 0 and analysis.steady_state_branches(cfg.system, fb.f):
        branch = analysis.nearest_stable_branch(cfg.system, fb.f, final, tau=fb.tau)
    settle = settling_time(traj, branch.nL, band) if branch else None
    return {
        "F": fb.f,
        "gain": fb.gain, "tau": fb.tau, "gain_d": fb.gain_d, "s_initial": fb.s_initial,
        "mode": fb.mode.value,
        "t_end": float(traj.times[-1]),
        "final": {"n0": final[0], "nL": final[1], "nR": final[2],
                  "scattered": float(traj.scattered[-1])},
        "matched_branch": None if branch is None else {
            "omega": branch.omega, "n0": branch.n0, "nL": branch.nL, "nR": branch.nR,
            "relative_error_nL": abs(final[1] - branch.nL) / branch.nL,
        },
        "settling_band": band,
        "settling_time": settle,
        "max_number_error": traj.max_number_error(),
    }


def _run(cfg: RunConfig, out: Path) -> Trajectory:
    """simulate with partial output flushed on failure."""
    try:
        return simulate(uniform_state(cfg.system), cfg.system, cfg.feedback, cfg.integrator)
    except (IntegrationDiverged, ConservationViolation) as exc:
        _write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, _trajectory_rows(exc.trajectory))
        raise


def cmd_simulate(cfg: RunConfig, out: Path) -> dict:
    traj = _run(cfg, out)
    _write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, _trajectory_rows(traj))
    summary = summarize(traj, cfg)
    _write_json(out / "summary.json", summary)
    save_config(cfg, out / "run.ini")
    f = summary["final"]
    print(f"F = {summary['F']:.6g}: final n0 = {f['n0']:.3f}, nL = {f['nL']:.3f}, "
          f"nR = {f['nR']:.3f}; settling time = {_short(summary['settling_time'])}")
    return summary


def cmd_sweep(cfg: RunConfig, out: Path, with_approx: bool = False, jobs: int = 1) -> list:
    sw = cfg.sweep
    tau = cfg.feedback.tau if sw.classify else None
    rows = analysis.bifurcation_sweep(cfg.system, sw.f_min, sw.f_max, sw.n_points,
                                      tau=tau, jobs=jobs)
    cp = analysis.critical_feedback_parameter(cfg.system)
    table = []
    for row in rows:
        br = row.branch
        line = [row.f, br.omega, br.n0, br.nL, br.nR, br.stability.value]
        if with_approx:
            a = analysis.approximation_for(br, cfg.system)
            line += [a.n0, a.nL, a.nR]
        table.append(line)
    header = SWEEP_HEADER + (SWEEP_APPROX_HEADER if with_approx else [])
    _write_csv(out / "sweep.csv", header, table)
    print(f"F_c = {cp.f_c:.6f}; {len(table)} branch rows over "
          f"F in [{sw.f_min:g}, {sw.f_max:g}]")
    if not table:
        raise NoSolution(f"no stationary branches for F <= {sw.f_max:g} (F_c = {cp.f_c:.6g})")
    return table


def cmd_density(cfg: RunConfig, out: Path) -> list:
    traj = _run(cfg, out)
    x = lattice_grid(cfg.density.n_periods, cfg.density.points_per_period)
    frames = density_evolution(traj, x)
    _write_csv(out / "density.csv", ["t"] + [_num(v) for v in x],
               ([fr.t, *fr.rho] for fr in frames))
    _write_json(out / "density_axes.json", {
        "x": x.tolist(), "t": traj.times.tolist(), "x_unit": "lattice wavelength",
        "length_L": float(x[-1] - x[0]), "rows": "time", "columns": "x",
        "integral": [fr.integral() for fr in frames],
        "modulation_depth": [fr.modulation_depth() for fr in frames],
    })
    print(f"{len(frames)} frames; final modulation depth {frames[-1].modulation_depth():.4f}")
    return frames


def study_configs(cfg: RunConfig, variable: str, values, gains=()) -> list[RunConfig]:
    """One config per value; for tau without explicit gains K = F / tau keeps F fixed."""
    fb = cfg.feedback
    if gains and len(gains) != len(values):
        raise ConfigError("study: gains must match values in length")
    out = []
    for i, v in enumerate(values):
        if variable == "tau":
            gain = gains[i] if gains else fb.f / v
            new = fb.with_(tau=float(v), gain=float(gain))
        else:
            new = fb.with_(gain_d=float(v))
        out.append(dataclasses.replace(cfg, feedback=new))
    return out


def cmd_study(cfg: RunConfig, out: Path, variable: str, values, gains=(), jobs: int = 1) -> list:
    runs = study_configs(cfg, variable, values, gains)

    def one(run_cfg):
        traj = simulate(uniform_state(run_cfg.system), run_cfg.system, run_cfg.feedback,
                        run_cfg.integrator)
        return summarize(traj, run_cfg)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(one, runs))
    else:
        summaries = [one(r) for r in runs]
    rows = []
    for v, s in zip(values, summaries):
        target = s["matched_branch"]["nL"] if s["matched_branch"] else None
        rows.append([v, s["gain"], s["tau"], s["gain_d"], s["F"], s["settling_time"],
                     s["final"]["nL"], target])
        print(f"{variable} = {v:g}: F = {s['F']:.6g}, "
              f"settling time = {_short(s['settling_time'])}")
    _write_csv(out / "study.csv", STUDY_HEADER, rows)
    return rows


# -- argument handling --------------------------------------------------------

def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bragg-feedback", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run config (INI)")
    common.add_argument("--out", help="output directory (overrides [output] directory)")
    common.add_argument("--format", choices=("csv", "json"), help="report format")
    common.add_argument("--seed", type=int, help="RNG seed for shot-noise mode (u64)")
    common.add_argument("--jobs", type=int, default=1, help="parallel runs")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("critical", parents=[common], help="critical feedback parameter")
    sub.add_parser("simulate", parents=[common], help="integrate one trajectory")
    sp = sub.add_parser("sweep", parents=[common], help="bifurcation table over F")
    sp.add_argument("--f-min", type=float)
    sp.add_argument("--f-max", type=float)
    sp.add_argument("--n-points", type=int)
    sp.add_argument("--with-approx", action="store_true", help="add square-root columns")
    sp.add_argument("--no-stability", action="store_true", help="skip classification")
    sub.add_parser("density", parents=[common], help="density frames of one run")
    st = sub.add_parser("study", parents=[common], help="compare settling across values")
    st.add_argument("--variable", choices=("tau", "kd"))
    st.add_argument("--values", type=_floats)
    st.add_argument("--gains", type=_floats, help="gains paired with tau values")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, feedback=cfg.feedback.with_(rng_seed=args.seed))
        if args.command == "sweep":
            sw = cfg.sweep
            sw = dataclasses.replace(
                sw,
                f_min=sw.f_min if args.f_min is None else args.f_min,
                f_max=sw.f_max if args.f_max is None else args.f_max,
                n_points=sw.n_points if args.n_points is None else args.n_points,
                classify=sw.classify and not args.no_stability)
            if not (0 < sw.f_min < sw.f_max) or sw.n_points < 2:
                parser.error(f"invalid sweep range [{sw.f_min}, {sw.f_max}] "
                             f"with {sw.n_points} points")
            cfg = dataclasses.replace(cfg, sweep=sw)
        out = _out_dir(cfg, args.out)
        fmt = args.format or cfg.output.format

        if args.command == "critical":
            cmd_critical(cfg, out, fmt)
        elif args.command == "simulate":
            cmd_simulate(cfg, out)
        elif args.command == "sweep":
            cmd_sweep(cfg, out, with_approx=args.with_approx, jobs=args.jobs)
        elif args.command == "density":
            cmd_density(cfg, out)
        elif args.command == "study":
            variable = args.variable or cfg.study.variable
            values = args.values if args.values is not None else cfg.study.values
            gains = args.gains if args.gains is not None else cfg.study.gains
            if not values:
                parser.error("study needs --values (or [study] values)")
            cmd_study(cfg, out, variable, values, gains, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationDiverged, ConservationViolation) as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except NoSolution as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
