"""Where do the fig4a/b/c and fig5_pd runs end up, as a function of the filter seed s(0)?

Prints, per seed, the final n_L of each configuration, the stationary
branch it sits on and the settling time. The package default seed sits in
the window where all four runs reach the lower stable branch.

    python scripts/seed_scan.py [--seeds 0.001,0.1,0.3,0.5,0.7] [--t-end 50]
"""

import argparse
from pathlib import Path

from bragg_feedback import IntegratorConfig, settling_time, simulate, uniform_state
from bragg_feedback.analysis import nearest_stable_branch, steady_state_branches
from bragg_feedback.config import load_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
NAMES = ("fig4a", "fig4b", "fig4c", "fig5_pd")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0.001,0.05,0.2,0.4,0.42,0.46,0.5,0.54,0.6,1.0")
    ap.add_argument("--t-end", type=float, default=50.0)
    ap.add_argument("--dt", type=float, default=1e-4)
    args = ap.parse_args()
    seeds = [float(s) for s in args.seeds.split(",")]

    print("s0       " + " | ".join(f"{n:^30}" for n in NAMES))
    for s0 in seeds:
        cells = []
        for name in NAMES:
            cfg = load_config(CONFIGS / f"{name}.ini")
            fb = cfg.feedback.with_(s_initial=s0)
            traj = simulate(uniform_state(cfg.system), cfg.system, fb,
                            IntegratorConfig(dt=args.dt, t_end=args.t_end, record_stride=100))
            nL = traj.nL[-1]
            branches = steady_state_branches(cfg.system, fb.f)
            on = min(branches, key=lambda b: abs(b.nL - nL))
            hit = abs(on.nL - nL) / on.nL < 0.01
            stable = nearest_stable_branch(cfg.system, fb.f, traj.final_state.occupations,
                                           tau=fb.tau)
            t = settling_time(traj, stable.nL) if hit and stable.nL == on.nL else None
            tag = f"{on.nL:.0f}" if hit else "none"
            cells.append(f"nL={nL:8.1f} br={tag:>5} t={'-' if t is None else f'{t:.2f}':>6}")
        print(f"{s0:<8g} " + " | ".join(f"{c:^30}" for c in cells))


if __name__ == "__main__":
    main()
