"""Linearised spectrum about each stationary branch, next to the probe verdict.

Shows that the branches the perturbation probe calls stable carry one
undamped oscillation at |omega + 4| (plus the phase mode), and that the
unstable ones have a real positive eigenvalue.

    python scripts/stability_spectrum.py [--f 120] [--tau 0.02] [--kd 0]
"""

import argparse

import numpy as np

from bragg_feedback import REFERENCE_PARAMS, FeedbackConfig, classify_stability
from bragg_feedback.analysis import linear_spectrum, steady_state_branches


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f", type=float, default=120.0)
    ap.add_argument("--tau", type=float, default=0.02)
    ap.add_argument("--kd", type=float, default=0.0)
    args = ap.parse_args()
    p = REFERENCE_PARAMS
    fb = FeedbackConfig(gain=args.f / args.tau, tau=args.tau, gain_d=args.kd)
    np.set_printoptions(precision=4, suppress=True, linewidth=120)
    for b in steady_state_branches(p, args.f):
        ev = linear_spectrum(b, p, fb)
        ev = ev[np.argsort(-ev.real)]
        verdict = classify_stability(b, p, fb).value
        print(f"omega = {b.omega:+.5f}  nL = {b.nL:9.3f}  probe: {verdict:9s}  "
              f"max Re = {ev.real.max():+.3e}")
        print("   ", ev)


if __name__ == "__main__":
    main()
