"""Write every plot-ready table (sweep, density, transients, studies) from the shipped configs.

    python scripts/reproduce_figures.py [--out out] [--jobs 4]

Each figure lands in its own subdirectory of ``--out``. Plotting is left to
any external tool.
"""

import argparse
import sys
from pathlib import Path

from bragg_feedback.cli import main as cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

RUNS = [
    ("fig2", ["sweep", "--with-approx"], "fig2_sweep"),
    ("critical", ["critical", "--format", "json"], "fig2_sweep"),
    ("fig3", ["density"], "fig3_density"),
    ("fig4a", ["simulate"], "fig4a"),
    ("fig4b", ["simulate"], "fig4b"),
    ("fig4c", ["simulate"], "fig4c"),
    ("fig5", ["simulate"], "fig5_pd"),
    ("subcritical", ["simulate"], "subcritical"),
    ("tau_study", ["study"], "tau_study"),
    ("kd_study", ["study", "--variable", "kd", "--values", "0,-1000"], "fig4a"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out")
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args()
    status = 0
    for sub, argv, cfg in RUNS:
        print(f"== {sub}")
        code = cli([*argv[:1], "--config", str(CONFIGS / f"{cfg}.ini"),
                    "--out", str(Path(args.out) / sub), "--jobs", str(args.jobs), *argv[1:]])
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
