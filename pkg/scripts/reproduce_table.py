"""Print the optimal design supports for a scenario as a table.

Usage: python scripts/reproduce_table.py [scenario.json]
"""
import argparse
from pathlib import Path

import numpy as np

from qmetro.runner import run
from qmetro.scenario import parse_scenario

DEFAULT = Path(__file__).resolve().parent.parent / "scenarios" / "reference.json"


def rows(design):
    return [(s.phi / np.pi, s.beta / np.pi, s.weight) for s in design.support]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("config", nargs="?", default=str(DEFAULT))
    args = p.parse_args(argv)

    report = run(parse_scenario(args.config))
    print(f"{'gamma':>6} {'mode':<11} | {'phi/pi':>6} {'beta/pi':>7} {'l_ac':>5} | {'phi/pi':>6} {'beta/pi':>7} {'l_wc':>5}")
    print("-" * 68)
    for c in report.cells:
        ac, wc = rows(c.ac), rows(c.wc)
        for i in range(max(len(ac), len(wc))):
            left = "{:6.2f} {:7.2f} {:5.2f}".format(*ac[i]) if i < len(ac) else " " * 20
            right = "{:6.2f} {:7.2f} {:5.2f}".format(*wc[i]) if i < len(wc) else ""
            head = f"{c.gamma:>6g} {c.mode:<11}" if i == 0 else " " * 18
            print(f"{head} | {left} | {right}")
        print(f"{'':18} | F_ac = {c.ac.objective:.4f}        | F_wc = {c.wc.objective:.4f}")


if __name__ == "__main__":
    main()
