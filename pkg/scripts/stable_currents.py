"""Normalized stable currents of the bundled train track maps on short paths.

usage: python scripts/stable_currents.py [max_len]
"""

import sys

from relcurrents.cli import load_system
from relcurrents.dynamics import stable_current

SYSTEMS = [("example1", "b"), ("example2", "c"), ("example3", "c"), ("inp_rose", "c"),
           ("full_rank", "e5")]


def main():
    m = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    for name, seed in SYSTEMS:
        tt = load_system(name + ".sys").train_track()
        r = stable_current(tt, seed, max_len=m)
        t = r.table.normalized()
        print(f"# {name}: lambda {tt.lam:.10g}, seed {seed}, Kirchhoff residual {r.kirchhoff_max():.1e}")
        for w, v in t.rows():
            if v:
                print(f"{w},{v:.10g}")


if __name__ == "__main__":
    main()
