"""Forward and backward iteration of cd under the rank-4 example, printed as a table.

usage: python scripts/ns_example2.py [n_max] [csv_out]
"""

import sys
import time

from relcurrents.cli import load_system
from relcurrents.dynamics import backward_growth_probe, ns_experiment


def main():
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 12
    fwd = load_system("example2.sys").train_track()
    bwd = load_system("example2_inverse.sys").train_track()
    t0 = time.perf_counter()
    rep = ns_experiment(fwd, bwd, "cd", n_max=n_max)
    dt = time.perf_counter() - t0
    print(f"lambda = {fwd.lam:.12g}, separable: {rep.separable}, verdict: {rep.verdict} ({dt:.1f} s)")
    print(f"{'n':>3} {'direction':>17} {'distance':>12} {'goodness':>9} {'length':>10}")
    for s in rep.steps:
        d = "" if s.distance is None else f"{s.distance:.4e}"
        g = "" if s.goodness is None else f"{s.goodness:.4f}"
        print(f"{s.n:>3} {s.direction:>17} {d:>12} {g:>9} {s.length:>10}")
    for note in rep.notes:
        print("note:", note)
    # illegal turns of the forward map along backward iterates
    probe = backward_growth_probe(bwd, "cDcDcDcDcDa", 4, fwd)
    print("backward growth of i_r:", [i for _, i, _, _ in probe.trace])
    if len(sys.argv) > 2:
        with open(sys.argv[2], "w") as fh:
            fh.write(rep.to_csv())


if __name__ == "__main__":
    main()
