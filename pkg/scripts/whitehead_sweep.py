"""Separability of every relative class of length <= n in F2 relative to <a>.

usage: python scripts/whitehead_sweep.py [n]
"""

import sys
from collections import Counter

from relcurrents.whitehead import decide_separable
from relcurrents.words import Alphabet, CyclicWord, FreeFactorSystem, reduced_words


def classes(F, A, n):
    seen = set()
    for m in range(1, n + 1):
        for w in reduced_words(F, m):
            if m > 1 and w[0] == -w[-1]:
                continue
            c = CyclicWord(w)
            key = min(c.letters, c.inverse().letters)
            if key not in seen:
                seen.add(key)
                if A.is_relative_class(c):
                    yield c


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 6
    F = Alphabet(("a", "b"))
    A = FreeFactorSystem.from_names(F, [["a"]])
    tally = Counter()
    for c in classes(F, A, n):
        v = decide_separable(c, A)
        tally[v.kind] += 1
        print(f"{F.format(c.letters):>{n}}  {v.kind}")
    print(dict(tally))


if __name__ == "__main__":
    main()
