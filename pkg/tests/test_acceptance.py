"""The twelve acceptance criteria, one test each.

Every test records a PASS/FAIL line; the lines are printed at the end of the
pytest run (see conftest.py) or directly when this file is run as a script.
"""

import math
import random
import time

import pytest

from relcurrents.cli import load_system
from relcurrents.currents import (ApproximationConfig, approximate_by_rationals,
                                  extension_system, k_extension, nonnegative_fix,
                                  rational_current, relative_words)
from relcurrents.dynamics import goodness, ns_experiment
from relcurrents.substitution import (Substitution, block_order, block_structure,
                                      check_kirchhoff, compare_spectra, crossing_window,
                                      frequencies, induce, kappa, transition_matrix)
from relcurrents.traintrack import to_substitution, width_cap_stability
from relcurrents.whitehead import cut_vertex, connectivity, decide_separable
from relcurrents.words import Alphabet, FreeFactorSystem

import oracles as o
from test_substitution import M2_CORRECTED, M2_PRINTED
from test_traintrack import ETT_PRINTED
from test_whitehead import f2_classes, random_multigraph

RESULTS = {}

SQ5 = math.sqrt(5)
F2 = Alphabet(("a", "b"))
F4 = Alphabet(tuple("abcd"))
A2 = FreeFactorSystem.from_names(F2, [["a"]])
A4 = FreeFactorSystem.from_names(F4, [["a", "b"]])


def record(n, ok, detail=""):
    RESULTS[n] = (bool(ok), detail)
    return ok


def summary_lines():
    out = []
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        out.append(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return out


def tt(name):
    return load_system(name + ".sys").train_track()


def sub(name):
    return load_system(name + ".sys").substitution()


# ---------------------------------------------------------------- 1, 2

def test_01_example1_frequencies():
    z = sub("example1_sub")
    t0 = time.perf_counter()
    tab = frequencies(z, "b", list(o.EXAMPLE1_FREQ))
    dt = time.perf_counter() - t0
    err = max(abs(tab[w] - v) for w, v in o.EXAMPLE1_FREQ.items())
    ok = err < 1e-9 and dt < 1.0
    record(1, ok, f"max error {err:.2e}, {dt:.3f} s")
    assert ok


def test_02_additivity():
    z = sub("example1_sub")
    tab = frequencies(z, "b", ["b", "ba", "c", "ca", "cb"])
    r1 = abs(tab["b"] - tab["ba"])
    r2 = abs(tab["c"] - tab["ca"] - tab["cb"])
    ok = r1 < 1e-9 and r2 < 1e-9
    record(2, ok, f"residuals {r1:.2e}, {r2:.2e}")
    assert ok


# ---------------------------------------------------------------- 3

@pytest.mark.xfail(strict=True, reason="the printed 8x8 matrix has two entries that break the "
                                       "column-sum identity; see the decisions ledger")
def test_03_induced_golden():
    ex1 = sub("example1_sub")
    ind = induce(ex1, 2, ex1.letter("b"))
    ba = ind.image(ex1.alphabet.parse("ba"))
    ok_ba = [ex1.fmt(u) for u in ba] == ["ba", "ac", "ca"]
    app = sub("appendix")
    M = transition_matrix(app, [app.letter(x) for x in "cdab"]).tolist()
    ok_m = M == [[1, 1, 0, 0], [1, 2, 0, 0], [1, 1, 2, 3], [0, 0, 3, 5]]
    M2 = induce(app, 2, app.letter("c")).matrix.tolist()
    ok_printed = M2 == M2_PRINTED
    # every column of M2 sums to the length of the image of its first letter
    sums = [sum(r[j] for r in M2) for j in range(8)]
    want = [len(app.image(app.letter(w[0]))) for w in ("ca", "da", "dc", "ad", "bd", "ab", "ba", "bb")]
    diff = [(i, j) for i in range(8) for j in range(8) if M2[i][j] != M2_PRINTED[i][j]]
    detail = (f"zeta_2(ba) {'ok' if ok_ba else 'wrong'}, 4x4 {'exact' if ok_m else 'wrong'}, "
              f"8x8 differs from print at {diff}; computed column sums "
              f"{'match' if sums == want else 'do not match'} image lengths, "
              f"printed ones {'match' if [sum(r[j] for r in M2_PRINTED) for j in range(8)] == want else 'do not'}")
    ok = ok_ba and ok_m and ok_printed
    record(3, ok, detail)
    # the parts that are attainable must hold regardless
    assert ok_ba and ok_m and M2 == M2_CORRECTED and sums == want
    assert ok_printed


# ---------------------------------------------------------------- 4

def _bundled_substitutions():
    out = []
    for name, seed in (("example1_sub", "b"), ("appendix", "c")):
        z = sub(name)
        out.append((name, z, z.letter(seed)))
    for name, seed in (("example1", "b"), ("example2", "c"), ("example3", "c"),
                       ("inp_rose", "c"), ("exceptional", "f"), ("full_rank", "e5")):
        S = to_substitution(tt(name), (), seed)
        out.append((name, S.substitution, S.seed))
    return out


def test_04_spectrum_containment():
    bad = []
    worst = 0.0
    for name, z, seed in _bundled_substitutions():
        letters = z.reachable(seed)
        M = transition_matrix(z, block_order(z, letters))
        rep = compare_spectra(M, induce(z, 2, seed).matrix, tol=1e-6)
        worst = max(worst, rep.max_extra_modulus)
        if not rep.ok:
            bad.append(name)
    ok = not bad
    record(4, ok, f"{len(_bundled_substitutions())} systems, largest unmatched |nu| {worst:.6f}"
           + (f", failing {bad}" if bad else ""))
    assert ok


# ---------------------------------------------------------------- 5

def random_block_substitution(rng):
    """Lower letters map into lower letters; top letters form a primitive block
    and the first two top letters start their own images."""
    names = "abcde"
    while True:
        n = rng.randint(2, 5)
        t = rng.randint(2, n)
        low, top = names[:n - t], names[n - t:n]
        rules = {}
        for x in low:
            rules[x] = "".join(rng.choice(low) for _ in range(rng.randint(1, 3)))
        for i, x in enumerate(top):
            body = "".join(rng.choice(names[:n]) for _ in range(rng.randint(1, 4)))
            rules[x] = (x + body) if i < 2 else (rng.choice(top) + body)
        z = Substitution.from_strings(rules, letters=tuple(names[:n]))
        bs = block_structure(z, z.reachable(z.letter(top[0])))
        tb = [b for b in bs.blocks if z.letter(top[0]) in b][0]
        i = bs.blocks.index(tb)
        if sorted(tb) == sorted(z.letter(x) for x in top) and bs.primitive[i]:
            return z, top[0], top[1]


def test_05_kirchhoff_suite():
    rng = random.Random(2024)
    worst_k, worst_spread = 0.0, 0.0
    for _ in range(50):
        z, a, b = random_block_substitution(rng)
        win = crossing_window(z, a, 3)
        tab = frequencies(z, a, win)
        worst_k = max(worst_k, check_kirchhoff(tab).max_residual)
        if z.letter(b) in z.reachable(z.letter(a)):
            worst_spread = max(worst_spread, kappa(z, a, b, crossing_window(z, a, 2)).spread)
    ok = worst_k < 1e-8 and worst_spread < 1e-6
    record(5, ok, f"50 systems, Kirchhoff {worst_k:.2e}, kappa spread {worst_spread:.2e}")
    assert ok


# ---------------------------------------------------------------- 6

def test_06_rational_current():
    eta = rational_current("abaBab", A2, 4)
    got = tuple(eta[w] for w in ("b", "ba", "abab", "Bab"))
    ok = got == (3, 2, 1, 1)
    record(6, ok, f"values {got}")
    assert ok


# ---------------------------------------------------------------- 7

def test_07_extension_suite():
    worst_cons = 0.0
    exact = True
    nonneg = True
    fix_exact = True
    cases = [("abaBab", A2, 4, {"a": 0}), ("aabAbb", A2, 4, {"a": 1}),
             ("cdcaD", A4, 3, {}), ("caDbbc", A4, 3, {"b": 2})]
    for alpha, F, k, seeds in cases:
        eta0 = rational_current(alpha, F, k)
        ext = k_extension(eta0, k, seeds=seeds)
        exact &= ext.restrict_relative().table == {w: float(v) for w, v in eta0.table.items()}
        for f in range(len(F.factors)):
            for j in range(2, k + 1):
                worst_cons = max(worst_cons, extension_system(ext.table, F, eta0, f, j).check())
        fixed, C = nonnegative_fix(ext)
        nonneg &= min(fixed.table.values()) >= 0
        s = len(F.factors[0])
        for w in ext.a_words():
            add = C[0] / (2 * s - 1) ** (len(w) - 1)
            fix_exact &= fixed.table[w] == ext.table[w] + add
    ok = exact and worst_cons < 1e-10 and nonneg and fix_exact
    record(7, ok, f"restriction {'exact' if exact else 'differs'}, consistency gap {worst_cons:.1e}, "
           f"non-negative {nonneg}, eta_AC exact {fix_exact}")
    assert ok


# ---------------------------------------------------------------- 8

def test_08_density_bound():
    P = ApproximationConfig(k=2, R=1, rank=2).P
    worst = 0.0
    ok = P == 324
    mixes = [(("ab", 1.0), ("abb", 0.5)), (("abAB", 1.0), ("b", 2.0)), (("aabAB", 1 / SQ5), ("abaBab", math.pi / 3))]
    for R in (10 ** 3, 10 ** 4):
        for (a1, c1), (a2, c2) in mixes:
            eta0 = rational_current(a1, A2, 2).scaled(c1) + rational_current(a2, A2, 2).scaled(c2)
            res = approximate_by_rationals(eta0, ApproximationConfig(k=2, R=R, rank=2))
            err = max(abs(eta0.get(w) - res.approx.get(w)) for w in relative_words(A2, 2))
            ok &= err <= P / R and bool(res.relative_classes(A2))
            worst = max(worst, err * R / P)
    record(8, ok, f"P = {P}, worst error / (P/R) = {worst:.3f}")
    assert ok


# ---------------------------------------------------------------- 9

def test_09_whitehead_suite():
    ex = (decide_separable("abAB", A2).kind, decide_separable("ab", A2).kind,
          decide_separable("cd", A4).kind)
    ok_ex = ex == ("NotSeparable", "Separable", "Separable")
    n = 0
    mism = []
    for c in f2_classes(6):
        n += 1
        want = o.separable_f2(F2.format(c.letters))
        if (decide_separable(c, A2).kind == "Separable") != want:
            mism.append(F2.format(c.letters))
    rng = random.Random(99)
    gbad = 0
    for _ in range(200):
        g = random_multigraph(rng, rng.randint(1, 12))
        es = [tuple(e) if len(e) == 2 else (next(iter(e)),) * 2 for e in g.edges]
        cuts = o.cut_vertices(g.vertices, es)
        v = cut_vertex(g)
        good = (v is None) if not cuts else v in cuts
        good &= len(connectivity(g)) == o.components(g.vertices, es)
        gbad += not good
    ok = ok_ex and not mism and gbad == 0
    record(9, ok, f"examples {ex}; {n} F2 classes, {len(mism)} disagreements; 200 graphs, {gbad} mismatches")
    assert ok


# ---------------------------------------------------------------- 10

def test_10_train_track_adapter():
    t = tt("inp_rose")
    A = t.graph.alphabet
    ca = A.parse("ca")
    S = to_substitution(t, ca, "c")
    ok_m = transition_matrix(S.substitution).tolist() == ETT_PRINTED
    d = S.word_frequencies([S.substitution.alphabet.parse(w) for w in ("ca", "cs")])
    gap = abs(S.frequency(ca) - sum(d.values()))
    e = tt("exceptional")
    g = e.graph.alphabet.parse("fcabABabABabABabAB")
    f1 = to_substitution(e, g, "f", C=1).frequency(g)
    f3 = to_substitution(e, g, "f", C=3).frequency(g)
    stable = width_cap_stability(e, g, "f", C=3, tol=1e-9)
    ok = ok_m and gap < 1e-9 and stable
    record(10, ok, f"6x6 {'exact' if ok_m else 'wrong'}, ca consistency {gap:.1e}, width cap |C=1 - C=3| {abs(f1 - f3):.1e}")
    assert ok


# ---------------------------------------------------------------- 11

def test_11_north_south():
    t0 = time.perf_counter()
    rep = ns_experiment(tt("example2"), tt("example2_inverse"), "cd", n_max=12)
    dt = time.perf_counter() - t0
    ds = rep.distances()
    first = next((i for i, x in enumerate(ds) if x < 1e-3), None)
    mono = all(b <= a for a, b in zip(ds[-5:], ds[-4:]))
    g = max(x for x in rep.goodness_trace() if x is not None)
    ok = first is not None and first <= 12 and mono and g >= 0.95 and dt < 30
    record(11, ok, f"below 1e-3 at n = {first}, last {ds[-1]:.2e}, monotone {mono}, "
           f"goodness {g:.3f}, {dt:.1f} s")
    assert ok


# ---------------------------------------------------------------- 12

def test_12_goodness_exact():
    t = tt("example2")
    legal = [goodness(t, w).goodness for w in ("cd", "cad", "caddcad")]
    bad = goodness(t, "cDcDcDcDcDa")
    ok = legal == [1, 1, 1] and bad.goodness == 0 and bad.i_r == 5
    record(12, ok, f"legal loops {legal}, illegal loop {bad.goodness} with {bad.i_r} illegal turns")
    assert ok


if __name__ == "__main__":
    import sys
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
