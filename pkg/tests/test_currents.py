import numpy as np
import pytest
from hypothesis import given, strategies as st

from relcurrents.currents import (ApproximationConfig, NotRelativeClass, RelativeCurrent,
                                  SignedMeasuredCurrent, approximate_by_rationals, distance,
                                  eta_AC, extension_system, k_extension, nonnegative_fix,
                                  normalize, rational_current, relative_words)
from relcurrents.errors import PreconditionError
from relcurrents.words import (Alphabet, CyclicWord, FreeFactorSystem, canonical, cyclic_reduce,
                               invert, reduce, reduced_words)

import oracles as o

F2 = Alphabet(("a", "b"))
F4 = Alphabet(tuple("abcd"))
A2 = FreeFactorSystem.from_names(F2, [["a"]])
A4 = FreeFactorSystem.from_names(F4, [["a", "b"]])


def test_rational_current_examples():
    eta = rational_current("abaBab", A2, 4)
    assert [eta[w] for w in ("b", "ba", "abab", "Bab")] == [3, 2, 1, 1]
    # a single letter class meets itself once
    eta = rational_current("b", A2, 1)
    assert eta["b"] == 1 and eta["B"] == 1
    eta = rational_current("cd", A4, 2)
    assert eta["cd"] == 1 and eta["dc"] == 1 and eta["c"] == 1 and eta["d"] == 1
    assert eta["ca"] == 0


def test_rational_current_against_oracle():
    for alpha in ("abaBab", "aabbb", "abAB", "bbaBa"):
        eta = rational_current(alpha, A2, 4)
        core = o.cyc_reduce(alpha)
        for w in relative_words(A2, 4):
            assert eta[w] == o.cyclic_count(F2.format(w), core)


def test_rational_current_rejects_factor_class():
    with pytest.raises(NotRelativeClass):
        rational_current("aaa", A2, 2)
    with pytest.raises(NotRelativeClass):
        rational_current("abAB", A4, 2)
    with pytest.raises(KeyError):
        rational_current("ab", A2, 2)["aa"]


def test_normalize_and_distance():
    eta = rational_current("cd", A4, 2)
    n = normalize(eta)
    assert max(n.get(u) for u in A4.b_a_set()) == 1
    assert distance(normalize(eta.scaled(2)), n) == 0
    assert distance(normalize(n), n) == 0
    with pytest.raises(PreconditionError):
        normalize(RelativeCurrent(A4, 2, {}))
    other = normalize(rational_current("cdd", A4, 2))
    assert distance(n, other) == pytest.approx(distance(other, n))
    # cd: c=d=1 ; cdd: c=1/2, d=1, cd=1/2, dd=1/2
    assert distance(n, other) == pytest.approx(0.5)
    with pytest.raises(PreconditionError):
        distance(n, rational_current("ab", A2, 2))


def test_csv_round_trip():
    eta = rational_current("abaBab", A2, 3)
    back, bad = RelativeCurrent.from_csv(eta.to_csv(), A2)
    assert back.table == eta.table and not bad
    broken = eta.to_csv().replace("\nb,3", "\nb,4")
    _, bad = RelativeCurrent.from_csv(broken, A2)
    assert bad


def test_k_extension_full_current_is_a_solution():
    alpha = CyclicWord(F2.parse("abaBab"))
    eta0 = rational_current(alpha, A2, 4)
    ext = k_extension(eta0, 4, seeds={"a": 2})
    assert ext.restrict_relative().table == eta0.table
    assert ext.max_residual() < 1e-10
    # the true counts on A-words satisfy the same rows
    for j in (2, 3, 4):
        full = {canonical(w): o.cyclic_count(F2.format(w), "abaBab") for w in reduced_words(F2, j - 1)}
        full.update({canonical(w): o.cyclic_count(F2.format(w), "abaBab") for w in reduced_words(F2, j)})
        sysj = extension_system(full, A2, eta0, 0, j)
        x = np.array([full[w] for w in sysj.cols], dtype=float)
        assert np.abs(sysj.matrix @ x - sysj.const).max() < 1e-10


def test_k_extension_seed_levels():
    eta0 = rational_current("abaBab", A2, 2)
    ext = k_extension(eta0, 1, seeds={"a": 5})
    assert ext["a"] == 5 and ext["b"] == 3
    ext = k_extension(eta0, 2, seeds={"a": 5})
    assert sum(ext[(1, e)] for e in F2.letters() if e != -1) == pytest.approx(5)
    # a -> aa, ab, aB: aa is the one unknown
    assert ext["aa"] == pytest.approx(5 - eta0["ab"] - eta0["aB"])
    with pytest.raises(PreconditionError):
        k_extension(eta0, 3)
    with pytest.raises(PreconditionError):
        k_extension(eta0, 2, seeds={"b": 1})


def test_nonnegative_fix_examples():
    # already non-negative
    eta0 = rational_current("abaBab", A2, 2)
    ext = k_extension(eta0, 2, seeds={"a": 3})
    fixed, C = nonnegative_fix(ext)
    assert C == {0: 0.0} and fixed.table == ext.table
    # min -3 on A-words, s = 1, k = 2: C = 3 and eta_AC(a) = 3
    bad = SignedMeasuredCurrent(A2, 2, {(1,): 0.0, (1, 1): -3.0, (2,): 3.0})
    fixed, C = nonnegative_fix(bad)
    assert C[0] == 3 and eta_AC(A2, 0, C[0], (1,)) == 3
    assert fixed["a"] == 3 and fixed["aa"] == 0
    # s = 2, k = 3, min -1: C = 9 and value 3 on length-2 A-words
    t = {w: 0.0 for m in (1, 2, 3) for w in reduced_words(F4, m)
         if all(abs(x) <= 2 for x in w) and canonical(w) == w}
    t[(1, 2, 1)] = -1.0
    fixed, C = nonnegative_fix(SignedMeasuredCurrent(A4, 3, t))
    assert C[0] == 9
    assert fixed["ab"] == 3 and fixed["a"] == 9 and fixed["aba"] == 0


def test_eta_AC_is_additive_on_factor():
    s = 2
    for w in reduced_words(F4, 2):
        if not A4.in_A(w):
            continue
        ext = [w + (e,) for e in (1, -1, 2, -2) if e != -w[-1]]
        assert sum(eta_AC(A4, 0, 9, u) for u in ext) == pytest.approx(eta_AC(A4, 0, 9, w))
    assert len(ext) == 2 * s - 1


def test_approximation_P_and_bound():
    cfg = ApproximationConfig(k=2, R=10 ** 4, rank=2)
    assert cfg.P == 324
    assert cfg.bound == pytest.approx(0.0324)


def test_approximation_recovers_rational_current():
    eta0 = rational_current("ab", A2, 2)
    res = approximate_by_rationals(eta0, ApproximationConfig(k=2, R=10 ** 4, rank=2))
    assert res.ok and res.error <= 324 / 10 ** 4
    assert res.relative_classes(A2)
    with pytest.raises(PreconditionError):
        approximate_by_rationals(eta0, ApproximationConfig(k=2, R=10, rank=2))


def test_approximation_mixture():
    eta0 = rational_current("ab", A2, 2) + rational_current("abb", A2, 2).scaled(0.5)
    res = approximate_by_rationals(eta0, ApproximationConfig(k=2, R=10 ** 4, rank=2))
    assert res.error <= res.bound
    # direct comparison of the tables
    rebuilt = {}
    for alpha, t in res.relative_classes(A2):
        for w in relative_words(A2, 2):
            rebuilt[w] = rebuilt.get(w, 0) + t * o.cyclic_count(F2.format(w), F2.format(alpha.letters)) / 10 ** 4
    worst = max(abs(eta0.get(w) - rebuilt.get(w, 0)) for w in relative_words(A2, 2))
    assert worst == pytest.approx(res.error)


def test_approximation_F4():
    eta0 = rational_current("cdcaD", A4, 2)
    cfg = ApproximationConfig(k=2, R=10 ** 9, rank=4)
    res = approximate_by_rationals(eta0, cfg)
    assert res.ok


# ---------------------------------------------------------------- properties

letters2 = st.sampled_from([1, -1, 2, -2])


def _relative(w):
    r = reduce(w)
    if not r:
        return None
    c = cyclic_reduce(r)[0]
    return c if A2.is_relative_class(c) else None


relative_classes = st.lists(letters2, min_size=1, max_size=12).map(tuple).map(_relative).filter(
    lambda c: c is not None)


@given(relative_classes)
def test_rational_current_flip_rotation_inverse(alpha):
    eta = rational_current(alpha, A2, 4)
    for w in eta.table:
        assert eta[w] == eta[invert(w)]
    L = alpha.letters
    for i in range(len(L)):
        assert rational_current(CyclicWord(L[i:] + L[:i]), A2, 4).table == eta.table
    assert rational_current(alpha.inverse(), A2, 4).table == eta.table
    assert eta.max_residual() == 0


@given(relative_classes, st.integers(0, 5))
def test_k_extension_restricts_exactly(alpha, seed):
    eta0 = rational_current(alpha, A2, 4)
    ext = k_extension(eta0, 4, seeds={"a": seed})
    assert ext.restrict_relative().table == {w: float(v) for w, v in eta0.table.items()}
    assert ext.max_residual() < 1e-9
    fixed, _ = nonnegative_fix(ext)
    assert min(fixed.table.values()) >= -1e-12
    assert fixed.max_residual() < 1e-9


@given(relative_classes, relative_classes)
def test_sum_is_additive(a1, a2):
    s = rational_current(a1, A2, 3) + rational_current(a2, A2, 3)
    assert s.max_residual() == 0
