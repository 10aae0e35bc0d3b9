import pytest
from hypothesis import given, strategies as st

from relcurrents.words import (Alphabet, AlphabetMismatch, CyclicWord, FreeFactorSystem,
                               WordError, count_cyclic, count_occurrences, cyclic_reduce,
                               invert, reduce, reduced_words)

import oracles as o

F2 = Alphabet(("a", "b"))
F3 = Alphabet(("a", "b", "c"))
P = F3.parse


def fmt(w):
    return F3.format(w)


@pytest.mark.parametrize("w,out", [("aA", ""), ("abBA", ""), ("baCca", "baa")])
def test_reduce_examples(w, out):
    assert fmt(reduce(P(w))) == out


def test_reduce_foreign_letter():
    with pytest.raises(AlphabetMismatch):
        reduce((1, 7), F3)


def test_cyclic_reduce_examples():
    core, conj = cyclic_reduce(P("abA"))
    assert fmt(core.letters) == "b" and fmt(conj) == "a"
    core, conj = cyclic_reduce(P("ab"))
    assert fmt(core.letters) == "ab" and conj == ()
    # B.abab: stored at its least rotation aab, conjugated by Bab
    core, conj = cyclic_reduce(P("Babab"))
    assert fmt(core.letters) == "aab"
    assert reduce(conj + core.letters + invert(conj)) == reduce(P("Babab"))


def test_cyclic_reduce_trivial():
    with pytest.raises(WordError):
        cyclic_reduce(P("abBA"))


@pytest.mark.parametrize("w,out", [("ab", "BA"), ("", ""), ("abAB", "baBA")])
def test_invert_examples(w, out):
    assert fmt(invert(P(w))) == out


def test_invert_needs_involution():
    S = Alphabet(("a", "b"), involutive=False)
    with pytest.raises(WordError):
        invert((1, 2), S)


def test_count_occurrences_examples():
    assert count_occurrences(P("aa"), P("aaa")) == 2
    assert count_occurrences(P("ba"), P("baca")) == 1
    assert count_occurrences(P("abc"), P("ab")) == 0
    with pytest.raises(WordError):
        count_occurrences((), P("ab"))


def test_count_cyclic_examples():
    alpha = CyclicWord(F2.parse("abaBab"))
    got = [count_cyclic(F2.parse(w), alpha) for w in ("b", "ba", "abab", "Bab")]
    assert got == [3, 2, 1, 1]
    # a single letter class: a once, and A never occurs in a^infinity
    assert count_cyclic(F2.parse("a"), CyclicWord(F2.parse("a"))) == 1


def test_cyclic_word_rotation_and_power():
    assert CyclicWord(P("ba")) == CyclicWord(P("ab"))
    assert CyclicWord(P("abab")).is_power()
    assert not CyclicWord(P("aab")).is_power()
    with pytest.raises(WordError):
        CyclicWord(P("abA"))


def test_alphabet_compact_and_tokens():
    assert F3.format(F3.parse("aBc")) == "aBc"
    G = Alphabet(("e1", "e2"))
    assert G.parse("e1 ~e2") == (1, -2)
    assert G.format((1, -2)) == "e1 ~e2"
    with pytest.raises(WordError):
        Alphabet(("a", "a"))


def test_free_factor_system():
    A4 = Alphabet(tuple("abcd"))
    F = FreeFactorSystem.from_names(A4, [["a", "b"]])
    assert F.cofactor == (3, 4) and F.zeta == 3
    assert F.in_A(A4.parse("abAB")) and not F.in_A(A4.parse("ac"))
    assert sorted(A4.format(w) for w in F.b_a_set()) == ["c", "d"]
    G = FreeFactorSystem.from_names(F3, [["a"], ["b"]])
    assert len(G.b_a_set()) == 1 + 8
    with pytest.raises(WordError):
        FreeFactorSystem.from_names(F3, [["a"], ["a", "b"]])


def test_reduced_words_count():
    # 4 * 3^(n-1) reduced words of length n in F2
    assert [sum(1 for _ in reduced_words(F2, n)) for n in range(1, 5)] == [4, 12, 36, 108]


# ---------------------------------------------------------------- properties

letters3 = st.sampled_from([1, -1, 2, -2, 3, -3])
words = st.lists(letters3, max_size=200).map(tuple)


@given(words)
def test_reduce_idempotent_and_shorter(w):
    r = reduce(w)
    assert reduce(r) == r
    assert len(r) <= len(w)
    assert o.free_reduce(F3.format(w)) == F3.format(r)


def _cyclic(w):
    r = reduce(w)
    if not r:
        return None
    return cyclic_reduce(r)[0]


@given(words, st.lists(letters3, min_size=1, max_size=4).map(tuple))
def test_count_cyclic_flip_symmetry(w, pat):
    alpha = _cyclic(w)
    pat = reduce(pat)
    if alpha is None or not pat:
        return
    assert count_cyclic(pat, alpha) == count_cyclic(invert(pat), alpha)
    assert count_cyclic(pat, alpha) == o.cyclic_count(F3.format(pat), F3.format(alpha.letters))


@given(words, st.integers(0, 50), st.lists(letters3, min_size=1, max_size=3).map(tuple))
def test_count_cyclic_rotation_invariant(w, k, pat):
    alpha = _cyclic(w)
    pat = reduce(pat)
    if alpha is None or not pat:
        return
    L = alpha.letters
    k %= len(L)
    rot = L[k:] + L[:k]
    assert count_cyclic(pat, alpha) == count_cyclic(pat, CyclicWord(rot))


@given(words, letters3)
def test_count_cyclic_extension_sum(w, x):
    alpha = _cyclic(w)
    if alpha is None:
        return
    total = sum(count_cyclic((x, e), alpha) for e in F3.letters() if e != -x)
    assert total == count_cyclic((x,), alpha)
