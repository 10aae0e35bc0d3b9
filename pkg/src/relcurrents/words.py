"""Signed-letter alphabets, free and cyclic reduction, occurrence counting.

Letters are stored as nonzero ints: letter i of the alphabet is ``i + 1`` and
its formal inverse is ``-(i + 1)``.  Words are plain tuples of such ints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import PreconditionError


class WordError(PreconditionError):
    pass


class AlphabetMismatch(WordError):
    pass


def letter_key(x: int) -> int:
    # a < A < b < B < ...
    return 2 * (abs(x) - 1) + (x < 0)


@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]
    involutive: bool = True
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise WordError(f"duplicate letter names in {names}")
        for n in names:
            # "~" marks inverses, so it is only a plain character without them
            if not n or any(c.isspace() for c in n) or (self.involutive and n.startswith("~")):
                raise WordError(f"bad letter name {n!r}")
        index = {n: i + 1 for i, n in enumerate(names)}
        if self.involutive:
            for n in names:
                if self.compact and n.upper() in index and n.upper() != n:
                    raise WordError(f"letter {n.upper()!r} clashes with the inverse of {n!r}")
        object.__setattr__(self, "_index", index)

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def compact(self) -> bool:
        # single characters; for free groups also lowercase so that
        # uppercase can mean inverse
        if not all(len(n) == 1 for n in self.names):
            return False
        if self.involutive:
            return all(n.islower() for n in self.names)
        return True

    def letters(self, signed: bool | None = None) -> list[int]:
        """All letters in canonical order (a, A, b, B, ... when signed)."""
        if signed is None:
            signed = self.involutive
        out = []
        for i in range(1, self.rank + 1):
            out.append(i)
            if signed:
                out.append(-i)
        return out

    def name(self, x: int) -> str:
        n = self.names[abs(x) - 1]
        if x > 0:
            return n
        if self.compact:
            return n.upper()
        return "~" + n

    def token(self, tok: str) -> int:
        if tok in self._index:
            return self._index[tok]
        if self.involutive:
            if tok.startswith("~") and tok[1:] in self._index:
                return -self._index[tok[1:]]
            if self.compact and tok.lower() in self._index:
                return -self._index[tok.lower()]
        raise AlphabetMismatch(f"unknown letter {tok!r}")

    def parse(self, text: str) -> tuple[int, ...]:
        text = text.strip()
        if text in ("", "1", "()"):
            return ()
        if any(c.isspace() for c in text) or not self.compact:
            toks = text.split()
            # a single multi-char token over a compact alphabet, e.g. "abAB"
            if self.compact and len(toks) == 1:
                toks = list(toks[0])
        else:
            toks = list(text)
        return tuple(self.token(t) for t in toks)

    def format(self, w) -> str:
        if self.compact:
            return "".join(self.name(x) for x in w)
        return " ".join(self.name(x) for x in w)

    def check(self, w) -> None:
        for x in w:
            if not isinstance(x, int) or x == 0 or abs(x) > self.rank:
                raise AlphabetMismatch(f"letter {x!r} not in alphabet {self.names}")
            if x < 0 and not self.involutive:
                raise AlphabetMismatch(f"inverse letter {x!r} in non-involutive alphabet")


def reduce(w, alphabet: Alphabet | None = None) -> tuple[int, ...]:
    if alphabet is not None:
        alphabet.check(w)
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def invert(w, alphabet: Alphabet | None = None) -> tuple[int, ...]:
    if alphabet is not None and not alphabet.involutive:
        raise WordError("inverse requested in a non-involutive alphabet")
    return tuple(-x for x in reversed(w))


def least_rotation(w) -> int:
    """Start index of the lexicographically least rotation (Booth)."""
    s = [letter_key(x) for x in w]
    n = len(s)
    if n == 0:
        return 0
    s = s + s
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n


@dataclass(frozen=True)
class CyclicWord:
    """Cyclically reduced word, stored at its least rotation."""

    letters: tuple[int, ...]

    def __post_init__(self):
        w = tuple(self.letters)
        if not w:
            raise WordError("empty cyclic word")
        if not is_reduced(w) or (len(w) > 1 and w[0] == -w[-1]):
            raise WordError("cyclic word is not cyclically reduced")
        k = least_rotation(w)
        object.__setattr__(self, "letters", w[k:] + w[:k])

    @classmethod
    def from_word(cls, w) -> "CyclicWord":
        return cyclic_reduce(w)[0]

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "CyclicWord":
        return CyclicWord(invert(self.letters))

    def is_power(self) -> bool:
        n = len(self.letters)
        return any(n % d == 0 and self.letters == self.letters[d:] + self.letters[:d]
                   for d in range(1, n))


def cyclic_reduce(w) -> tuple[CyclicWord, tuple[int, ...]]:
    """Return (core, conjugator) with w = conjugator . core . conjugator^-1."""
    w = reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    core = w[i:j + 1]
    if not core:
        raise WordError("word is trivial in the free group")
    # the conjugator must match the rotation actually stored
    k = least_rotation(core)
    c = CyclicWord(core[k:] + core[:k])
    conj = reduce(w[:i] + core[:k])
    return c, conj


def count_occurrences(pattern, text) -> int:
    m = len(pattern)
    if m == 0:
        raise WordError("empty pattern")
    pattern = tuple(pattern)
    text = tuple(text)
    if m > len(text):
        return 0
    first = pattern[0]
    n = 0
    for i in range(len(text) - m + 1):
        if text[i] == first and text[i:i + m] == pattern:
            n += 1
    return n


def _periodic_window(letters, m):
    reps = -(-(m - 1) // len(letters)) if m > 1 else 0
    return tuple(letters) + tuple(letters) * reps


def count_cyclic(pattern, alpha: CyclicWord, with_inverse: bool = True) -> int:
    """Occurrences of pattern in one period of the bi-infinite word of alpha."""
    m = len(pattern)
    if m == 0:
        raise WordError("empty pattern")
    letters = alpha.letters
    n = len(letters)
    text = _periodic_window(letters, m)[:n + m - 1]
    c = count_occurrences(pattern, text)
    if with_inverse:
        c += count_occurrences(invert(pattern), text)
    return c


def cyclic_factor_counts(alpha: CyclicWord, m: int) -> dict:
    """Directed counts of every length-m factor of alpha (one period)."""
    letters = alpha.letters
    n = len(letters)
    text = _periodic_window(letters, m)
    out: dict = {}
    for i in range(n):
        f = text[i:i + m]
        out[f] = out.get(f, 0) + 1
    return out


def reduced_words(alphabet: Alphabet, length: int):
    """Iterate all reduced words of the given length in canonical order."""
    if length == 0:
        yield ()
        return
    letters = alphabet.letters()

    def rec(prefix):
        if len(prefix) == length:
            yield prefix
            return
        for x in letters:
            if prefix and x == -prefix[-1]:
                continue
            yield from rec(prefix + (x,))

    yield from rec(())


def all_words(alphabet: Alphabet, length: int):
    """All (not necessarily reduced) words of a non-involutive alphabet."""
    return itertools.product(alphabet.letters(signed=False), repeat=length)


def canonical(w) -> tuple[int, ...]:
    """Representative of {w, w^-1}, used as a key in flip-invariant tables."""
    v = invert(w)
    return min(tuple(w), v, key=lambda u: [letter_key(x) for x in u])


def word_key(w):
    return (len(w), [letter_key(x) for x in w])


@dataclass(frozen=True)
class FreeFactorSystem:
    alphabet: Alphabet
    factors: tuple[frozenset, ...]

    def __post_init__(self):
        fs = tuple(frozenset(abs(x) for x in f) for f in self.factors)
        seen: set = set()
        for f in fs:
            if not f:
                raise WordError("empty factor")
            if seen & f:
                raise WordError("factors are not disjoint")
            for x in f:
                if x < 1 or x > self.alphabet.rank:
                    raise AlphabetMismatch(f"factor letter {x} not in alphabet")
            seen |= f
        object.__setattr__(self, "factors", fs)

    @classmethod
    def from_names(cls, alphabet: Alphabet, factors) -> "FreeFactorSystem":
        return cls(alphabet, tuple(frozenset(alphabet.token(n) for n in f) for f in factors))

    @property
    def cofactor(self) -> tuple[int, ...]:
        used = set().union(*self.factors) if self.factors else set()
        return tuple(i for i in range(1, self.alphabet.rank + 1) if i not in used)

    @property
    def zeta(self) -> int:
        return len(self.factors) + len(self.cofactor)

    def factor_of(self, x: int):
        for i, f in enumerate(self.factors):
            if abs(x) in f:
                return i
        return None

    def in_A(self, w) -> bool:
        """True when every letter of w lies in one common factor."""
        if not w:
            return True
        i = self.factor_of(w[0])
        return i is not None and all(abs(x) in self.factors[i] for x in w)

    def b_a_set(self) -> list[tuple[int, ...]]:
        out = [(x,) for x in self.cofactor]
        for x in self.alphabet.letters():
            for y in self.alphabet.letters():
                fx, fy = self.factor_of(x), self.factor_of(y)
                if fx is not None and fy is not None and fx != fy:
                    out.append((x, y))
        return out

    def is_relative_class(self, alpha: CyclicWord) -> bool:
        return not self.in_A(alpha.letters)
