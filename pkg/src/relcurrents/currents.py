"""Finite-depth coordinate tables for relative currents.

A relative current is stored as its values on reduced words w with |w| <= k
that are not contained in a single factor of the free factor system.  Only
one word of each pair {w, w^-1} is stored.
"""

from __future__ import annotations

import io
import csv
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .words import (CyclicWord, FreeFactorSystem, canonical, count_cyclic,
                    cyclic_reduce, invert, letter_key, reduce, reduced_words,
                    word_key)


class NotRelativeClass(PreconditionError):
    pass


def fmt_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _key(alphabet, w):
    if isinstance(w, str):
        w = alphabet.parse(w)
    return canonical(tuple(w))


@dataclass(frozen=True)
class RelativeCurrent:
    ffs: FreeFactorSystem
    k: int
    table: dict = field(compare=False)

    @property
    def alphabet(self):
        return self.ffs.alphabet

    def __getitem__(self, w):
        key = _key(self.alphabet, w)
        if not key or len(key) > self.k:
            raise KeyError(f"word length outside 1..{self.k}")
        if self.ffs.in_A(key):
            raise KeyError(f"{self.alphabet.format(key)} lies in the free factor system")
        return self.table.get(key, 0)

    def get(self, w, default=0):
        try:
            return self[w]
        except KeyError:
            return default

    def words(self, length=None):
        ws = sorted(self.table, key=word_key)
        return [w for w in ws if length is None or len(w) == length]

    def scaled(self, c) -> "RelativeCurrent":
        return RelativeCurrent(self.ffs, self.k, {w: c * v for w, v in self.table.items()})

    def restrict(self, k: int) -> "RelativeCurrent":
        return RelativeCurrent(self.ffs, k, {w: v for w, v in self.table.items() if len(w) <= k})

    def __add__(self, other):
        _same(self, other)
        keys = set(self.table) | set(other.table)
        return RelativeCurrent(self.ffs, self.k, {w: self.table.get(w, 0) + other.table.get(w, 0) for w in keys})

    def additivity_residuals(self) -> dict:
        """w -> largest of the forward/backward extension residuals, for |w| < k."""
        letters = self.alphabet.letters()
        out = {}
        for w in self.table:
            if len(w) >= self.k:
                continue
            fwd = sum(self.get(w + (e,)) for e in letters if e != -w[-1])
            bwd = sum(self.get((e,) + w) for e in letters if e != -w[0])
            v = self.table[w]
            out[w] = max(abs(v - fwd), abs(v - bwd))
        return out

    def max_residual(self) -> float:
        return max(self.additivity_residuals().values(), default=0.0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("word,value\n")
        for w in self.words():
            buf.write(f"{self.alphabet.format(w)},{fmt_value(self.table[w])}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, ffs: FreeFactorSystem, tol: float = 1e-8):
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0][:1] == ["word"]:
            rows = rows[1:]
        table = {}
        for i, r in enumerate(rows, start=2):
            if not r:
                continue
            w = ffs.alphabet.parse(r[0])
            if reduce(w) != w or not w:
                raise PreconditionError(f"line {i}: {r[0]!r} is not a nonempty reduced word")
            v = float(r[1])
            if v < 0:
                raise PreconditionError(f"line {i}: negative value")
            table[canonical(w)] = v
        k = max((len(w) for w in table), default=0)
        cur = cls(ffs, k, table)
        bad = {w: r for w, r in cur.additivity_residuals().items() if r > tol}
        return cur, bad


def _same(a, b):
    if a.ffs != b.ffs:
        raise PreconditionError("currents use different free factor systems")


def relative_words(ffs: FreeFactorSystem, k: int):
    """Canonical reduced words of length 1..k outside the factor system."""
    out = []
    for m in range(1, k + 1):
        for w in reduced_words(ffs.alphabet, m):
            if canonical(w) == w and not ffs.in_A(w):
                out.append(w)
    return out


def rational_current(alpha, ffs: FreeFactorSystem, k: int) -> RelativeCurrent:
    """eta_alpha(w) = occurrences of w in the cyclic words alpha and alpha^-1."""
    if isinstance(alpha, str):
        alpha = ffs.alphabet.parse(alpha)
    if not isinstance(alpha, CyclicWord):
        alpha = cyclic_reduce(alpha)[0]
    if not ffs.is_relative_class(alpha):
        raise NotRelativeClass(f"{ffs.alphabet.format(alpha.letters)} is conjugate into a factor")
    table = {}
    for w in relative_words(ffs, k):
        c = count_cyclic(w, alpha, with_inverse=True)
        if c:
            table[w] = c
    return RelativeCurrent(ffs, k, table)


def normalize(eta: RelativeCurrent) -> RelativeCurrent:
    """Scale so that the largest value on the set B_A is 1."""
    ba = eta.ffs.b_a_set()
    if any(len(u) > eta.k for u in ba):
        raise PreconditionError("normalization needs depth >= 2")
    m = max((eta.get(u) for u in ba), default=0)
    if m <= 0:
        raise PreconditionError("current vanishes on B_A; cannot normalize")
    return eta.scaled(1.0 / m)


def distance(e1: RelativeCurrent, e2: RelativeCurrent, window=None) -> float:
    _same(e1, e2)
    if window is None:
        window = set(e1.table) | set(e2.table)
    return max((abs(e1.get(w) - e2.get(w)) for w in window), default=0.0)


# ---------------------------------------------------------------- signed extensions

@dataclass(frozen=True)
class SignedMeasuredCurrent:
    ffs: FreeFactorSystem
    k: int
    table: dict = field(compare=False)     # canonical word -> float, all reduced words

    @property
    def alphabet(self):
        return self.ffs.alphabet

    def __getitem__(self, w):
        return self.table.get(_key(self.alphabet, w), 0.0)

    def restrict_relative(self) -> RelativeCurrent:
        return RelativeCurrent(self.ffs, self.k,
                               {w: v for w, v in self.table.items() if not self.ffs.in_A(w) and v})

    def a_words(self):
        return sorted((w for w in self.table if self.ffs.in_A(w)), key=word_key)

    def min_on_A(self) -> float:
        return min((self.table[w] for w in self.a_words()), default=0.0)

    def max_residual(self) -> float:
        letters = self.alphabet.letters()
        worst = 0.0
        for w, v in self.table.items():
            if len(w) >= self.k:
                continue
            fwd = sum(self[w + (e,)] for e in letters if e != -w[-1])
            bwd = sum(self[(e,) + w] for e in letters if e != -w[0])
            worst = max(worst, abs(v - fwd), abs(v - bwd))
        return worst


@dataclass
class ExtensionSystem:
    level: int
    factor: int
    rows: list            # words v in S_{level-1}
    cols: list            # canonical words of S_level
    matrix: np.ndarray
    const: np.ndarray

    def consistency_relations(self):
        """Pairs (xu rows, x u^-1 rows) for u in S_{level-2}."""
        pos = {v: i for i, v in enumerate(self.rows)}
        out = []
        if self.level < 3:
            return out
        us = {v[1:] for v in self.rows}
        for u in sorted(us, key=word_key):
            left = [pos[v] for v in self.rows if v[1:] == u]
            right = [pos[v] for v in self.rows if v[1:] == invert(u)]
            out.append((u, left, right))
        return out

    def check(self, tol: float = 1e-10) -> float:
        worst = 0.0
        for u, left, right in self.consistency_relations():
            dr = self.matrix[left].sum(axis=0) - self.matrix[right].sum(axis=0)
            if np.any(dr):
                raise AssertionError(f"row relation fails for {u}")
            worst = max(worst, abs(self.const[left].sum() - self.const[right].sum()))
        return worst


def _factor_words(ffs, f, m):
    letters = set(ffs.factors[f])
    return [w for w in reduced_words(ffs.alphabet, m) if all(abs(x) in letters for x in w)]


def extension_system(table, ffs, eta0, f, j) -> ExtensionSystem:
    letters = set(ffs.factors[f])
    A = [x for x in ffs.alphabet.letters() if abs(x) in letters]
    rows = _factor_words(ffs, f, j - 1)
    cols = [w for w in _factor_words(ffs, f, j) if canonical(w) == w]
    cpos = {w: i for i, w in enumerate(cols)}
    M = np.zeros((len(rows), len(cols)))
    c = np.zeros(len(rows))
    for i, v in enumerate(rows):
        c[i] = table[canonical(v)]
        for e in ffs.alphabet.letters():
            if e == -v[-1]:
                continue
            w = v + (e,)
            if e in A:
                M[i, cpos[canonical(w)]] += 1
            else:
                c[i] -= eta0.get(w)
    return ExtensionSystem(j, f, rows, cols, M, c)


def k_extension(eta0: RelativeCurrent, k: int, seeds: dict | None = None,
                tol: float = 1e-10) -> SignedMeasuredCurrent:
    """Extend eta0 to factor words of length <= k by additivity.

    Letters of the factors take the seed values (default 0); each further
    level solves the underdetermined extension system in least norm.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if eta0.k < k:
        raise PreconditionError(f"current has depth {eta0.k} < {k}")
    ffs = eta0.ffs
    seeds = dict(seeds or {})
    table = {w: float(v) for w, v in eta0.restrict(k).table.items()}
    for f, fac in enumerate(ffs.factors):
        for x in sorted(fac):
            name = ffs.alphabet.names[x - 1]
            table[(x,)] = float(seeds.pop(name, seeds.pop(x, 0.0)))
    if seeds:
        raise PreconditionError(f"seeds for letters outside the factors: {list(seeds)}")
    for f in range(len(ffs.factors)):
        for j in range(2, k + 1):
            sysj = extension_system(table, ffs, eta0, f, j)
            gap = sysj.check(tol)
            if gap > tol * max(1.0, np.abs(sysj.const).max(initial=0)):
                raise AssertionError(f"extension constants inconsistent at level {j} (gap {gap:.3g})")
            sol, *_ = np.linalg.lstsq(sysj.matrix, sysj.const, rcond=None)
            res = np.abs(sysj.matrix @ sol - sysj.const).max(initial=0)
            if res > 1e-8 * max(1.0, np.abs(sysj.const).max(initial=0)):
                raise AssertionError(f"extension system at level {j} has residual {res:.3g}")
            for w, v in zip(sysj.cols, sol):
                table[w] = float(v)
    # words of the relative table that vanish are simply absent; fill zeros
    return SignedMeasuredCurrent(ffs, k, table)


def eta_AC(ffs: FreeFactorSystem, f: int, C: float, w) -> float:
    s = len(ffs.factors[f])
    return C / (2 * s - 1) ** (len(w) - 1)


def nonnegative_fix(eta: SignedMeasuredCurrent, s: int | None = None) -> tuple:
    """Add C/(2s-1)^(|w|-1) on factor words so that all values are >= 0.

    Done factor by factor; returns (fixed current, {factor: C}).
    """
    ffs = eta.ffs
    table = dict(eta.table)
    consts = {}
    for f, fac in enumerate(ffs.factors):
        rank = s if (s is not None and len(ffs.factors) == 1) else len(fac)
        ws = [w for w in eta.a_words() if ffs.factor_of(w[0]) == f]
        m = max(0.0, -min((table[w] for w in ws), default=0.0))
        C = m * (2 * rank - 1) ** (eta.k - 1)
        consts[f] = C
        if C:
            for w in ws:
                table[w] += C / (2 * rank - 1) ** (len(w) - 1)
    return SignedMeasuredCurrent(ffs, eta.k, table), consts


# ---------------------------------------------------------------- approximation

@dataclass(frozen=True)
class ApproximationConfig:
    k: int
    R: float
    rank: int
    beta_power: int | None = None

    @property
    def P(self) -> int:
        n = self.rank
        return 2 * n * (2 * n - 1) ** (2 * n * (2 * n - 1) ** (self.k - 2))

    @property
    def bound(self) -> float:
        try:
            return self.P / self.R
        except OverflowError:
            return math.inf


@dataclass
class ApproximationResult:
    classes: list          # (CyclicWord, multiplicity)
    error: float
    bound: float
    remainder_max: float
    approx: RelativeCurrent

    @property
    def ok(self) -> bool:
        return self.error <= self.bound

    def relative_classes(self, ffs):
        return [(a, m) for a, m in self.classes if ffs.is_relative_class(a)]


def _cycle_word(path_edges):
    # edges are length-k words along a closed walk; the cyclic word reads
    # the last letter of each
    return tuple(e[-1] for e in path_edges)


def _shortest_cycle(edges_out, start_edge, k):
    """Shortest closed walk starting with start_edge, as a list of edges."""
    u = start_edge[:-1]
    v = start_edge[1:]
    prev = {v: None}
    dq = deque([v])
    while dq:
        x = dq.popleft()
        if x == u:
            break
        for e in edges_out.get(x, ()):
            y = e[1:]
            if y not in prev:
                prev[y] = (x, e)
                dq.append(y)
    if u not in prev:
        return None
    path = []
    x = u
    while prev[x] is not None:
        x, e = prev[x]
        path.append(e)
    return [start_edge] + path[::-1]


def approximate_by_rationals(eta0: RelativeCurrent, cfg: ApproximationConfig,
                             max_steps: int = 100000) -> ApproximationResult:
    """Write R*eta0 approximately as a sum of rational currents of classes.

    Extends eta0 to a signed current non-negative up to length k, then peels
    off closed walks in the graph of length-k words (shortest first).
    """
    k = cfg.k
    ffs = eta0.ffs
    if k < 2:
        raise PreconditionError("approximation needs k >= 2")
    if cfg.rank != ffs.alphabet.rank:
        raise PreconditionError("config rank does not match the alphabet")
    P = cfg.P
    if not any(len(w) == k and cfg.R * v >= P for w, v in eta0.table.items()):
        raise PreconditionError(f"R*eta0(w) < P = {P} for every word of length {k}; increase R")
    ext, _ = nonnegative_fix(k_extension(eta0, k))
    rem = {}
    for w in reduced_words(ffs.alphabet, k):
        rem[w] = cfg.R * ext[w]
    classes = []
    steps = 0
    while True:
        edges_out: dict = {}
        for w, v in rem.items():
            if v >= 1 - 1e-9:
                edges_out.setdefault(w[:-1], []).append(w)
        for lst in edges_out.values():
            lst.sort(key=lambda e: [letter_key(x) for x in e])
        starts = sorted((w for w, v in rem.items() if v >= 1 - 1e-9 and not ffs.in_A(w)),
                        key=lambda e: [letter_key(x) for x in e])
        cands = []
        for i, e in enumerate(starts):
            cyc = _shortest_cycle(edges_out, e, k)
            if cyc is not None:
                cands.append((len(cyc), i, cyc))
        cands.sort(key=lambda c: c[:2])
        picked = None
        for _, _, cyc in cands:
            alpha = CyclicWord(_cycle_word(cyc))
            use = {}
            for w in rem:
                c = count_cyclic(w, alpha, with_inverse=True)
                if c:
                    use[w] = c
            t = min(math.floor(rem[w] / c + 1e-9) for w, c in use.items())
            if t >= 1:
                picked = alpha, use, t
                break
        if picked is None:
            break
        alpha, use, t = picked
        for w, c in use.items():
            rem[w] -= t * c
        classes.append((alpha, t))
        steps += 1
        if steps > max_steps:
            raise ConvergenceError(f"approximation did not finish within {max_steps} extractions")
    approx_table: dict = {}
    for alpha, t in classes:
        if not ffs.is_relative_class(alpha):
            continue
        for w in relative_words(ffs, k):
            c = count_cyclic(w, alpha, with_inverse=True)
            if c:
                approx_table[w] = approx_table.get(w, 0) + t * c
    approx = RelativeCurrent(ffs, k, {w: v / cfg.R for w, v in approx_table.items()})
    err = max((abs(eta0.get(w) - approx.get(w)) for w in relative_words(ffs, k)), default=0.0)
    remmax = max((v for w, v in rem.items() if not ffs.in_A(w)), default=0.0)
    if cfg.beta_power:
        approx = beta_power_current(classes, ffs, k, cfg.beta_power).scaled(1.0 / cfg.R)
    return ApproximationResult(classes, err, cfg.bound, remmax, approx)


def beta_power_current(classes, ffs, k, m) -> RelativeCurrent:
    """(1/m) eta of the single class w_1^m ... w_l^m built from the classes."""
    word = []
    for alpha, t in classes:
        if ffs.is_relative_class(alpha):
            word.extend(list(alpha.letters) * (m * t))
    beta, _ = cyclic_reduce(tuple(word))
    return rational_current(beta, ffs, k).scaled(1.0 / m)
