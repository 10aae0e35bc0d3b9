"""Substitutions, induced length-l substitutions, transition matrices and
Perron-Frobenius frequency limits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import median

import networkx as nx
import numpy as np

from .errors import ConvergenceError, PreconditionError
from .linalg import eigvals
from .words import Alphabet, AlphabetMismatch


@dataclass(frozen=True)
class Substitution:
    alphabet: Alphabet
    rules: tuple  # rules[i] is the image of letter i+1

    def __post_init__(self):
        rules = tuple(tuple(r) for r in self.rules)
        object.__setattr__(self, "rules", rules)
        if len(rules) != self.alphabet.rank:
            raise PreconditionError("need exactly one rule per letter")
        for i, r in enumerate(rules):
            if not r:
                raise PreconditionError(f"empty image for {self.alphabet.names[i]}")
            for x in r:
                if x < 1 or x > self.alphabet.rank:
                    raise AlphabetMismatch(f"undeclared letter {x} in image of {self.alphabet.names[i]}")

    @classmethod
    def from_strings(cls, rules: dict, letters=None) -> "Substitution":
        letters = list(letters or rules)
        alph = Alphabet(tuple(letters), involutive=False)
        return cls(alph, tuple(alph.parse(rules[n]) for n in letters))

    @property
    def size(self) -> int:
        return self.alphabet.rank

    def image(self, x: int) -> tuple:
        return self.rules[x - 1]

    def apply(self, w) -> tuple:
        out: list = []
        for x in w:
            if not isinstance(x, int) or x < 1 or x > self.size:
                raise AlphabetMismatch(f"undeclared letter {x!r}")
            out.extend(self.rules[x - 1])
        return tuple(out)

    def iterate(self, w, n: int) -> tuple:
        for _ in range(n):
            w = self.apply(w)
        return tuple(w)

    def power(self, n: int) -> "Substitution":
        return Substitution(self.alphabet, tuple(self.iterate((x,), n) for x in range(1, self.size + 1)))

    def letter(self, name: str) -> int:
        return self.alphabet.token(name)

    def fmt(self, w) -> str:
        return self.alphabet.format(w)

    def describe(self) -> list[str]:
        return [f"{n} -> {self.fmt(r)}" for n, r in zip(self.alphabet.names, self.rules)]

    def reachable(self, a: int) -> list[int]:
        """Letters occurring in some iterate of a (so in the fixed word)."""
        seen = {a}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in self.rules[x - 1]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return sorted(seen)


# ---------------------------------------------------------------- matrices

@dataclass(frozen=True)
class TransitionMatrix:
    keys: tuple
    labels: tuple
    entries: np.ndarray = field(compare=False)

    def __eq__(self, other):
        return (isinstance(other, TransitionMatrix) and self.keys == other.keys
                and np.array_equal(self.entries, other.entries))

    def tolist(self):
        return self.entries.tolist()

    def index(self, key) -> int:
        return self.keys.index(key)

    def restrict(self, keys) -> "TransitionMatrix":
        keys = list(keys)
        idx = [self.keys.index(k) for k in keys]
        return TransitionMatrix(tuple(keys), tuple(self.labels[i] for i in idx),
                                self.entries[np.ix_(idx, idx)])

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for lab, row in zip(self.labels, self.entries.tolist()):
            lines.append(lab + "," + ",".join(str(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        w = max([len(s) for s in self.labels] + [len(str(v)) for v in self.entries.flat] + [1])
        lines = [" " * w + " " + " ".join(s.rjust(w) for s in self.labels)]
        for lab, row in zip(self.labels, self.entries.tolist()):
            lines.append(lab.rjust(w) + " " + " ".join(str(v).rjust(w) for v in row))
        return "\n".join(lines) + "\n"


def transition_matrix(zeta: Substitution, order=None) -> TransitionMatrix:
    """M(a, b) = number of occurrences of a in zeta(b)."""
    order = list(order) if order is not None else list(range(1, zeta.size + 1))
    pos = {x: i for i, x in enumerate(order)}
    M = np.zeros((len(order), len(order)), dtype=np.int64)
    for j, b in enumerate(order):
        for a in zeta.image(b):
            if a in pos:
                M[pos[a], j] += 1
    return TransitionMatrix(tuple(order), tuple(zeta.fmt((x,)) for x in order), M)


@dataclass(frozen=True)
class BlockStructure:
    blocks: tuple       # tuples of letters, top block first
    primitive: tuple
    irreducible: tuple
    periods: tuple

    def block_of(self, x: int) -> int:
        for i, b in enumerate(self.blocks):
            if x in b:
                return i
        raise KeyError(x)

    def order(self) -> list[int]:
        return [x for b in self.blocks for x in b]


def _period(G, nodes) -> int:
    nodes = list(nodes)
    level = {nodes[0]: 0}
    queue = [nodes[0]]
    S = set(nodes)
    g = 0
    while queue:
        u = queue.pop(0)
        for v in G.successors(u):
            if v not in S:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g)


def _is_primitive(B: np.ndarray) -> bool:
    n = B.shape[0]
    if n == 1:
        return B[0, 0] > 0
    P = (B > 0).astype(np.int64)
    Q = P.copy()
    for _ in range((n - 1) ** 2):
        Q = ((Q @ P) > 0).astype(np.int64)
    return bool(Q.all())


def block_structure(zeta: Substitution, letters=None) -> BlockStructure:
    letters = sorted(letters) if letters is not None else list(range(1, zeta.size + 1))
    S = set(letters)
    G = nx.DiGraph()
    G.add_nodes_from(letters)
    for b in letters:
        for a in zeta.image(b):
            if a in S:
                G.add_edge(b, a)
            else:
                raise PreconditionError("letter set is not closed under the substitution")
    C = nx.condensation(G)
    members = {c: tuple(sorted(C.nodes[c]["members"])) for c in C.nodes}
    order = list(nx.lexicographical_topological_sort(C, key=lambda c: members[c][0]))
    blocks, prim, irr, per = [], [], [], []
    M = transition_matrix(zeta, letters)
    for c in order:
        b = members[c]
        B = M.restrict(b).entries
        blocks.append(b)
        is_irr = len(b) > 1 or B[0, 0] > 0
        irr.append(is_irr)
        prim.append(is_irr and _is_primitive(B))
        per.append(_period(G, b) if is_irr else 0)
    return BlockStructure(tuple(blocks), tuple(prim), tuple(irr), tuple(per))


def block_order(zeta: Substitution, letters=None) -> list[int]:
    return block_structure(zeta, letters).order()


# ---------------------------------------------------------------- seeds, fixed points

def find_seed(zeta: Substitution, block) -> tuple[int, int]:
    """Smallest p (then first letter a) with zeta^p(a) starting with a and |zeta^p(a)| >= 2."""
    block = sorted(block)
    n = zeta.size
    first = [None] + [zeta.image(x)[0] for x in range(1, n + 1)]
    length = [None] + [1] * n
    f = {x: x for x in range(1, n + 1)}
    for p in range(1, n + 1):
        length = [None] + [sum(length[y] for y in zeta.image(x)) for x in range(1, n + 1)]
        f = {x: first[f[x]] for x in f}
        for a in block:
            if f[a] == a and length[a] >= 2:
                return p, a
    raise PreconditionError("no letter of the block expands under iteration (no-expansion)")


def fixed_point_prefix(zeta: Substitution, a: int, n: int | None = None, length: int | None = None) -> tuple:
    """zeta^n(a), or the prefix of the fixed word rho_a of the given length."""
    img = zeta.image(a)
    if img[0] != a or len(img) < 2:
        raise PreconditionError(f"{zeta.fmt((a,))} is not a seed: its image must start with it and have length >= 2")
    if n is not None:
        return zeta.iterate((a,), n)
    if length is None:
        raise ValueError("give n or length")
    w = (a,)
    while len(w) < length:
        w = zeta.apply(w[:length])
    return w[:length]


# ---------------------------------------------------------------- induced substitutions

@dataclass(frozen=True)
class InducedSubstitution:
    base: Substitution
    l: int
    seed: int
    words: tuple                  # ordered alphabet A_l
    classes: tuple                # per word: (block index, 0 for bar / 1 for tilde)
    rules: dict = field(compare=False)
    matrix: TransitionMatrix = field(compare=False)
    blocks: BlockStructure = field(compare=False)

    def fmt(self, w) -> str:
        return self.base.fmt(w)

    def image(self, w) -> tuple:
        return self.rules[tuple(w)]

    def crossing_words(self) -> list:
        """B_l: words starting in B_0 plus the words crossing an earlier block."""
        return [w for w, (i, t) in zip(self.words, self.classes) if i == 0 or t == 0]

    def describe(self) -> list[str]:
        return [f"{self.fmt(w)} -> " + " . ".join(self.fmt(u) for u in self.rules[w]) for w in self.words]


def induced_image(zeta: Substitution, w, l: int) -> tuple:
    """The first |zeta(w_1)| subwords of length l of zeta(w)."""
    img = zeta.apply(w)
    k = len(zeta.image(w[0]))
    return tuple(img[i:i + l] for i in range(k))


def induce(zeta: Substitution, l: int, seed: int, max_words: int = 200000) -> InducedSubstitution:
    if l < 1:
        raise PreconditionError("l must be >= 1")
    letters = zeta.reachable(seed)
    bs = block_structure(zeta, letters)
    prefix = fixed_point_prefix(zeta, seed, length=10 * l * len(letters))
    found = {prefix[i:i + l] for i in range(len(prefix) - l + 1)}
    if len(found) > max_words:
        raise ConvergenceError(f"discovery of length-{l} factors exceeds cap {max_words}")
    rules = {}
    todo = list(found)
    while todo:
        w = todo.pop()
        img = induced_image(zeta, w, l)
        rules[w] = img
        for u in img:
            if u not in found:
                found.add(u)
                todo.append(u)
                if len(found) > max_words:
                    raise ConvergenceError(f"discovery of length-{l} factors did not close within cap {max_words}")
    blk = {x: bs.block_of(x) for x in letters}

    def cls(w):
        i = blk[w[0]]
        crosses = any(blk[x] < i for x in w)
        return (i, 0 if crosses else 1)

    words = sorted(found, key=lambda w: (cls(w), w))
    classes = tuple(cls(w) for w in words)
    pos = {w: i for i, w in enumerate(words)}
    M = np.zeros((len(words), len(words)), dtype=np.int64)
    for j, w in enumerate(words):
        for u in rules[w]:
            M[pos[u], j] += 1
    labels = tuple(zeta.fmt(w) for w in words)
    return InducedSubstitution(zeta, l, seed, tuple(words), classes, rules,
                               TransitionMatrix(tuple(words), labels, M), bs)


def restrict_to_crossing(ind: InducedSubstitution) -> TransitionMatrix:
    return ind.matrix.restrict(ind.crossing_words())


# ---------------------------------------------------------------- PF data and spectra

def pf_eigen(B, tol: float = 1e-13, max_iter: int = 100000):
    """Power iteration; right vector scaled to have smallest entry 1."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if n == 0:
        raise PreconditionError("empty block")

    def run(A):
        x = np.ones(n)
        lam = 0.0
        for _ in range(max_iter):
            y = A @ x
            s = y.sum()
            if s == 0:
                raise PreconditionError("block is nilpotent; no PF eigenvalue")
            new = s / x.sum()
            x = y / s
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = (A @ x) / x
            lo, hi = np.nanmin(ratios), np.nanmax(ratios)
            if abs(new - lam) < tol * max(1.0, new) and hi - lo < 10 * tol * max(1.0, new):
                return new, x
            lam = new
        raise ConvergenceError(f"power iteration did not converge in {max_iter} steps; "
                               "check that the block is primitive")

    lam, right = run(B)
    _, left = run(B.T)
    right = right / right.min()
    left = left / left.min()
    return float(lam), right, left


def spectrum(M) -> list[complex]:
    """Eigenvalues, computed block by block on the irreducible components."""
    A = np.asarray(M.entries if isinstance(M, TransitionMatrix) else M)
    n = A.shape[0]
    G = nx.DiGraph()
    G.add_nodes_from(range(n))
    for i, j in zip(*np.nonzero(A)):
        G.add_edge(int(j), int(i))
    ev: list[complex] = []
    for comp in nx.strongly_connected_components(G):
        idx = sorted(comp)
        ev.extend(eigvals(A[np.ix_(idx, idx)].tolist()))
    ev.sort(key=lambda z: (-abs(z), -z.real, -z.imag))
    return ev


@dataclass
class SpectrumReport:
    eig_m: list
    eig_ml: list
    matched: list         # (mu from M, nu from M_l)
    unmatched: list       # eigenvalues of M with no partner
    extras: list          # eigenvalues of M_l left over
    tol: float

    @property
    def ok(self) -> bool:
        return not self.unmatched and all(abs(z) <= 1 + self.tol for z in self.extras)

    @property
    def max_extra_modulus(self) -> float:
        return max((abs(z) for z in self.extras), default=0.0)


def compare_spectra(M, Ml, tol: float = 1e-6) -> SpectrumReport:
    em, eml = spectrum(M), spectrum(Ml)
    free = list(eml)
    matched, unmatched = [], []
    for mu in em:
        if not free:
            unmatched.append(mu)
            continue
        j = min(range(len(free)), key=lambda i: abs(free[i] - mu))
        if abs(free[j] - mu) <= tol * max(1.0, abs(mu)):
            matched.append((mu, free.pop(j)))
        else:
            unmatched.append(mu)
    return SpectrumReport(em, eml, matched, unmatched, free, tol)


# ---------------------------------------------------------------- frequencies

@dataclass
class FrequencyTable:
    alphabet: Alphabet
    seed: int
    lam: float
    power: int
    values: dict
    seed_columns: dict = field(default_factory=dict)
    method: str = "matrix"

    def __getitem__(self, w):
        if isinstance(w, str):
            w = self.alphabet.parse(w)
        return self.values[tuple(w)]

    def get(self, w, default=None):
        try:
            return self[w]
        except KeyError:
            return default

    def rows(self):
        return [(self.alphabet.format(w), v) for w, v in self.values.items()]


def _top_block(zeta, seed):
    letters = zeta.reachable(seed)
    bs = block_structure(zeta, letters)
    b0 = bs.blocks[bs.block_of(seed)]
    if bs.block_of(seed) != 0:
        raise PreconditionError("seed letter must lie in the top block of the letters it generates")
    return bs, b0


def seed_data(zeta: Substitution, seed: int):
    """Return (lam, power p, fixed-point letter, working substitution zeta^p)."""
    bs, b0 = _top_block(zeta, seed)
    if not bs.primitive[0]:
        if bs.irreducible[0] and bs.periods[0] > 1:
            pass  # handled by passing to a power below
        else:
            raise PreconditionError("top block is not irreducible")
    lam, _, _ = pf_eigen(transition_matrix(zeta, b0).entries)
    if lam <= 1 + 1e-12:
        raise PreconditionError(f"top block has PF eigenvalue {lam:.12g} <= 1 (degenerate growth)")
    p, a = find_seed(zeta, b0)
    h = max(bs.periods[0], 1)
    p = p * h // math.gcd(p, h)
    work = zeta.power(p) if p > 1 else zeta
    if work.image(a)[0] != a:
        p, a = find_seed(work, b0)
        work = work.power(p) if p > 1 else work
    return lam, p, a, work


def _normalise_window(zeta, window):
    out = []
    for w in window:
        if isinstance(w, str):
            w = zeta.alphabet.parse(w)
        out.append(tuple(w))
    return out


def frequencies(zeta: Substitution, seed, window, method: str = "matrix",
                tol: float = 1e-9, max_iter: int = 500) -> FrequencyTable:
    """d_{w,seed} = lim (w, zeta^n(seed)) / lam^n for every window word."""
    if isinstance(seed, str):
        seed = zeta.letter(seed)
    lam, p, a, work = seed_data(zeta, seed)
    _, b0 = _top_block(zeta, seed)
    b0set = set(b0)
    window = _normalise_window(zeta, window)
    for w in window:
        if not w:
            raise PreconditionError("empty window word")
        if not b0set & set(w):
            raise PreconditionError(f"window word {zeta.fmt(w)} does not cross the top block")
    if method == "matrix":
        vals, cols = _freq_matrix(work, seed, a, lam ** p, window, tol, max_iter)
    elif method == "direct":
        vals, cols = _freq_direct(work, seed, lam ** p, window, tol, max_iter), {}
    elif method == "both":
        vals, cols = _freq_matrix(work, seed, a, lam ** p, window, tol, max_iter)
        other = _freq_direct(work, seed, lam ** p, window, tol, max_iter)
        bad = [w for w in window if abs(vals[w] - other[w]) > max(1e-6, 10 * tol)]
        if bad:
            raise ConvergenceError("matrix and direct methods disagree on "
                                   + ", ".join(zeta.fmt(w) for w in bad[:5]))
    else:
        raise ValueError(f"unknown method {method!r}")
    return FrequencyTable(zeta.alphabet, seed, lam, p, {w: vals[w] for w in window}, cols, method)


def _freq_matrix(work, seed, a, Lam, window, tol, max_iter):
    vals, cols = {}, {}
    for l in sorted({len(w) for w in window}):
        ind = induce(work, l, a)
        B = restrict_to_crossing(ind)
        starts = [w for w in B.keys if w[0] == seed]
        if not starts:
            raise PreconditionError(f"no length-{l} factor starts with {work.fmt((seed,))}")
        alpha = starts[0]
        cols[l] = alpha
        A = B.entries.astype(float) / Lam
        v = np.zeros(len(B.keys))
        v[B.index(alpha)] = 1.0
        calm = 0
        for it in range(max_iter):
            nv = A @ v
            change = np.max(np.abs(nv - v))
            v = nv
            # lam is only known to ~1e-13, which leaves a tiny geometric drift
            calm = calm + 1 if change < max(tol / 10, 1e-12 * np.max(np.abs(v))) else 0
            if calm >= 3:
                break
        else:
            raise ConvergenceError(f"frequency iteration for length {l} did not settle in {max_iter} steps")
        pos = {w: i for i, w in enumerate(B.keys)}
        for w in window:
            if len(w) == l:
                vals[w] = float(v[pos[w]]) if w in pos else 0.0
    return vals, cols


@dataclass
class _Summary:
    counts: dict
    length: int
    prefix: tuple
    suffix: tuple


def _combine(s1, s2, l, targets):
    counts = dict(s1.counts)
    for w, c in s2.counts.items():
        counts[w] = counts.get(w, 0) + c
    if l > 1:
        cross = s1.suffix + s2.prefix
        k = len(s1.suffix)
        for st in range(max(0, k - l + 1), k):
            if st + l > len(cross):
                break
            u = cross[st:st + l]
            if u in targets:
                counts[u] = counts.get(u, 0) + 1
        pre = (s1.prefix + s2.prefix)[:l - 1]
        suf = (s1.suffix + s2.suffix)[-(l - 1):]
    else:
        pre = suf = ()
    return _Summary(counts, s1.length + s2.length, pre, suf)


def count_in_iterates(zeta: Substitution, words, x: int, n: int) -> dict:
    """Exact occurrence counts of each word in zeta^n(x), without building it."""
    out = {}
    for l in sorted({len(w) for w in words}):
        targets = {tuple(w) for w in words if len(w) == l}
        level = _base_level(zeta, l, targets)
        for _ in range(n):
            level = _next_level(zeta, level, l, targets)
        out.update({w: level[x].counts.get(w, 0) for w in targets})
    return out


def _base_level(zeta, l, targets):
    level = {}
    for y in range(1, zeta.size + 1):
        c = {(y,): 1} if (y,) in targets else {}
        pre = (y,) if l > 1 else ()
        level[y] = _Summary(c, 1, pre, pre)
    return level


def _next_level(zeta, level, l, targets):
    new = {}
    for y in range(1, zeta.size + 1):
        img = zeta.image(y)
        s = level[img[0]]
        for z in img[1:]:
            s = _combine(s, level[z], l, targets)
        new[y] = s
    return new


def _freq_direct(work, seed, Lam, window, tol, max_iter):
    vals = {}
    n_cap = min(max_iter, int(600 / math.log(Lam)))
    for l in sorted({len(w) for w in window}):
        targets = {w for w in window if len(w) == l}
        level = _base_level(work, l, targets)
        prev = None
        calm = 0
        for n in range(1, n_cap + 1):
            level = _next_level(work, level, l, targets)
            scale = Lam ** n
            cur = {w: level[seed].counts.get(w, 0) / scale for w in targets}
            if prev is not None:
                change = max(abs(cur[w] - prev[w]) for w in targets)
                calm = calm + 1 if change < max(tol, 1e-12 * max(cur.values(), default=0)) else 0
                if calm >= 3:
                    break
            prev = cur
        else:
            raise ConvergenceError(f"direct frequency count for length {l} not Cauchy after {n_cap} iterations")
        vals.update(cur)
    return vals


# ---------------------------------------------------------------- kappa and Kirchhoff

@dataclass
class KappaReport:
    kappa: float
    max_deviation: float
    spread: float
    ratios: dict


def kappa(zeta: Substitution, a, b, probe_window, tol: float = 1e-12) -> KappaReport:
    """kappa with d_{w,b} = kappa * d_{w,a} on the probe window."""
    fa = frequencies(zeta, a, probe_window, tol=tol)
    fb = frequencies(zeta, b, probe_window, tol=tol)
    ratios = {w: fb.values[w] / fa.values[w] for w in fa.values if fa.values[w] > 1e-12}
    if not ratios:
        raise PreconditionError("all probe-window frequencies vanish for the first seed")
    r = list(ratios.values())
    k = median(r)
    return KappaReport(k, max(abs(x - k) for x in r), (max(r) - min(r)) / abs(k), ratios)


@dataclass
class KirchhoffReport:
    residuals: dict       # word -> (right residual, left residual)
    tol: float

    @property
    def max_residual(self) -> float:
        return max((max(abs(a), abs(b)) for a, b in self.residuals.values()), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def check_kirchhoff(table, alphabet=None, words=None, tol: float = 1e-8) -> KirchhoffReport:
    """d_w = sum_e d_{we} = sum_e d_{ew} over all letters e of the alphabet."""
    values = table.values if hasattr(table, "values") and not callable(table.values) else dict(table)
    alphabet = alphabet or table.alphabet
    letters = sorted({x for w in values for x in w})
    if words is None:
        top = max((len(w) for w in values), default=0)
        words = [w for w in values if len(w) < top]
    gaps = []
    res = {}
    for w in words:
        w = tuple(w)
        right = [w + (e,) for e in letters]
        left = [(e,) + w for e in letters]
        missing = [u for u in right + left if u not in values]
        if missing:
            gaps.extend(missing)
            continue
        res[w] = (values[w] - sum(values[u] for u in right), values[w] - sum(values[u] for u in left))
    if gaps:
        raise PreconditionError("incomplete window; missing " + ", ".join(alphabet.format(g) for g in gaps[:20]))
    return KirchhoffReport(res, tol)


def crossing_window(zeta: Substitution, seed, max_len: int) -> list:
    """All words of length <= max_len over the seed's letters that meet its top block."""
    if isinstance(seed, str):
        seed = zeta.letter(seed)
    letters = zeta.reachable(seed)
    _, b0 = _top_block(zeta, seed)
    out = []
    frontier = [()]
    for _ in range(max_len):
        frontier = [w + (x,) for w in frontier for x in letters]
        out.extend(w for w in frontier if set(w) & set(b0))
    return out
