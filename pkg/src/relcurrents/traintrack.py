"""Marked graphs, train track maps, turns, PF metric, bounded cancellation,
and the completely-split adapter that turns a train track map into a
substitution on splitting units."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import PreconditionError
from .substitution import (Substitution, frequencies, induce,
                           pf_eigen)
from .words import Alphabet, invert, letter_key, reduce


class IncompleteSplitting(PreconditionError):
    pass


# ---------------------------------------------------------------- graphs

@dataclass(frozen=True)
class MarkedGraph:
    alphabet: Alphabet            # edge names; signed letters are oriented edges
    vertices: tuple
    ends: tuple                   # ends[i] = (start, end) vertex indices of edge i+1

    def __post_init__(self):
        if not self.alphabet.involutive:
            raise PreconditionError("edge alphabet must have inverses")
        if len(self.ends) != self.alphabet.rank:
            raise PreconditionError("every edge needs endpoints")
        val = [0] * len(self.vertices)
        for s, t in self.ends:
            val[s] += 1
            val[t] += 1
        low = [self.vertices[i] for i, v in enumerate(val) if v < 2]
        if low:
            warnings.warn(f"vertices of valence < 2: {low}")

    @classmethod
    def rose(cls, alphabet: Alphabet) -> "MarkedGraph":
        return cls(alphabet, ("v",), tuple((0, 0) for _ in alphabet.names))

    @property
    def is_rose(self) -> bool:
        return len(self.vertices) == 1

    @property
    def rank(self) -> int:
        return self.alphabet.rank - len(self.vertices) + 1

    def start(self, e: int) -> int:
        s, t = self.ends[abs(e) - 1]
        return s if e > 0 else t

    def end(self, e: int) -> int:
        return self.start(-e)

    def is_path(self, p) -> bool:
        return all(self.end(p[i]) == self.start(p[i + 1]) for i in range(len(p) - 1))

    def is_loop(self, p) -> bool:
        return bool(p) and self.is_path(p) and self.end(p[-1]) == self.start(p[0])

    def directions(self, v: int | None = None) -> list[int]:
        ds = self.alphabet.letters()
        return ds if v is None else [d for d in ds if self.start(d) == v]

    def turns(self) -> list[tuple]:
        out = []
        for v in range(len(self.vertices)):
            ds = self.directions(v)
            for i, d1 in enumerate(ds):
                for d2 in ds[i:]:
                    out.append(turn(d1, d2))
        return out

    def fmt(self, p) -> str:
        return self.alphabet.format(p)

    def parse(self, text: str) -> tuple:
        p = self.alphabet.parse(text)
        if not self.is_path(p):
            raise PreconditionError(f"{text!r} is not an edge path")
        return p


def turn(d1: int, d2: int) -> tuple:
    return tuple(sorted((d1, d2), key=letter_key))


def path_turns(p, cyclic: bool = False):
    """Turns (inverse of e_i, e_{i+1}) crossed by a path, with their positions."""
    n = len(p)
    rng = range(n) if cyclic else range(n - 1)
    return [(i + 1, turn(-p[i], p[(i + 1) % n])) for i in rng]


def tighten(p) -> tuple:
    return reduce(p)


def tighten_cyclic(p) -> tuple:
    p = list(reduce(p))
    while len(p) > 1 and p[0] == -p[-1]:
        p = p[1:-1]
    return tuple(p)


# ---------------------------------------------------------------- systems

@dataclass(frozen=True)
class ExceptionalFamily:
    name: str
    e1: int
    axis: str
    e2: int


@dataclass(frozen=True)
class TrainTrackSystem:
    graph: MarkedGraph
    images: tuple                          # images[i] = path phi(edge i+1)
    strata: tuple                          # bottom-up tuples of positive edges
    inps: tuple = ()                       # (name, path)
    linear: tuple = ()                     # (edge, axis name, exponent)
    exceptional: tuple = ()                # ExceptionalFamily
    connecting: tuple = ()                 # (name, path)
    metric: dict = field(default=None, compare=False)
    lam: float = field(default=None, compare=False)

    @classmethod
    def build(cls, graph: MarkedGraph, images, strata=None, inps=(), linear=(),
              exceptional=(), connecting=()) -> "TrainTrackSystem":
        images = tuple(tuple(p) for p in images)
        if len(images) != graph.alphabet.rank:
            raise PreconditionError("need one image per edge")
        vmap = {}
        for i, p in enumerate(images):
            e = i + 1
            if not p:
                raise PreconditionError(f"edge {graph.fmt((e,))} has trivial image")
            if not graph.is_path(p):
                raise PreconditionError(f"image of {graph.fmt((e,))} is not an edge path")
            for v, w in ((graph.start(e), graph.start(p[0])), (graph.end(e), graph.end(p[-1]))):
                if vmap.setdefault(v, w) != w:
                    raise PreconditionError(f"vertex {graph.vertices[v]} has inconsistent images")
        if strata is None:
            strata = derive_strata(graph, images)
        strata = tuple(tuple(sorted(abs(x) for x in s)) for s in strata)
        if sorted(x for s in strata for x in s) != list(range(1, graph.alphabet.rank + 1)):
            raise PreconditionError("strata must partition the edges")
        tt = cls(graph, images, strata, tuple(inps), tuple(linear), tuple(exceptional), tuple(connecting))
        metric, lam = pf_metric(tt)
        object.__setattr__(tt, "metric", metric)
        object.__setattr__(tt, "lam", lam)
        return tt

    # basic map operations
    def image(self, e: int) -> tuple:
        p = self.images[abs(e) - 1]
        return p if e > 0 else invert(p)

    def apply(self, p) -> tuple:
        out: list = []
        for e in p:
            out.extend(self.image(e))
        return tuple(out)

    def tightened(self, p) -> tuple:
        return tighten(self.apply(p))

    def iterate(self, p, n: int) -> tuple:
        for _ in range(n):
            p = self.tightened(p)
        return p

    def power(self, n: int) -> "TrainTrackSystem":
        imgs = [self.iterate((e,), n) for e in range(1, self.graph.alphabet.rank + 1)]
        return TrainTrackSystem.build(self.graph, imgs, self.strata, self.inps, self.linear,
                                      self.exceptional, self.connecting)

    @property
    def top(self) -> tuple:
        return self.strata[-1]

    def stratum_of(self, e: int) -> int:
        for i, s in enumerate(self.strata):
            if abs(e) in s:
                return i
        raise KeyError(e)

    def in_top(self, e: int) -> bool:
        return abs(e) in self.strata[-1]

    def inp(self, name: str) -> tuple:
        for n, p in self.inps:
            if n == name:
                return p
        raise KeyError(name)

    def fmt(self, p) -> str:
        return self.graph.fmt(p)

    def stratum_matrix(self, stratum) -> np.ndarray:
        stratum = list(stratum)
        pos = {e: i for i, e in enumerate(stratum)}
        M = np.zeros((len(stratum), len(stratum)), dtype=np.int64)
        for j, e in enumerate(stratum):
            for x in self.image(e):
                if abs(x) in pos:
                    M[pos[abs(x)], j] += 1
        return M

    def transition_matrix(self, order=None) -> np.ndarray:
        order = list(order or range(1, self.graph.alphabet.rank + 1))
        return self.stratum_matrix(order)


def derive_strata(graph: MarkedGraph, images) -> tuple:
    G = nx.DiGraph()
    n = graph.alphabet.rank
    G.add_nodes_from(range(1, n + 1))
    for i, p in enumerate(images):
        for x in p:
            G.add_edge(i + 1, abs(x))
    C = nx.condensation(G)
    members = {c: tuple(sorted(C.nodes[c]["members"])) for c in C.nodes}
    order = list(nx.lexicographical_topological_sort(C, key=lambda c: members[c][0]))
    return tuple(members[c] for c in reversed(order))


def pf_metric(tt: TrainTrackSystem):
    """Top stratum edges get the PF length vector (smallest entry 1), others 1."""
    top = tt.strata[-1]
    M = tt.stratum_matrix(top)
    metric = {e: 1.0 for e in range(1, tt.graph.alphabet.rank + 1)}
    if len(top) == 1 and M[0, 0] <= 1:
        return metric, float(M[0, 0])
    lam, _, left = pf_eigen(M)
    for e, v in zip(top, left):
        metric[e] = float(v)
    return metric, lam


def r_length(tt: TrainTrackSystem, path, lower_weight: float = 1.0) -> float:
    return sum(tt.metric[abs(e)] if tt.in_top(e) else lower_weight for e in path)


# ---------------------------------------------------------------- turns

@dataclass
class TurnClassification:
    verdicts: dict        # turn -> "legal" | "illegal" | "degenerate"
    steps: dict           # turn -> Tphi iterations until resolution

    def is_illegal(self, t) -> bool:
        return self.verdicts[turn(*t)] != "legal"

    def illegal_turns(self) -> list:
        return [t for t, v in self.verdicts.items() if v != "legal"]


def turn_map(tt: TrainTrackSystem, d: int) -> int:
    return tt.image(d)[0]


def classify_turns(tt: TrainTrackSystem) -> TurnClassification:
    verdicts, steps = {}, {}
    for t in tt.graph.turns():
        if t[0] == t[1]:
            verdicts[t], steps[t] = "degenerate", 0
            continue
        seen = {t}
        cur = t
        k = 0
        verdict = "legal"
        while True:
            cur = turn(turn_map(tt, cur[0]), turn_map(tt, cur[1]))
            k += 1
            if cur[0] == cur[1]:
                verdict = "illegal"
                break
            if cur in seen:
                break
            seen.add(cur)
        verdicts[t], steps[t] = verdict, k
    return TurnClassification(verdicts, steps)


def r_illegal_positions(tt: TrainTrackSystem, p, turns: TurnClassification, cyclic: bool = False):
    """Positions of illegal turns of p not contained in the lower filtration."""
    out = []
    for i, t in path_turns(p, cyclic):
        if turns.is_illegal(t) and (tt.in_top(t[0]) or tt.in_top(t[1])):
            out.append(i)
    return out


# ---------------------------------------------------------------- verification

@dataclass
class VerificationReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, msg):
        self.failures.append(msg)


def _paths(graph, edges, max_len):
    dirs = [d for d in graph.directions() if abs(d) in edges]
    layer = [(d,) for d in dirs]
    out = list(layer)
    for _ in range(max_len - 1):
        layer = [p + (d,) for p in layer for d in dirs
                 if d != -p[-1] and graph.end(p[-1]) == graph.start(d)]
        out.extend(layer)
    return out


def verify_relative_train_track(tt: TrainTrackSystem, sample_len: int = 3) -> VerificationReport:
    rep = VerificationReport()
    g = tt.graph
    for e in range(1, g.alphabet.rank + 1):
        p = tt.image(e)
        if reduce(p) != p:
            rep.add(f"image of {g.fmt((e,))} is not immersed: {g.fmt(p)}")
    for s in tt.strata:
        M = tt.stratum_matrix(s)
        if len(s) > 1 and not nx.is_strongly_connected(nx.DiGraph(
                [(s[j], s[i]) for i in range(len(s)) for j in range(len(s)) if M[i, j]])):
            rep.add(f"stratum {g.fmt(s)} has a reducible transition block")
        if len(s) > 1 or M[0, 0] > 1:
            lam = max(abs(z) for z in np.linalg.eigvals(M.astype(float)))
            if lam > 1 + 1e-9:
                for e in s:
                    for d in (e, -e):
                        p = tt.image(d)
                        if abs(p[0]) not in s or abs(p[-1]) not in s:
                            rep.add(f"EG stratum edge {g.fmt((d,))}: image does not start and end in the stratum")
    turns = classify_turns(tt)
    below = {e for s in tt.strata[:-1] for e in s}
    for p in _paths(g, set(range(1, g.alphabet.rank + 1)), sample_len):
        if not any(tt.in_top(e) for e in p) or r_illegal_positions(tt, p, turns):
            continue
        q = tt.tightened(p)
        if r_illegal_positions(tt, q, turns):
            rep.add(f"r-legal path {g.fmt(p)} maps to {g.fmt(q)} with an r-illegal turn")
    touch = {g.start(d) for d in g.directions() if tt.in_top(d)}
    if below:
        for p in _paths(g, below, 2):
            if g.start(p[0]) in touch and g.end(p[-1]) in touch and not tt.tightened(p):
                rep.add(f"connecting path {g.fmt(p)} has trivial image")
    return rep


def verify_nielsen(tt: TrainTrackSystem, sigma) -> bool:
    return tt.tightened(sigma) == tuple(sigma)


# ---------------------------------------------------------------- cancellation

def bcc_estimate(tt: TrainTrackSystem, depth: int = 2, powers=(1, 2)) -> float:
    """Largest per-side cancellation seen when concatenating short reduced paths."""
    g = tt.graph
    paths = _paths(g, set(range(1, g.alphabet.rank + 1)), depth)
    best = 0.0
    for k in powers:
        f = tt if k == 1 else tt.power(k)
        img = {p: f.tightened(p) for p in paths}
        L = {p: r_length(tt, q) for p, q in img.items()}
        for a in paths:
            for b in paths:
                if g.end(a[-1]) != g.start(b[0]) or a[-1] == -b[0]:
                    continue
                whole = tighten(img[a] + img[b])
                c = (L[a] + L[b] - r_length(tt, whole)) / 2
                if c > best:
                    best = c
    return best


def critical_length(tt: TrainTrackSystem, bcc: float | None = None) -> float:
    if tt.lam is None or tt.lam <= 1:
        raise PreconditionError("critical length needs an EG top stratum with lambda > 1")
    if bcc is None:
        bcc = bcc_estimate(tt)
    return 2 * bcc / (tt.lam - 1)


# ---------------------------------------------------------------- splitting units

@dataclass(frozen=True)
class Unit:
    kind: str        # "edge", "inp", "conn", "exc"
    ref: object      # edge letter, or name
    sign: int = 1
    width: int = 0


def _sigma_run(p, i, s):
    m = 0
    n = len(s)
    while tuple(p[i + m * n:i + (m + 1) * n]) == s:
        m += 1
    return m


class Splitter:
    def __init__(self, tt: TrainTrackSystem):
        self.tt = tt
        self.inps = [(name, tuple(p)) for name, p in tt.inps]
        self.conn = [(name, tuple(p)) for name, p in tt.connecting]
        self.fams = list(tt.exceptional)
        irreducible = set()
        for s in tt.strata:
            M = tt.stratum_matrix(s)
            if len(s) > 1 or M[0, 0] > 0:
                irreducible |= set(s)
        self.irreducible = irreducible

    def axis(self, fam: ExceptionalFamily) -> tuple:
        return self.tt.inp(fam.axis)

    def delta(self, fam: ExceptionalFamily) -> int:
        d = {e: k for e, ax, k in self.tt.linear}
        if fam.e1 not in d or fam.e2 not in d:
            raise PreconditionError(f"exceptional family {fam.name} needs linear annotations for both edges")
        return d[fam.e1] - d[fam.e2]

    def expand(self, u: Unit) -> tuple:
        if u.kind == "edge":
            return (u.ref,)
        if u.kind in ("inp", "conn"):
            pool = self.inps if u.kind == "inp" else self.conn
            p = dict(pool)[u.ref]
            return p if u.sign > 0 else invert(p)
        fam = u.ref
        p = (fam.e1,) + self.axis(fam) * u.width + (-fam.e2,)
        return p if u.sign > 0 else invert(p)

    def split(self, p) -> list:
        p = tuple(p)
        out = []
        i = 0
        while i < len(p):
            u = self._match(p, i)
            if u is None:
                raise IncompleteSplitting(
                    f"no splitting unit matches at {self.tt.fmt(p[i:i + 6])} in {self.tt.fmt(p)}")
            out.append(u)
            i += len(self.expand(u))
        return out

    def _match(self, p, i):
        for fam in self.fams:
            s = self.axis(fam)
            if p[i] == fam.e1:
                m = _sigma_run(p, i + 1, s)
                j = i + 1 + m * len(s)
                if j < len(p) and p[j] == -fam.e2:
                    return Unit("exc", fam, 1, m)
            if p[i] == fam.e2:
                m = _sigma_run(p, i + 1, invert(s))
                j = i + 1 + m * len(s)
                if j < len(p) and p[j] == -fam.e1:
                    return Unit("exc", fam, -1, m)
        best = None
        for kind, pool in (("inp", self.inps), ("conn", self.conn)):
            for name, q in pool:
                for sign, r in ((1, q), (-1, invert(q))):
                    if tuple(p[i:i + len(r)]) == r and (best is None or len(r) > len(self.expand(best))):
                        best = Unit(kind, name, sign)
        if best is not None:
            return best
        if abs(p[i]) in self.irreducible:
            return Unit("edge", p[i])
        return None

    def unit_image(self, u: Unit) -> list:
        if u.kind == "inp":
            return [u]
        if u.kind == "exc":
            return [Unit("exc", u.ref, u.sign, u.width + self.delta(u.ref))]
        return self.split(self.tt.tightened(self.expand(u)))


@dataclass
class SplitSubstitution:
    """A train track map rewritten as a substitution on splitting units."""

    tt: TrainTrackSystem
    seed_edge: int
    units: list
    substitution: Substitution
    seed: int                       # seed letter of the substitution
    cap: int                        # absorbing exceptional width
    absorbing: dict                 # letter -> family
    splitter: Splitter = field(repr=False)
    types: dict = field(default_factory=dict)   # top edge -> 1 or 2
    _cover_cache: dict = field(default_factory=dict, repr=False)
    _freq_cache: dict = field(default_factory=dict, repr=False)

    def letter_of(self, u: Unit) -> int:
        return self.units.index(u) + 1

    def expand_letter(self, x: int, width: int | None = None) -> tuple:
        u = self.units[x - 1]
        if u.kind == "exc" and x in self.absorbing and width is not None:
            u = Unit("exc", u.ref, u.sign, width)
        return self.splitter.expand(u)

    def expand_word(self, W, width=None) -> tuple:
        out = []
        for x in W:
            out.extend(self.expand_letter(x, width))
        return tuple(out)

    def covers(self, max_len: int) -> dict:
        """path -> {unit word W: multiplicity}, over covers of length <= max_len."""
        if max_len in self._cover_cache:
            return self._cover_cache[max_len]
        zeta = self.substitution
        widths = [None]
        if self.absorbing:
            widths = [self.cap, self.cap + 1, self.cap + 2]
        results = []
        for width in widths:
            table: dict = {}
            for l in range(1, max_len + 1):
                for W in induce(zeta, l, self.seed).words:
                    pieces = [self.expand_letter(x, width) for x in W]
                    P = tuple(e for q in pieces for e in q)
                    first, last = len(pieces[0]), len(pieces[-1])
                    for s in range(first):
                        lo = max(s + 1, len(P) - last + 1)
                        for t in range(lo, min(len(P), s + max_len) + 1):
                            gam = P[s:t]
                            d = table.setdefault(gam, {})
                            d[W] = d.get(W, 0) + 1
            results.append(table)
        base = results[0]
        unstable = set()
        for other in results[1:]:
            for g in set(base) | set(other):
                if base.get(g) != other.get(g):
                    unstable.add(g)
        self._cover_cache[max_len] = (base, unstable)
        return self._cover_cache[max_len]

    def r_tilde(self, gamma) -> dict:
        gamma = tuple(gamma)
        base, unstable = self.covers(len(gamma))
        if gamma in unstable:
            raise PreconditionError(
                f"path {self.tt.fmt(gamma)} overlaps exceptional paths of unbounded width; "
                "raise the width cap")
        return dict(base.get(gamma, {}))

    def word_frequencies(self, words, tol: float = 1e-11) -> dict:
        need = [W for W in words if W not in self._freq_cache]
        if need:
            tab = frequencies(self.substitution, self.seed, need, tol=tol)
            self._freq_cache.update(tab.values)
        return {W: self._freq_cache[W] for W in words}

    def frequency(self, gamma, tol: float = 1e-11) -> float:
        r = self.r_tilde(gamma)
        if not r:
            return 0.0
        d = self.word_frequencies(list(r), tol)
        return sum(k * d[W] for W, k in r.items())

    def path_frequencies(self, paths, tol: float = 1e-11) -> dict:
        """d_{gamma, seed} for many paths with a single frequency computation."""
        covers = {tuple(g): self.r_tilde(g) for g in paths}
        need = sorted({W for r in covers.values() for W in r}, key=lambda W: (len(W), W))
        d = self.word_frequencies(need, tol) if need else {}
        return {g: sum(k * d[W] for W, k in r.items()) for g, r in covers.items()}

    def fmt_word(self, W) -> str:
        return self.substitution.fmt(W)


def _unit_name(tt, u: Unit) -> str:
    if u.kind == "edge":
        return tt.graph.alphabet.name(u.ref)
    if u.kind in ("inp", "conn"):
        return u.ref if u.sign > 0 else "~" + u.ref
    name = f"{u.ref.name}{u.width}"
    return name if u.sign > 0 else "~" + name


def _max_width(splitter: Splitter, p) -> int:
    best = 0
    for fam in splitter.fams:
        s = splitter.axis(fam)
        for q in (s, invert(s)):
            for i in range(len(p)):
                best = max(best, _sigma_run(p, i, q))
    return best


def to_substitution(tt: TrainTrackSystem, gamma=(), seed=None, C: int = 1,
                    strict: bool = True, extra_paths=()) -> SplitSubstitution:
    """Rewrite tt on the splitting units of rho_seed.

    Exceptional paths of width below N + C get their own letters and all wider
    ones share one absorbing letter, where N is the largest exceptional width
    seen in gamma, in the images of top-stratum edges and in connecting paths.
    """
    if C < 1:
        raise PreconditionError("width cap offset must be >= 1")
    g = tt.graph
    if seed is None:
        seed = next((e for e in tt.top for e in (e,) if tt.image(e)[0] == e), None)
        if seed is None:
            raise PreconditionError("no top-stratum edge whose image starts with itself")
    if isinstance(seed, str):
        seed = g.alphabet.token(seed)
    if not tt.in_top(seed) or tt.image(seed)[0] != seed:
        raise PreconditionError(f"seed {g.fmt((seed,))} must be a top-stratum edge whose image starts with it")
    sp = Splitter(tt)
    for name, s in tt.inps:
        if not verify_nielsen(tt, s):
            raise PreconditionError(f"annotated INP {name} is not fixed: [phi({g.fmt(s)})] = {g.fmt(tt.tightened(s))}")
    for e, ax, k in tt.linear:
        if tt.image(e) != (e,) + tt.inp(ax) * k:
            raise PreconditionError(f"linear edge {g.fmt((e,))} does not map to itself times {ax}^{k}")
    for fam in sp.fams:
        if sp.delta(fam) <= 0:
            raise PreconditionError(f"exceptional family {fam.name}: only d1 > d2 is supported")
    N = 0
    for p in [tuple(gamma)] + [tuple(q) for q in extra_paths]:
        N = max(N, _max_width(sp, p))
    for e in tt.top:
        for u in sp.split(tt.image(e)):
            if u.kind == "exc":
                N = max(N, u.width)
    for _, p in tt.connecting:
        N = max(N, _max_width(sp, p))
    cap = N + C

    def norm(u: Unit) -> Unit:
        if u.kind == "exc" and u.width >= cap:
            return Unit("exc", u.ref, u.sign, cap)
        return u

    start = Unit("edge", seed)
    units = [start]
    images = {}
    todo = [start]
    while todo:
        u = todo.pop()
        img = [norm(v) for v in sp.unit_image(u)]
        images[u] = img
        for v in img:
            if v not in images and v not in todo:
                units.append(v)
                todo.append(v)
    if strict:
        for u in units:
            if u.kind in ("exc", "inp"):
                continue
            lhs = tuple(e for v in images[u] for e in sp.expand(v))
            if reduce(lhs) != lhs or lhs != tt.tightened(sp.expand(u)):
                raise IncompleteSplitting(f"image of unit {_unit_name(tt, u)} is not completely split")

    def order_key(u):
        kind = {"edge": 0, "inp": 1, "conn": 2, "exc": 3}[u.kind]
        if u.kind == "edge":
            return (kind, -tt.stratum_of(u.ref), letter_key(u.ref))
        if u.kind == "exc":
            return (kind, u.ref.name, u.sign < 0, u.width)
        return (kind, str(u.ref), u.sign < 0)

    units.sort(key=order_key)
    names = tuple(_unit_name(tt, u) for u in units)
    alph = Alphabet(names, involutive=False)
    pos = {u: i + 1 for i, u in enumerate(units)}
    zeta = Substitution(alph, tuple(tuple(pos[v] for v in images[u]) for u in units))
    absorbing = {pos[u]: u.ref for u in units if u.kind == "exc" and u.width == cap}
    types = {}
    letters = set(zeta.reachable(pos[start]))
    for e in tt.top:
        fw = Unit("edge", e) in pos and pos[Unit("edge", e)] in letters
        bw = Unit("edge", -e) in pos and pos[Unit("edge", -e)] in letters
        types[e] = 2 if fw and bw else 1
    out = SplitSubstitution(tt, seed, units, zeta, pos[start], cap, absorbing, sp, types)
    if strict:
        ind = induce(zeta, 2, pos[start])
        for W in ind.words:
            P = out.expand_word(W, cap)
            if reduce(P) != P:
                raise IncompleteSplitting(f"adjacent units {zeta.fmt(W)} cancel")
    return out


def width_cap_stability(tt: TrainTrackSystem, gamma, seed=None, C: int = 3, tol: float = 1e-9) -> bool:
    f1 = to_substitution(tt, gamma, seed, C=1).frequency(gamma)
    f2 = to_substitution(tt, gamma, seed, C=C).frequency(gamma)
    return abs(f1 - f2) < tol


def path_frequency(tt: TrainTrackSystem, gamma, seed=None) -> float:
    return to_substitution(tt, gamma, seed).frequency(gamma)


def direct_path_count(tt: TrainTrackSystem, gamma, seed, n: int) -> int:
    """Occurrences of gamma in the tightened path phi^n(seed)."""
    from .words import count_occurrences
    return count_occurrences(tuple(gamma), tt.iterate((seed,), n))
