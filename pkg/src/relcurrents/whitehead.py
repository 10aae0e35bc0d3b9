"""Whitehead graphs, cut vertices, and relative separability by Whitehead moves."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import networkx as nx

from .errors import PreconditionError
from .words import (Alphabet, CyclicWord, FreeFactorSystem, cyclic_reduce,
                    letter_key, reduce)


@dataclass(frozen=True)
class WhiteheadGraph:
    alphabet: Alphabet
    vertices: tuple
    edges: Counter = field(compare=False)      # frozenset({x, y}) -> multiplicity

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e, m in self.edges.items():
            x, y = tuple(e) if len(e) == 2 else (next(iter(e)),) * 2
            for _ in range(m):
                g.add_edge(x, y)
        return g

    def components(self) -> list:
        g = self.to_networkx()
        order = {v: i for i, v in enumerate(self.vertices)}
        comps = [sorted(c, key=order.get) for c in nx.connected_components(g)]
        return sorted(comps, key=lambda c: order[c[0]])

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def adjacency(self) -> dict:
        out = {v: [] for v in self.vertices}
        for e, m in sorted(self.edges.items(), key=lambda t: sorted(letter_key(x) for x in t[0])):
            x, y = tuple(e)
            out[x].extend([y] * m)
            out[y].extend([x] * m)
        return out

    def describe(self) -> list[str]:
        nm = self.alphabet.name
        return [f"{nm(v)}: " + " ".join(nm(u) for u in adj) for v, adj in self.adjacency().items()]


def _vertices(alphabet, letters=None):
    vs = alphabet.letters()
    if letters is not None:
        vs = [v for v in vs if abs(v) in letters]
    return tuple(vs)


def _as_cyclic(alphabet, c):
    if isinstance(c, CyclicWord):
        return c
    if isinstance(c, str):
        c = alphabet.parse(c)
    return cyclic_reduce(c)[0]


def whitehead_graph(classes, alphabet: Alphabet, letters=None) -> WhiteheadGraph:
    """Edge {x, y} for every cyclic factor x^-1 y of a class or of its inverse."""
    edges: Counter = Counter()
    for c in classes:
        c = _as_cyclic(alphabet, c)
        w = c.letters
        n = len(w)
        for i in range(n):
            u, v = w[i], w[(i + 1) % n]
            e = frozenset((-u, v))
            # the inverse class contributes v^-1 u^-1, which is the same edge
            edges[e] += 2
    vs = _vertices(alphabet, letters)
    if letters is not None:
        edges = Counter({e: m for e, m in edges.items() if all(abs(x) in letters for x in e)})
    return WhiteheadGraph(alphabet, vs, edges)


def cut_vertex(g: WhiteheadGraph):
    """First articulation point in vertex order, or None."""
    h = nx.Graph(g.to_networkx())
    aps = set(nx.articulation_points(h))
    for v in g.vertices:
        if v in aps:
            return v
    return None


def connectivity(g: WhiteheadGraph) -> list:
    return g.components()


# ---------------------------------------------------------------- fillers

def default_filler(ffs: FreeFactorSystem, f: int) -> CyclicWord:
    letters = sorted(ffs.factors[f])
    if len(letters) == 1:
        return CyclicWord((letters[0],))
    # x1^2 x2^2 ... xs^2 has a cycle as its Whitehead graph
    return CyclicWord(tuple(x for x in letters for _ in range(2)))


class NotFilling(PreconditionError):
    pass


def check_filler(ffs: FreeFactorSystem, f: int, filler: CyclicWord) -> WhiteheadGraph:
    letters = set(ffs.factors[f])
    if any(abs(x) not in letters for x in filler.letters):
        raise NotFilling(f"filler {ffs.alphabet.format(filler.letters)} leaves its factor")
    g = whitehead_graph([filler], ffs.alphabet, letters)
    if len(letters) == 1:
        if filler.letters not in ((min(letters),), (-min(letters),)):
            raise NotFilling("rank-one factor must be filled by its generator")
        return g
    if not g.is_connected() or cut_vertex(g) is not None:
        raise NotFilling(f"filler {ffs.alphabet.format(filler.letters)} does not fill its factor: "
                         + "; ".join(g.describe()))
    return g


def relative_whitehead_graph(alpha, ffs: FreeFactorSystem, fillers=None) -> WhiteheadGraph:
    alpha = _as_cyclic(ffs.alphabet, alpha)
    fl = _fillers(ffs, fillers)
    return whitehead_graph([alpha] + fl, ffs.alphabet)


def _fillers(ffs, fillers):
    out = []
    for f in range(len(ffs.factors)):
        c = None if fillers is None else fillers[f]
        c = default_filler(ffs, f) if c is None else _as_cyclic(ffs.alphabet, c)
        check_filler(ffs, f, c)
        out.append(c)
    return out


# ---------------------------------------------------------------- Whitehead moves

@dataclass(frozen=True)
class WhiteheadMove:
    multiplier: int
    Z: frozenset

    def image(self, x: int) -> tuple:
        a = self.multiplier
        if abs(x) == abs(a):
            return (x,)
        ins, outs = x in self.Z, -x in self.Z
        # x -> (a^-1 if x^-1 in Z) x (a if x in Z)
        return ((-a,) if outs else ()) + (x,) + ((a,) if ins else ())

    def apply(self, w) -> tuple:
        out = []
        for x in w:
            out.extend(self.image(x))
        return reduce(out)

    def apply_cyclic(self, c: CyclicWord) -> CyclicWord:
        return cyclic_reduce(self.apply(c.letters))[0]

    def describe(self, alphabet: Alphabet) -> str:
        zs = " ".join(alphabet.name(z) for z in sorted(self.Z, key=letter_key))
        return f"({alphabet.name(self.multiplier)}; {{{zs}}})"


def all_moves(alphabet: Alphabet):
    letters = alphabet.letters()
    for a in letters:
        rest = [x for x in letters if abs(x) != abs(a)]
        for mask in range(1 << len(rest)):
            Z = {a} | {rest[i] for i in range(len(rest)) if mask >> i & 1}
            yield WhiteheadMove(a, frozenset(Z))


def total_length(classes) -> int:
    return sum(len(c) for c in classes)


def basis_split(classes, alphabet: Alphabet):
    """A partition of the basis letters into two nonempty sets with every class
    inside one of them, or None."""
    parent = {x: x for x in range(1, alphabet.rank + 1)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in classes:
        xs = [abs(x) for x in c.letters]
        for y in xs[1:]:
            parent[find(y)] = find(xs[0])
    groups: dict = {}
    for x in range(1, alphabet.rank + 1):
        groups.setdefault(find(x), []).append(x)
    if len(groups) < 2:
        return None
    gs = sorted(groups.values())
    first = gs[0]
    rest = sorted(x for g in gs[1:] for x in g)
    return (tuple(first), tuple(rest))


@dataclass
class SeparabilityVerdict:
    kind: str                      # "NotSeparable", "Separable", "Inconclusive"
    graph: WhiteheadGraph
    moves: list = field(default_factory=list)
    partition: tuple | None = None
    final_classes: list = field(default_factory=list)
    note: str = ""

    def __str__(self):
        return self.kind

    def describe(self) -> list[str]:
        A = self.graph.alphabet
        out = [f"verdict: {self.kind}"]
        if self.kind == "NotSeparable":
            out.append("certificate: relative Whitehead graph is connected with no cut vertex")
        if self.moves:
            out.append("moves: " + " ".join(m.describe(A) for m in self.moves))
        if self.partition:
            p1, p2 = self.partition
            out.append("factorization: <" + ",".join(A.names[x - 1] for x in p1) + "> * <"
                       + ",".join(A.names[x - 1] for x in p2) + ">")
        if self.final_classes:
            out.append("classes after moves: " + ", ".join(A.format(c.letters) for c in self.final_classes))
        if self.note:
            out.append(self.note)
        return out


def _reducing_move(g: WhiteheadGraph, classes):
    """A Whitehead move that strictly shortens the collection, read off a cut
    vertex or a component missing some inverse; None when Wh is 2-connected."""
    comps = g.components()
    if len(comps) > 1:
        for K in comps:
            for x in K:
                if -x not in K:
                    return WhiteheadMove(-x, frozenset(-y for y in K))
        return None
    v = cut_vertex(g)
    if v is None:
        return None
    h = nx.Graph(g.to_networkx())
    h.remove_node(v)
    for K in nx.connected_components(h):
        if -v not in K:
            # with the image convention above the shortening move uses the
            # inverse multiplier and the inverted component
            return WhiteheadMove(-v, frozenset({-v} | {-y for y in K}))
    return None


def decide_separable(alpha, ffs: FreeFactorSystem, fillers=None, max_rank: int = 5,
                     budget: int = 10 ** 6) -> SeparabilityVerdict:
    A = ffs.alphabet
    alpha = _as_cyclic(A, alpha)
    if not ffs.is_relative_class(alpha):
        raise PreconditionError(f"{A.format(alpha.letters)} is conjugate into a factor")
    classes = [alpha] + _fillers(ffs, fillers)
    g0 = whitehead_graph(classes, A)
    if A.rank > max_rank:
        return SeparabilityVerdict("Inconclusive", g0, note=f"rank {A.rank} exceeds bound {max_rank}")
    moves = []
    work = 0
    g = g0
    while True:
        split = basis_split(classes, A)
        if split is not None:
            return SeparabilityVerdict("Separable", g0, moves, split, classes)
        if g.is_connected() and cut_vertex(g) is None:
            if moves:
                note = "certificate holds after the recorded moves"
            else:
                note = ""
            return SeparabilityVerdict("NotSeparable", g0 if not moves else g, moves,
                                       final_classes=classes if moves else [], note=note)
        m = _reducing_move(g, classes)
        if m is None:
            return SeparabilityVerdict("Inconclusive", g0, moves, note="no reducing move found")
        new = [m.apply_cyclic(c) for c in classes]
        if total_length(new) >= total_length(classes):
            return SeparabilityVerdict("Inconclusive", g0, moves, note="move did not shorten the collection")
        classes = new
        moves.append(m)
        work += total_length(classes) * len(A.letters())
        if work > budget:
            return SeparabilityVerdict("Inconclusive", g0, moves, note="budget exhausted")
        g = whitehead_graph(classes, A)


def verify_witness(alpha, ffs: FreeFactorSystem, verdict: SeparabilityVerdict, fillers=None) -> bool:
    """Re-apply the recorded moves and check each class lands in one part."""
    if verdict.kind != "Separable":
        return False
    A = ffs.alphabet
    classes = [_as_cyclic(A, alpha)] + _fillers(ffs, fillers)
    for m in verdict.moves:
        classes = [m.apply_cyclic(c) for c in classes]
    p1, p2 = map(set, verdict.partition)
    return all({abs(x) for x in c.letters} <= p1 or {abs(x) for x in c.letters} <= p2 for c in classes)


def mrc_membership(alpha, ffs: FreeFactorSystem, fillers=None) -> tuple:
    """(in MRC(A) flag or None, verdict): the rational current of alpha lies in
    the closure of separable classes iff alpha is separable."""
    v = decide_separable(alpha, ffs, fillers)
    flag = {"Separable": True, "NotSeparable": False}.get(v.kind)
    return flag, v
