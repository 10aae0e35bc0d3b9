"""Stable currents, goodness, iteration of classes and the north-south experiment."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import ConvergenceError, PreconditionError
from .traintrack import (TrainTrackSystem, _paths, classify_turns, critical_length,
                         r_illegal_positions, r_length, tighten_cyclic, to_substitution)
from .words import FreeFactorSystem, canonical, invert, word_key


class TruncationError(ConvergenceError):
    pass


def crossing_paths(tt: TrainTrackSystem, max_len: int = 4) -> list:
    """Reduced edge paths of length <= max_len that cross the top stratum."""
    g = tt.graph
    ps = _paths(g, set(range(1, g.alphabet.rank + 1)), max_len)
    return [p for p in ps if any(tt.in_top(e) for e in p)]


# ---------------------------------------------------------------- path tables

@dataclass
class PathTable:
    """Values on reduced paths, one of each pair {v, v^-1} stored."""

    tt: TrainTrackSystem
    values: dict

    def __getitem__(self, v):
        if isinstance(v, str):
            v = self.tt.graph.alphabet.parse(v)
        return self.values.get(canonical(tuple(v)), 0.0)

    def normalized(self) -> "PathTable":
        m = max(self.values.values(), default=0.0)
        if m <= 0:
            raise PreconditionError("table vanishes on the window; cannot normalize")
        return PathTable(self.tt, {v: x / m for v, x in self.values.items()})

    def kirchhoff(self) -> dict:
        """v -> residual of eta(v) = sum over edges e leaving end(v) of eta(ve)."""
        g = self.tt.graph
        top = max((len(v) for v in self.values), default=0)
        out = {}
        for v in self.values:
            for w in (v, invert(v)):
                if len(w) >= top:
                    continue
                ext = [w + (e,) for e in g.directions(g.end(w[-1])) if e != -w[-1]]
                out[w] = self[w] - sum(self[u] for u in ext)
        return out

    def rows(self):
        A = self.tt.graph.alphabet
        return [(A.format(v), self.values[v]) for v in sorted(self.values, key=word_key)]


def distance(t1: PathTable, t2: PathTable) -> float:
    keys = set(t1.values) | set(t2.values)
    return max((abs(t1.values.get(v, 0.0) - t2.values.get(v, 0.0)) for v in keys), default=0.0)


@dataclass
class StableCurrentResult:
    table: PathTable
    seed: int
    lam: float
    window: list
    directed: dict        # v -> d_{v, seed}

    def kirchhoff_max(self) -> float:
        return max((abs(r) for r in self.table.kirchhoff().values()), default=0.0)


def stable_current(tt: TrainTrackSystem, seed=None, window=None, max_len: int = 4,
                   tol: float = 1e-11, C: int = 1) -> StableCurrentResult:
    """eta(v) = d_{v,a} + d_{v^-1,a} on a window of paths crossing the top stratum."""
    if tt.lam is None or tt.lam <= 1:
        raise PreconditionError("top stratum must be exponentially growing")
    if window is None:
        window = crossing_paths(tt, max_len)
    window = [tuple(v) for v in window]
    both = sorted({canonical(v) for v in window} | {invert(canonical(v)) for v in window},
                  key=word_key)
    S = to_substitution(tt, (), seed, C=C, extra_paths=both)
    d = S.path_frequencies(both, tol)
    vals = {}
    for v in {canonical(v) for v in window}:
        vals[v] = d[v] + d[invert(v)]
    return StableCurrentResult(PathTable(tt, vals), S.seed_edge, tt.lam, window, d)


# ---------------------------------------------------------------- goodness

@dataclass
class GoodnessReport:
    l_r: float
    i_r: int
    L_r: float
    g_r: float
    b_r: float
    critical: float

    @property
    def goodness(self) -> float:
        return self.g_r / self.l_r if self.l_r else 0.0


def _bad_measure(points, circ, L):
    """Measure of the union of closed L-balls around points on a circle."""
    if not points:
        return 0.0
    if 2 * L >= circ:
        return circ
    pts = sorted(points)
    total = 0.0
    n = len(pts)
    for i in range(n):
        gap = (pts[(i + 1) % n] - pts[i]) % circ if n > 1 else circ
        total += min(gap, 2 * L)
    return min(total, circ)


def goodness(tt: TrainTrackSystem, alpha, Lc: float | None = None, turns=None) -> GoodnessReport:
    """Goodness of a loop: share of its r-length farther than Lc from r-illegal turns."""
    if isinstance(alpha, str):
        alpha = tt.graph.alphabet.parse(alpha)
    alpha = tuple(alpha)
    if not tt.graph.is_loop(alpha) or tighten_cyclic(alpha) != alpha:
        raise PreconditionError("goodness needs a cyclically reduced loop")
    if not any(tt.in_top(e) for e in alpha):
        raise PreconditionError("loop has zero r-length in the top stratum")
    turns = turns or classify_turns(tt)
    if Lc is None:
        Lc = critical_length(tt)
    lens = [r_length(tt, (e,)) for e in alpha]
    cum = [0.0]
    for x in lens:
        cum.append(cum[-1] + x)
    circ = cum[-1]
    pos = r_illegal_positions(tt, alpha, turns, cyclic=True)
    pts = [cum[i % len(alpha)] for i in pos]
    if pts:
        # longest legal stretch between consecutive illegal turns
        s = sorted(pts)
        L_r = max(((s[(i + 1) % len(s)] - s[i]) % circ or circ) for i in range(len(s)))
    else:
        L_r = circ
    b = _bad_measure(pts, circ, Lc)
    return GoodnessReport(circ, len(pts), L_r, circ - b, b, Lc)


# ---------------------------------------------------------------- exact counting on iterates

class _Cancels(Exception):
    pass


@dataclass
class _Sum:
    counts: Counter
    length: int
    rlen: float
    illegal: int
    prefix: tuple
    suffix: tuple


class _Counter:
    """Counts of window paths (and r-illegal turns) in phi^n of a loop,
    computed from per-edge summaries; valid while no cancellation occurs."""

    def __init__(self, tt: TrainTrackSystem, targets, turns):
        self.tt = tt
        self.targets = set(targets)
        self.m = max(len(t) for t in self.targets)
        self.turns = turns
        self.level = {}
        for e in range(1, tt.graph.alphabet.rank + 1):
            self.level[e] = self._single(e)
        self.n = 0

    def _illegal(self, x, y):
        t = (-x, y)
        return self.turns.is_illegal(t) and (self.tt.in_top(x) or self.tt.in_top(y))

    def _single(self, e):
        c = Counter({(e,): 1}) if (e,) in self.targets else Counter()
        return _Sum(c, 1, r_length(self.tt, (e,)), 0, (e,), (e,))

    def get(self, x) -> _Sum:
        s = self.level[abs(x)]
        if x > 0:
            return s
        c = Counter({invert(w): k for w, k in s.counts.items()})
        return _Sum(c, s.length, s.rlen, s.illegal, invert(s.suffix), invert(s.prefix))

    def combine(self, a: _Sum, b: _Sum) -> _Sum:
        if a.suffix[-1] == -b.prefix[0]:
            raise _Cancels()
        c = a.counts + b.counts
        cross = a.suffix + b.prefix
        k = len(a.suffix)
        for l in range(2, self.m + 1):
            for st in range(max(0, k - l + 1), k):
                if st + l > len(cross):
                    break
                u = cross[st:st + l]
                if u in self.targets:
                    c[u] += 1
        ill = a.illegal + b.illegal + self._illegal(a.suffix[-1], b.prefix[0])
        keep = self.m - 1 if self.m > 1 else 1
        pre = (a.prefix + b.prefix)[:keep] if a.length < keep else a.prefix
        suf = (a.suffix + b.suffix)[-keep:] if b.length < keep else b.suffix
        return _Sum(c, a.length + b.length, a.rlen + b.rlen, ill, pre, suf)

    def step(self):
        new = {}
        for e in range(1, self.tt.graph.alphabet.rank + 1):
            img = self.tt.image(e)
            s = self.get(img[0])
            for x in img[1:]:
                s = self.combine(s, self.get(x))
            new[e] = s
        self.level = new
        self.n += 1

    def loop(self, alpha) -> _Sum:
        s = self.get(alpha[0])
        for x in alpha[1:]:
            s = self.combine(s, self.get(x))
        # close up the loop
        if s.length < self.m or s.suffix[-1] == -s.prefix[0]:
            raise _Cancels()
        c = Counter(s.counts)
        cross = s.suffix + s.prefix
        k = len(s.suffix)
        for l in range(2, self.m + 1):
            for st in range(max(0, k - l + 1), k):
                u = cross[st:st + l]
                if len(u) == l and u in self.targets:
                    c[u] += 1
        ill = s.illegal + self._illegal(s.suffix[-1], s.prefix[0])
        return _Sum(c, s.length, s.rlen, ill, s.prefix, s.suffix)


def loop_coordinates(tt, loop, window) -> PathTable:
    """eta_alpha(v) = occurrences of v and of v^-1 in the cyclic loop."""
    n = len(loop)
    m = max(len(v) for v in window)
    text = tuple(loop) * (1 + -(-(m - 1) // n))
    text = text[:n + m - 1]
    cnt = Counter()
    for l in {len(v) for v in window}:
        for i in range(n):
            cnt[text[i:i + l]] += 1
    vals = {}
    for v in {canonical(v) for v in window}:
        vals[v] = float(cnt[v] + cnt[invert(v)])
    return PathTable(tt, vals)


@dataclass
class IterateRecord:
    n: int
    length: int
    loop: tuple | None
    report: GoodnessReport | None
    coords: PathTable


def iterate_class(tt: TrainTrackSystem, alpha, n: int, window=None, max_len: int = 4,
                  cap: int = 10 ** 6, Lc: float | None = None) -> list:
    """Records for phi^0(alpha) ... phi^n(alpha) (cyclically tightened).

    Loops that keep growing without cancellation are tracked through exact
    window counts instead of being written out.
    """
    if isinstance(alpha, str):
        alpha = tt.graph.alphabet.parse(alpha)
    alpha = tighten_cyclic(tuple(alpha))
    if window is None:
        window = crossing_paths(tt, max_len)
    targets = {tuple(v) for v in window} | {invert(tuple(v)) for v in window}
    turns = classify_turns(tt)
    if Lc is None:
        Lc = critical_length(tt)
    out = []
    cur = alpha
    fast = None
    for k in range(n + 1):
        if cur is not None:
            rep = goodness(tt, cur, Lc, turns) if any(tt.in_top(e) for e in cur) else None
            out.append(IterateRecord(k, len(cur), cur, rep, loop_coordinates(tt, cur, window)))
            if k == n:
                break
            nxt = tighten_cyclic(tt.apply(cur))
            if len(nxt) <= cap:
                cur = nxt
                continue
            # switch to summaries of phi^k on edges; the next pass steps once more
            fast = _Counter(tt, targets, turns)
            try:
                for _ in range(k):
                    fast.step()
            except _Cancels:
                raise TruncationError(f"iterate {k + 1} exceeds {cap} edges and cancels; cannot count exactly")
            cur = None
            continue
        try:
            fast.step()
        except _Cancels:
            raise TruncationError(f"iterate {k} exceeds {cap} edges and cancels; cannot count exactly")
        try:
            s = fast.loop(alpha)
        except _Cancels:
            raise TruncationError(f"iterate {k} exceeds {cap} edges and cancels; cannot count exactly")
        vals = {v: float(s.counts[v] + s.counts[invert(v)]) for v in {canonical(v) for v in window}}
        rep = None
        if s.illegal == 0:
            rep = GoodnessReport(s.rlen, 0, s.rlen, s.rlen, 0.0, Lc)
        out.append(IterateRecord(k, s.length, None, rep, PathTable(tt, vals)))
    return out


# ---------------------------------------------------------------- inverses and backward probes

def verify_inverse(fwd: TrainTrackSystem, bwd: TrainTrackSystem) -> bool:
    """Both compositions tighten to the identity on every generator (roses only)."""
    if not (fwd.graph.is_rose and bwd.graph.is_rose):
        raise PreconditionError("inverse check needs rose representatives")
    if fwd.graph.alphabet != bwd.graph.alphabet:
        return False
    for e in range(1, fwd.graph.alphabet.rank + 1):
        if bwd.tightened(fwd.image(e)) != (e,) or fwd.tightened(bwd.image(e)) != (e,):
            return False
    return True


@dataclass
class BackwardProbe:
    trace: list               # (n, i_r, l_r, L_r)
    applicable: bool
    note: str = ""

    def band(self):
        rs = [l / i for _, i, l, _ in self.trace if i]
        return (min(rs), max(rs)) if rs else None


def backward_growth_probe(bwd: TrainTrackSystem, alpha, n: int, fwd: TrainTrackSystem,
                          L0: float | None = None, cap: int = 10 ** 6) -> BackwardProbe:
    """Count r-illegal turns of phi along forward iterates of the inverse map."""
    A = fwd.graph.alphabet
    if isinstance(alpha, str):
        alpha = A.parse(alpha)
    alpha = tighten_cyclic(tuple(alpha))
    turns = classify_turns(fwd)

    def measure(loop):
        pos = r_illegal_positions(fwd, loop, turns, cyclic=True)
        rl = r_length(fwd, loop)
        cum = [0.0]
        for e in loop:
            cum.append(cum[-1] + r_length(fwd, (e,)))
        pts = sorted(cum[i % len(loop)] for i in pos)
        if pts:
            Lr = max(((pts[(i + 1) % len(pts)] - pts[i]) % rl or rl) for i in range(len(pts)))
        else:
            Lr = rl
        return len(pos), rl, Lr

    i0, l0, Lr0 = measure(alpha)
    if i0 < 5 or (L0 is not None and Lr0 > L0):
        return BackwardProbe([(0, i0, l0, Lr0)], False,
                             "needs at least 5 r-illegal turns" if i0 < 5 else f"longest legal segment {Lr0:.6g} > {L0}")
    trace = [(0, i0, l0, Lr0)]
    cur = alpha
    for k in range(1, n + 1):
        cur = tighten_cyclic(bwd.apply(cur))
        if len(cur) > cap:
            return BackwardProbe(trace, True, f"stopped at iterate {k}: length exceeds {cap}")
        trace.append((k,) + measure(cur))
    return BackwardProbe(trace, True)


# ---------------------------------------------------------------- north-south experiment

@dataclass
class NSStep:
    n: int
    direction: str
    distance: float | None
    goodness: float | None
    length: int


@dataclass
class NSExperimentReport:
    steps: list
    verdict: str
    eps: float
    separable: str | None = None
    notes: list = field(default_factory=list)

    def distances(self, direction="forward"):
        return [s.distance for s in self.steps if s.direction == direction]

    def goodness_trace(self, direction="forward"):
        return [s.goodness for s in self.steps if s.direction == direction]

    def to_csv(self) -> str:
        lines = ["n,direction,distance,goodness,length"]
        for s in self.steps:
            d = "" if s.distance is None else f"{s.distance:.12g}"
            g = "" if s.goodness is None else f"{s.goodness:.12g}"
            lines.append(f"{s.n},{s.direction},{d},{g},{s.length}")
        return "\n".join(lines) + "\n"


def lower_factor_system(tt: TrainTrackSystem) -> FreeFactorSystem:
    """On a rose the lower strata span one free factor."""
    if not tt.graph.is_rose:
        raise PreconditionError("factor system is only derived automatically on roses")
    low = tuple(e for s in tt.strata[:-1] for e in s)
    return FreeFactorSystem(tt.graph.alphabet, (frozenset(low),) if low else ())


def _converged(ds, eps, k=3):
    return len(ds) >= k and all(d is not None and d < eps for d in ds[-k:])


def ns_experiment(fwd: TrainTrackSystem, bwd: TrainTrackSystem | None, alpha, window=None,
                  n_max: int = 12, eps: float = 1e-3, max_len: int = 4, seed=None,
                  check_separable: bool = True, cap: int = 10 ** 6) -> NSExperimentReport:
    A = fwd.graph.alphabet
    if isinstance(alpha, str):
        alpha = A.parse(alpha)
    alpha = tighten_cyclic(tuple(alpha))
    notes = []
    sep = None
    if not any(fwd.in_top(e) for e in alpha):
        raise PreconditionError("class does not cross the top stratum")
    if check_separable:
        from .whitehead import decide_separable
        v = decide_separable(alpha, lower_factor_system(fwd))
        sep = v.kind
        if v.kind != "Separable":
            raise PreconditionError(f"class is not shown separable ({v.kind})")
    if bwd is not None and not verify_inverse(fwd, bwd):
        raise PreconditionError("backward map is not an inverse of the forward map")
    if window is None:
        window = crossing_paths(fwd, max_len)
    plus = stable_current(fwd, seed, window).table.normalized()
    steps = []
    for rec in iterate_class(fwd, alpha, n_max, window, cap=cap):
        d = distance(rec.coords.normalized(), plus)
        g = rec.report.goodness if rec.report else None
        steps.append(NSStep(rec.n, "forward", d, g, rec.length))
    if bwd is not None:
        minus = None
        try:
            minus = stable_current(bwd, None, crossing_paths(bwd, max_len)).table.normalized()
        except PreconditionError as exc:
            notes.append(f"no unstable current from the backward map: {exc}")
        cur = alpha
        for k in range(n_max + 1):
            if k:
                cur = tighten_cyclic(bwd.apply(cur))
            if len(cur) > cap:
                notes.append(f"backward iteration stopped at {k}: length exceeds {cap}")
                break
            d = None
            if minus is not None:
                d = distance(loop_coordinates(bwd, cur, crossing_paths(bwd, max_len)).normalized(), minus)
            dp = distance(loop_coordinates(fwd, cur, window).normalized(), plus)
            steps.append(NSStep(k, "backward", d, None, len(cur)))
            steps.append(NSStep(k, "backward-to-plus", dp, None, len(cur)))
    fd = [s.distance for s in steps if s.direction == "forward"]
    bd = [s.distance for s in steps if s.direction == "backward"]
    if _converged(fd, eps):
        verdict = "forward"
    elif _converged(bd, eps):
        verdict = "backward"
    else:
        verdict = "inconclusive"
    return NSExperimentReport(steps, verdict, eps, sep, notes)
