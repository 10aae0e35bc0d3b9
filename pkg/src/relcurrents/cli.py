"""System files and the command line.

A system file is line based; ``#`` starts a comment::

    kind: substitution | automorphism | graph
    letters: a b c                  # substitution / rose modes, lowercase
    vertex v w u                    # graph mode
    edge e1 = v v                   # graph mode: start and end vertex
    rule b = bac                    # or: map e4 = e5 ~e3 ~e5 e1 e4
    factor A1 = a b
    stratum H1 = a b                # bottom-up; optional
    inp s = abAB
    linear c axis s exp 2           # phi(c) = c s^2
    exceptional x = c s d           # paths c s^m d^-1

Automorphism files without rules are allowed; they only describe a free
factor system (enough for ``current`` and ``whitehead``).
"""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .words import Alphabet, FreeFactorSystem, WordError, cyclic_reduce, word_key

FIXTURES = Path(__file__).parent / "fixtures"
KINDS = ("substitution", "automorphism", "graph")


class SystemFileError(PreconditionError):
    pass


@dataclass(frozen=True)
class SystemFile:
    kind: str
    letters: tuple = ()
    vertices: tuple = ()
    edges: tuple = ()            # (name, start, end)
    rules: tuple = ()            # (name, word) in letter order
    factors: tuple = ()          # (name, letter names)
    strata: tuple = ()           # (name, letter names)
    inps: tuple = ()             # (name, word)
    linear: tuple = ()           # (edge, axis, exponent)
    exceptional: tuple = ()      # (name, e1, axis, e2)

    @property
    def names(self) -> tuple:
        return tuple(e[0] for e in self.edges) if self.kind == "graph" else self.letters

    def alphabet(self) -> Alphabet:
        return Alphabet(self.names, involutive=self.kind != "substitution")

    def has_map(self) -> bool:
        return bool(self.rules)

    def substitution(self):
        from .substitution import Substitution
        if self.kind != "substitution":
            raise PreconditionError(f"a substitution is needed, got a {self.kind} file")
        return Substitution(self.alphabet(), tuple(w for _, w in self.rules))

    def graph(self):
        from .traintrack import MarkedGraph
        A = self.alphabet()
        if self.kind == "automorphism":
            return MarkedGraph.rose(A)
        if self.kind != "graph":
            raise PreconditionError("substitution files have no graph")
        vi = {v: i for i, v in enumerate(self.vertices)}
        return MarkedGraph(A, self.vertices, tuple((vi[s], vi[t]) for _, s, t in self.edges))

    def train_track(self):
        from .traintrack import ExceptionalFamily, TrainTrackSystem
        if not self.rules:
            raise PreconditionError("system file has no rules")
        A = self.alphabet()
        tok = A.token
        strata = tuple(tuple(tok(x) for x in s) for _, s in self.strata) or None
        return TrainTrackSystem.build(
            self.graph(), [w for _, w in self.rules], strata, self.inps,
            tuple((tok(e), ax, k) for e, ax, k in self.linear),
            tuple(ExceptionalFamily(n, tok(e1), ax, tok(e2)) for n, e1, ax, e2 in self.exceptional))

    def factor_system(self) -> FreeFactorSystem:
        return FreeFactorSystem.from_names(self.alphabet(), [f for _, f in self.factors])


_LINE = re.compile(r"^(\w+)\s+(\S+)\s*=\s*(.*)$")


def parse_system(text: str) -> SystemFile:
    recs = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            recs.append((n, line))
    if not recs:
        raise SystemFileError("empty system file")

    def err(n, msg):
        return SystemFileError(f"line {n}: {msg}")

    kind = None
    letters = None
    vertices: list = []
    edges: list = []
    body = []
    for n, line in recs:
        if line.startswith("kind:"):
            if kind is not None:
                raise err(n, "duplicate kind")
            kind = line[5:].strip()
            if kind not in KINDS:
                raise err(n, f"unknown kind {kind!r}")
        elif line.startswith("letters:"):
            if letters is not None:
                raise err(n, "duplicate letters line")
            letters = tuple(line[8:].split())
            for x in letters:
                if not (len(x) == 1 and x.islower()):
                    raise err(n, f"letter {x!r} must be a single lowercase character")
            if len(set(letters)) != len(letters):
                raise err(n, "repeated letter")
        elif line.startswith("vertex ") or line.startswith("vertices "):
            for v in line.split()[1:]:
                if v in vertices:
                    raise err(n, f"duplicate vertex {v}")
                vertices.append(v)
        elif line.startswith("edge "):
            m = _LINE.match(line)
            ends = m.group(3).split() if m else []
            if not m or len(ends) != 2:
                raise err(n, "expected 'edge NAME = START END'")
            name = m.group(2)
            if name.startswith("~") or any(name == e[0] for e in edges):
                raise err(n, f"bad or duplicate edge name {name!r}")
            for v in ends:
                if v not in vertices:
                    raise err(n, f"undeclared vertex {v!r}")
            edges.append((name, ends[0], ends[1]))
        else:
            body.append((n, line))
    if kind is None:
        raise err(recs[0][0], "missing 'kind:' line")
    if kind == "graph":
        if letters is not None:
            raise err(recs[0][0], "graph files declare edges, not letters")
        if not edges:
            raise err(recs[0][0], "graph file declares no edges")
        names = tuple(e[0] for e in edges)
    else:
        if edges or vertices:
            raise err(recs[0][0], f"{kind} files do not take vertices or edges")
        if not letters:
            raise err(recs[0][0], "missing 'letters:' line")
        names = letters
    try:
        A = Alphabet(names, involutive=kind != "substitution")
    except WordError as exc:
        raise err(recs[0][0], str(exc))

    def word(n, text):
        try:
            return A.parse(text)
        except WordError as exc:
            raise err(n, str(exc))

    def letter(n, x):
        if x not in names:
            raise err(n, f"undeclared letter {x!r}")
        return x

    rules: dict = {}
    factors, strata, inps, linear, exceptional = [], [], [], [], []
    for n, line in body:
        head = line.split()[0]
        if head in ("rule", "map"):
            m = _LINE.match(line)
            if not m:
                raise err(n, "expected 'rule NAME = WORD'")
            x = letter(n, m.group(2))
            if x in rules:
                raise err(n, f"duplicate rule for {x}")
            w = word(n, m.group(3))
            if not w:
                raise err(n, f"empty image for {x}")
            rules[x] = w
        elif head in ("factor", "stratum"):
            m = _LINE.match(line)
            if not m:
                raise err(n, f"expected '{head} NAME = LETTERS'")
            xs = m.group(3).split()
            if len(xs) == 1 and kind != "graph":
                xs = list(xs[0])
            xs = tuple(letter(n, x) for x in xs)
            (factors if head == "factor" else strata).append((m.group(2), xs))
        elif head == "inp":
            m = _LINE.match(line)
            if not m:
                raise err(n, "expected 'inp NAME = WORD'")
            inps.append((m.group(2), word(n, m.group(3))))
        elif head == "linear":
            t = line.split()
            if len(t) != 6 or t[2] != "axis" or t[4] != "exp":
                raise err(n, "expected 'linear EDGE axis NAME exp K'")
            try:
                k = int(t[5])
            except ValueError:
                raise err(n, f"bad exponent {t[5]!r}")
            linear.append((letter(n, t[1]), t[3], k))
        elif head == "exceptional":
            m = _LINE.match(line)
            parts = m.group(3).split() if m else []
            if len(parts) != 3:
                raise err(n, "expected 'exceptional NAME = E1 AXIS E2'")
            exceptional.append((m.group(2), letter(n, parts[0]), parts[1], letter(n, parts[2])))
        else:
            raise err(n, f"unknown directive {head!r}")
    if rules and set(rules) != set(names):
        missing = [x for x in names if x not in rules]
        raise err(recs[-1][0], "missing rules for " + " ".join(missing))
    if not rules and kind != "automorphism":
        raise err(recs[-1][0], "no rules given")
    inp_names = {nm for nm, _ in inps}
    for e, ax, _ in linear:
        if ax not in inp_names:
            raise SystemFileError(f"linear edge {e} refers to unknown axis {ax!r}")
    seen = set()
    for _, f in factors:
        if seen & set(f):
            raise SystemFileError("factors share letters")
        seen |= set(f)
    return SystemFile(kind, letters or (), tuple(vertices), tuple(edges),
                      tuple((x, rules[x]) for x in names if x in rules),
                      tuple(factors), tuple(strata), tuple(inps), tuple(linear), tuple(exceptional))


def serialize_system(sf: SystemFile) -> str:
    A = sf.alphabet()
    out = [f"kind: {sf.kind}"]
    if sf.kind == "graph":
        out.append("vertex " + " ".join(sf.vertices))
        out += [f"edge {n} = {s} {t}" for n, s, t in sf.edges]
    else:
        out.append("letters: " + " ".join(sf.letters))
    key = "map" if sf.kind == "graph" else "rule"
    out += [f"{key} {x} = {A.format(w)}" for x, w in sf.rules]
    out += [f"factor {n} = {' '.join(f)}" for n, f in sf.factors]
    out += [f"stratum {n} = {' '.join(f)}" for n, f in sf.strata]
    out += [f"inp {n} = {A.format(w)}" for n, w in sf.inps]
    out += [f"linear {e} axis {ax} exp {k}" for e, ax, k in sf.linear]
    out += [f"exceptional {n} = {e1} {ax} {e2}" for n, e1, ax, e2 in sf.exceptional]
    return "\n".join(out) + "\n"


def load_system(path) -> SystemFile:
    p = Path(path)
    if not p.exists() and (FIXTURES / path).exists():
        p = FIXTURES / path
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc}")
    try:
        return parse_system(text)
    except SystemFileError as exc:
        raise SystemFileError(f"{p.name}: {exc}")


# ---------------------------------------------------------------- output

def fmt_num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0:
            return "0"
        return f"{x:.12g}"
    if isinstance(x, complex):
        return f"{x.real:.12g}{x.imag:+.12g}j"
    return "" if x is None else str(x)


def emit(args, header, rows, title=None):
    rows = [[fmt_num(v) for v in r] for r in rows]
    if args.format == "table":
        w = [max([len(str(h))] + [len(r[i]) for r in rows]) for i, h in enumerate(header)]
        lines = [] if title is None else [title]
        lines.append("  ".join(str(h).ljust(w[i]) for i, h in enumerate(header)).rstrip())
        lines += ["  ".join(c.ljust(w[i]) for i, c in enumerate(r)).rstrip() for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _matrix_rows(tm):
    return [[lab] + list(row) for lab, row in zip(tm.labels, tm.entries.tolist())]


# ---------------------------------------------------------------- subcommands

def _system_matrix(sf):
    from .substitution import TransitionMatrix, block_order, transition_matrix
    if sf.kind == "substitution":
        zeta = sf.substitution()
        return transition_matrix(zeta, block_order(zeta))
    tt = sf.train_track()
    order = [e for s in reversed(tt.strata) for e in s]
    A = sf.alphabet()
    return TransitionMatrix(tuple(order), tuple(A.name(e) for e in order), tt.transition_matrix(order))


def _seed(sf, name):
    A = sf.alphabet()
    return A.token(name) if name else None


def cmd_matrix(args):
    """CSV: row label then one column per letter; M(x, y) = occurrences of x in the image of y."""
    from .substitution import induce
    tm = _system_matrix(sf := load_system(args.system))
    emit(args, [""] + list(tm.labels), _matrix_rows(tm))
    if args.induce:
        zeta = sf.substitution()
        seed = _seed(sf, args.seed) or tm.keys[0]
        ind = induce(zeta, args.induce, seed)
        if args.format == "table":
            sys.stdout.write("\n")
        emit(args, [""] + list(ind.matrix.labels), _matrix_rows(ind.matrix))


def cmd_spectrum(args):
    """CSV: matrix, real, imag, modulus, matched."""
    from .substitution import compare_spectra, induce
    sf = load_system(args.system)
    tm = _system_matrix(sf)
    l = args.depth or 2
    zeta = sf.substitution()
    seed = _seed(sf, args.seed) or tm.keys[0]
    ind = induce(zeta, l, seed)
    rep = compare_spectra(tm.entries, ind.matrix.entries, args.tol or 1e-6)
    rows = [["M", z.real, z.imag, abs(z), all(z != u for u in rep.unmatched)] for z in rep.eig_m]
    partners = [nu for _, nu in rep.matched]
    rows += [[f"M{l}", z.real, z.imag, abs(z), any(z == nu for nu in partners)] for z in rep.eig_ml]
    emit(args, ["matrix", "real", "imag", "modulus", "matched"], rows)
    print(f"# containment {'ok' if rep.ok else 'FAILED'}; largest unmatched modulus {fmt_num(rep.max_extra_modulus)}",
          file=sys.stderr)


def cmd_induce(args):
    """CSV: word, image (factors joined by '.')."""
    from .substitution import induce
    sf = load_system(args.system)
    zeta = sf.substitution()
    seed = _seed(sf, args.seed) or _system_matrix(sf).keys[0]
    ind = induce(zeta, args.depth or 2, seed)
    emit(args, ["word", "image"], [[ind.fmt(w), ".".join(ind.fmt(u) for u in ind.rules[w])] for w in ind.words])


def cmd_fixed_point(args):
    """Prints a prefix of the fixed word of the seed letter."""
    from .substitution import fixed_point_prefix, seed_data
    sf = load_system(args.system)
    if sf.kind == "substitution":
        zeta = sf.substitution()
        seed = _seed(sf, args.seed) or _system_matrix(sf).keys[0]
        _, _, a, work = seed_data(zeta, seed)
        w = fixed_point_prefix(work, a, length=args.length)
        print(zeta.fmt(w[:args.length]))
    else:
        tt = sf.train_track()
        e = _seed(sf, args.seed) or tt.top[0]
        p = (e,)
        while len(p) < args.length:
            q = tt.tightened(p)
            if q[:len(p)] != p:
                raise PreconditionError(f"image of {tt.fmt((e,))} does not start with it")
            if len(q) == len(p):
                break
            p = q
        print(tt.fmt(p[:args.length]))


def cmd_freq(args):
    """CSV: word, frequency d_{w,seed}; zero rows are omitted unless --all."""
    sf = load_system(args.system)
    L = args.window or 2
    tol = args.tol or 1e-11
    if sf.kind == "substitution":
        from .substitution import crossing_window, frequencies
        zeta = sf.substitution()
        seed = _seed(sf, args.seed) or _system_matrix(sf).keys[0]
        win = [zeta.alphabet.parse(w) for w in args.words] if args.words else crossing_window(zeta, seed, L)
        tab = frequencies(zeta, seed, win, method=args.method, tol=tol, max_iter=args.max_iter or 500)
        vals = tab.values
        A = zeta.alphabet
    else:
        from .dynamics import crossing_paths
        from .traintrack import to_substitution
        tt = sf.train_track()
        A = sf.alphabet()
        win = [tt.graph.parse(w) for w in args.words] if args.words else crossing_paths(tt, L)
        S = to_substitution(tt, (), _seed(sf, args.seed), extra_paths=win)
        vals = S.path_frequencies(win, tol)
    rows = [[A.format(w), v] for w, v in sorted(vals.items(), key=lambda t: word_key(t[0]))
            if args.all or abs(v) > 1e-14]
    emit(args, ["word", "frequency"], rows)


def _class(sf, text):
    A = sf.alphabet()
    return cyclic_reduce(A.parse(text))[0]


def cmd_current(args):
    """CSV: word, value of the rational current on words of length <= depth outside the factors."""
    from .currents import normalize, rational_current
    sf = load_system(args.system)
    ffs = sf.factor_system()
    cur = rational_current(_class(sf, args.word), ffs, args.depth or 2)
    if args.normalize:
        cur = normalize(cur)
    A = ffs.alphabet
    emit(args, ["word", "value"], [[A.format(w), cur.table[w]] for w in cur.words()])


def cmd_extend(args):
    """CSV: word, value of the extension on all reduced words of length <= depth (factor words included)."""
    from .currents import RelativeCurrent, k_extension, nonnegative_fix
    sf = load_system(args.system)
    ffs = sf.factor_system()
    text = Path(args.input).read_text(encoding="utf-8")
    cur, bad = RelativeCurrent.from_csv(text, ffs, args.tol or 1e-8)
    if bad:
        raise PreconditionError(f"input table violates additivity ({len(bad)} residuals)")
    ext = k_extension(cur, args.depth or cur.k)
    if args.fix:
        ext, consts = nonnegative_fix(ext)
        for f, c in consts.items():
            print(f"# factor {f}: C = {fmt_num(c)}", file=sys.stderr)
    A = ffs.alphabet
    emit(args, ["word", "value"], [[A.format(w), v] for w, v in sorted(ext.table.items(), key=lambda t: word_key(t[0]))])


def cmd_approx(args):
    """CSV: class, multiplicity; the error and bound go to stderr."""
    from .currents import ApproximationConfig, RelativeCurrent, approximate_by_rationals
    sf = load_system(args.system)
    ffs = sf.factor_system()
    cur, bad = RelativeCurrent.from_csv(Path(args.input).read_text(encoding="utf-8"), ffs, args.tol or 1e-8)
    if bad:
        raise PreconditionError(f"input table violates additivity ({len(bad)} residuals)")
    cfg = ApproximationConfig(args.depth or cur.k, args.R, ffs.alphabet.rank)
    res = approximate_by_rationals(cur, cfg)
    A = ffs.alphabet
    emit(args, ["class", "multiplicity"], [[A.format(c.letters), m] for c, m in res.classes])
    print(f"# error {fmt_num(res.error)} bound {fmt_num(res.bound)} P {cfg.P}", file=sys.stderr)


def cmd_whitehead(args):
    """Prints the Whitehead graph (adjacency list), the verdict and its certificate."""
    from .whitehead import decide_separable
    sf = load_system(args.system)
    ffs = sf.factor_system()
    fillers = None
    if args.filler:
        fillers = [_class(sf, f) for f in args.filler]
    v = decide_separable(_class(sf, args.word), ffs, fillers)
    lines = ["graph:"] + ["  " + s for s in v.graph.describe()] + v.describe()
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _loop(tt, text):
    from .traintrack import tighten_cyclic
    return tighten_cyclic(tt.graph.parse(text))


def cmd_goodness(args):
    """CSV: l_r, i_r, L_r, g_r, b_r, critical, goodness."""
    from .dynamics import goodness
    sf = load_system(args.system)
    tt = sf.train_track()
    r = goodness(tt, _loop(tt, args.word), args.critical)
    emit(args, ["l_r", "i_r", "L_r", "g_r", "b_r", "critical", "goodness"],
         [[r.l_r, r.i_r, r.L_r, r.g_r, r.b_r, r.critical, r.goodness]])


def cmd_iterate(args):
    """CSV: n, length, i_r, l_r, goodness, loop (empty once the loop is too long to print)."""
    from .dynamics import crossing_paths, iterate_class
    sf = load_system(args.system)
    tt = sf.train_track()
    recs = iterate_class(tt, _loop(tt, args.word), args.n, crossing_paths(tt, args.window or 4),
                         cap=args.cap, Lc=args.critical)
    rows = []
    for r in recs:
        rep = r.report
        loop = tt.fmt(r.loop) if r.loop is not None and len(r.loop) <= 200 else ""
        rows.append([r.n, r.length, rep.i_r if rep else None, rep.l_r if rep else None,
                     rep.goodness if rep else None, loop])
    emit(args, ["n", "length", "i_r", "l_r", "goodness", "loop"], rows)


def cmd_ns(args):
    """CSV: n, direction, distance, goodness, length; the verdict goes to stderr."""
    from .dynamics import crossing_paths, ns_experiment
    sf = load_system(args.system)
    tt = sf.train_track()
    bwd = load_system(args.inverse).train_track() if args.inverse else None
    rep = ns_experiment(tt, bwd, _loop(tt, args.word), crossing_paths(tt, args.window or 4),
                        n_max=args.max_iter or 12, eps=args.tol or 1e-3, seed=_seed(sf, args.seed),
                        check_separable=not args.assume_separable, cap=args.cap)
    text = rep.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"# verdict {rep.verdict}", file=sys.stderr)
    for n in rep.notes:
        print(f"# {n}", file=sys.stderr)
    if rep.verdict == "inconclusive" and args.strict:
        raise ConvergenceError("neither direction converged")


# ---------------------------------------------------------------- repro

def _cells_equal(a, b, tol):
    if a == b:
        return True
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    if re.fullmatch(r"-?\d+", a) and re.fullmatch(r"-?\d+", b):
        return False
    return abs(x - y) <= tol


def compare_csv(got: str, want: str, tol: float = 1e-9) -> list:
    g = list(csv.reader(io.StringIO(got)))
    w = list(csv.reader(io.StringIO(want)))
    diffs = []
    if len(g) != len(w):
        diffs.append(f"{len(g)} rows, expected {len(w)}")
    for i, (rg, rw) in enumerate(zip(g, w)):
        if len(rg) != len(rw) or not all(_cells_equal(a, b, tol) for a, b in zip(rg, rw)):
            diffs.append(f"row {i}: {rg} != {rw}")
    return diffs


def repro_jobs(root: Path = FIXTURES) -> list:
    """(golden name, argv) pairs from the fixtures manifest."""
    out = []
    for line in (root / "repro.txt").read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            name, cmd = line.split(":", 1)
            out.append((name.strip(), cmd.split()))
    return out


def run_captured(argv) -> tuple:
    old = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = io.StringIO(), io.StringIO()
    try:
        code = main(argv)
        return code, sys.stdout.getvalue()
    finally:
        sys.stdout, sys.stderr = old


def cmd_repro(args):
    """Runs every fixture command and diffs its CSV against the golden file."""
    root = Path(args.fixtures) if args.fixtures else FIXTURES
    failed = 0
    for name, argv in repro_jobs(root):
        argv = [a.replace("{fixtures}", str(root)) for a in argv]
        t = time.perf_counter()
        code, out = run_captured(argv)
        gold = root / "golden" / name
        if args.update:
            gold.write_text(out, encoding="utf-8")
            print(f"WROTE {name}")
            continue
        diffs = [f"exit code {code}"] if code else compare_csv(out, gold.read_text(encoding="utf-8"))
        status = "ok" if not diffs else "FAIL"
        failed += bool(diffs)
        print(f"{status:4s} {name} ({time.perf_counter() - t:.2f}s)")
        for d in diffs[:5]:
            print("     " + d)
    if failed:
        raise ConvergenceError(f"{failed} golden comparisons failed")


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relcurrents", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, help="word length k (or induction length l)")
    common.add_argument("--window", type=int, help="maximal window word length")
    common.add_argument("--seed", help="seed letter or edge")
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "table"), default="csv")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, *pos):
        sp = sub.add_parser(name, parents=[common], help=(fn.__doc__ or "").strip().splitlines()[0],
                            description=fn.__doc__)
        sp.add_argument("system", help="system file (paths are also looked up in the bundled fixtures)")
        for a in pos:
            sp.add_argument(a)
        sp.set_defaults(fn=fn)
        return sp

    add("matrix", cmd_matrix).add_argument("--induce", type=int, help="also print M_l")
    add("spectrum", cmd_spectrum)
    add("induce", cmd_induce)
    add("fixed-point", cmd_fixed_point).add_argument("--length", type=int, default=60)
    sp = add("freq", cmd_freq)
    sp.add_argument("--words", nargs="*")
    sp.add_argument("--method", choices=("matrix", "direct", "both"), default="matrix")
    sp.add_argument("--all", action="store_true", help="also print zero frequencies")
    add("current", cmd_current, "word").add_argument("--normalize", action="store_true")
    sp = add("extend", cmd_extend)
    sp.add_argument("--input", required=True, help="CSV of a relative current (word,value)")
    sp.add_argument("--fix", action="store_true", help="apply the non-negativity correction")
    sp = add("approx", cmd_approx)
    sp.add_argument("--input", required=True)
    sp.add_argument("--R", type=float, default=1000.0)
    add("whitehead", cmd_whitehead, "word").add_argument("--filler", action="append")
    add("goodness", cmd_goodness, "word").add_argument("--critical", type=float)
    sp = add("iterate", cmd_iterate, "word")
    sp.add_argument("-n", type=int, default=5)
    sp.add_argument("--cap", type=int, default=10 ** 6)
    sp.add_argument("--critical", type=float)
    sp = add("ns", cmd_ns, "word")
    sp.add_argument("--inverse", help="system file of an inverse representative")
    sp.add_argument("--cap", type=int, default=10 ** 6)
    sp.add_argument("--assume-separable", action="store_true")
    sp.add_argument("--strict", action="store_true", help="exit 3 when inconclusive")
    sp = sub.add_parser("repro", help=cmd_repro.__doc__)
    sp.add_argument("--fixtures")
    sp.add_argument("--update", action="store_true", help="rewrite the golden files")
    sp.set_defaults(fn=cmd_repro)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "format"):
        args.format, args.out = "csv", None
    try:
        args.fn(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except KeyError as exc:
        print(f"error: unknown name {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
