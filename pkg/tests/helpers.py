"""Shared builders, oracles and generators for the test suite."""
from __future__ import annotations

import random
import re
from fractions import Fraction
from itertools import permutations
from pathlib import Path

from kirbylab import handles as hd
from kirbylab.cli import bundled_dir
from kirbylab.handles import AmbientBasis, HomologyClass, Presentation
from kirbylab.script import Line, Script, statement
from kirbylab.errors import ScriptSyntaxError
from kirbylab.script.syntax import Statement, parse, tokenize

H = HomologyClass.parse
SCRIPTS = bundled_dir()
BUNDLED = sorted(p.name for p in SCRIPTS.glob("*.kcs"))

U6 = "7h-3e1-2e2-2e3-2e4-2e5-2e6-2e7-2e8-2e9-2e10-2e11-2e12-2e13-e14"


def script_text(name: str) -> str:
    return (SCRIPTS / name).read_text(encoding="utf-8")


def ambient(k: int) -> AmbientBasis:
    return AmbientBasis(("h",) + tuple(f"e{i}" for i in range(1, k + 1)), (1,) + (-1,) * k)


def cor27_classes() -> list[HomologyClass]:
    return [H(f"e{8 + i}-e{9 + i}") for i in range(1, 6)] + [H(U6)]


def build_cp2_14() -> Presentation:
    """The CP^2 # 14 CP^2-bar pipeline through the move API."""
    X = Presentation(zero_handles=1, three_handles=2, four_handles=1, closed=True, ambient=AmbientBasis(("h",), (1,)))
    for lbl, c in (("h", "h"), ("t", "2h"), ("w", "5h")):
        X = hd.add_handle(X, lbl, H(c))
    X = hd.blow_up(X, -1, "e1", {"w": 3})
    X = hd.blow_up(X, -1, "e2", {"w": 2})
    X = hd.slide(X, "w", "t", 1)
    for i in range(3, 14):
        X = hd.blow_up(X, -1, f"e{i}", {"w": 2})
    for i in range(9, 13):
        X = hd.slide(X, f"e{i}", f"e{i + 1}", -1)
    return hd.blow_up(X, -1, "e14", {"w": 1, "e13": 1})


def standard(k: int) -> Presentation:
    return hd.standard_cp2_blown_up(k)


# -- independent oracles ---------------------------------------------------------

def cofactor_det(rows) -> int:
    rows = [list(r) for r in rows]
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * cofactor_det(minor)
    return total


def charpoly(rows) -> list[Fraction]:
    """Coefficients c_0..c_n of det(tI - M) by Faddeev-LeVerrier (c_n = 1)."""
    n = len(rows)
    M = [[Fraction(x) for x in r] for r in rows]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk = M (M_{k-1} + c_{n-k+1} I)
        A = [[Mk[i][j] + (coeffs[n - k + 1] if i == j else 0) for j in range(n)] for i in range(n)]
        Mk = [[sum(M[i][t] * A[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(Mk[i][i] for i in range(n)) / k
    return coeffs


def signature_oracle(rows) -> tuple[int, int]:
    """Descartes' rule is exact for the real-rooted characteristic polynomial."""
    n = len(rows)
    c = charpoly(rows)
    nullity = next(i for i in range(n + 1) if c[i] != 0)
    trimmed = c[nullity:]

    def changes(seq):
        s = [x for x in seq if x != 0]
        return sum(1 for a, b in zip(s, s[1:]) if (a > 0) != (b > 0))

    pos = changes(trimmed)
    neg = changes([x * (-1) ** i for i, x in enumerate(trimmed)])
    assert pos + neg + nullity == n
    return pos - neg, nullity


def minors_gcd(A, k) -> int:
    from itertools import combinations
    from math import gcd

    m, n = len(A), len(A[0]) if A else 0
    g = 0
    for rs in combinations(range(m), k):
        for cs in combinations(range(n), k):
            g = gcd(g, cofactor_det([[A[r][c] for c in cs] for r in rs]))
    return g


def invariant_factors_oracle(A) -> list[int]:
    """d_k = D_k / D_{k-1} from determinantal divisors."""
    if not A or not A[0]:
        return []
    out, prev = [], 1
    for k in range(1, min(len(A), len(A[0])) + 1):
        d = minors_gcd(A, k)
        if d == 0:
            out.append(0)
            prev = 0
            continue
        out.append(d // prev if prev else 0)
        prev = d
    return out


def dot(amb: AmbientBasis, a: HomologyClass, b: HomologyClass) -> int:
    """Pairing straight from coefficient dictionaries."""
    sq = dict(zip(amb.names, amb.squares))
    da, db = dict(a.items()), dict(b.items())
    return sum(sq[k] * v * db.get(k, 0) for k, v in da.items())


def brute_embeddings(X: Presentation, target, bound: int):
    n = target.n
    pool = [h for h in X.two_handles if h.has_class]
    ks = [k for m in range(1, bound + 1) for k in (m, -m)]
    found = []
    for combo in permutations(pool, n):
        def rec(i, chosen):
            if i == n:
                cls = [k * h.cls for h, k in zip(combo, chosen)]
                if all(dot(X.ambient, cls[a], cls[b]) == target[a, b] for a in range(n) for b in range(n)):
                    found.append((tuple(h.label for h in combo), tuple(chosen)))
                return
            for k in ks:
                rec(i + 1, chosen + [k])

        rec(0, [])
    return sorted(found)


# -- random data -----------------------------------------------------------------

def random_unimodular(rng: random.Random, n: int, steps: int = 6):
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        kind = rng.random()
        if n > 1 and kind < 0.6:
            q = rng.choice((-2, -1, 1, 2))
            for r in range(n):
                U[r][j] += q * U[r][i]
        elif n > 1 and kind < 0.8:
            for r in range(n):
                U[r][i], U[r][j] = U[r][j], U[r][i]
        else:
            for r in range(n):
                U[r][i] = -U[r][i]
    return U


def random_symmetric(rng: random.Random, n: int, lo: int = -3, hi: int = 3):
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = rng.randint(lo, hi)
    return rows


def random_class_presentation(rng: random.Random, k: int | None = None, m: int | None = None) -> Presentation:
    """Closed presentation over ``Z^{1,k}`` with ``m`` random class-bearing handles."""
    k = rng.randint(1, 4) if k is None else k
    m = rng.randint(2, 5) if m is None else m
    amb = ambient(k)
    X = Presentation(zero_handles=1, four_handles=1, closed=True, ambient=amb)
    for i in range(m):
        coeffs = [(nm, rng.randint(-2, 2)) for nm in amb.names]
        X = hd.add_handle(X, f"a{i}", HomologyClass(coeffs))
    return X


def random_abstract_presentation(rng: random.Random, m: int | None = None, ones: int | None = None) -> Presentation:
    """Classless handles with random framings, pairwise links and 1-handle links."""
    m = rng.randint(2, 5) if m is None else m
    ones = rng.randint(0, 2) if ones is None else ones
    X = Presentation(zero_handles=1, one_handles=ones)
    for i in range(m):
        through = {j: rng.randint(-2, 2) for j in range(1, ones + 1)}
        X = hd.add_handle(X, f"b{i}", framing=rng.randint(-4, 4), through=through)
    for i in range(m):
        for j in range(i + 1, m):
            v = rng.randint(-2, 2)
            if v:
                X = hd.set_link(X, f"b{i}", f"b{j}", v)
    return X


def random_cork_presentation(rng: random.Random):
    """Classless presentation with a marked cork pair (1-handle 1, 2-handle ``k``)."""
    m = rng.randint(1, 4)
    ones = rng.randint(1, 2)
    X = Presentation(zero_handles=1, one_handles=ones, closed=rng.random() < 0.5, three_handles=0, four_handles=1)
    for i in range(m):
        through = {j: rng.randint(-2, 2) for j in range(1, ones + 1)}
        X = hd.add_handle(X, f"b{i}", framing=rng.randint(-4, 4), through=through)
    X = hd.add_handle(X, "k", framing=0, through={1: rng.choice((1, -1))})
    labels = X.labels
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            v = rng.randint(-2, 2)
            if v:
                X = hd.set_link(X, a, b, v)
    return X


# -- mutation corpus -------------------------------------------------------------

_NUM = re.compile(r"[+-]?\d+\Z")
_CLASS_TERM = re.compile(r"([+-]?)(\d*)([A-Za-z_][A-Za-z0-9_]*)")


def mutations(text: str) -> list[tuple[int, str, str]]:
    """Single-token mutations: sign flips and coefficient edits outside comments and strings.

    Mutants that no longer parse are dropped.  Returns ``(line number, description, mutated text)``.
    """
    lines = text.split("\n")
    out = []
    for idx, line in enumerate(lines):
        toks, _ = tokenize(line, idx + 1)
        if not toks or toks[0].kind != "word":
            continue
        head = toks[0].text
        words = [t.text for t in toks]
        after_class = words.index("class") + 1 if "class" in words else len(toks)
        for pos, t in enumerate(toks[1:], 1):
            if t.kind != "word":
                continue
            reps = []
            if t.text in ("+1", "-1") and head in ("blowup", "slide", "ambient"):
                reps = ["-1" if t.text == "+1" else "+1"]
            elif _NUM.match(t.text):
                n = int(t.text)
                reps = [str(n + 1), str(n - 1)]
            elif head in ("handle", "assert") and pos >= after_class + (head == "assert"):
                terms = _CLASS_TERM.findall(t.text)
                if not terms or "".join(a + b + c for a, b, c in terms) != t.text:
                    continue
                for j, (sg, co, lbl) in enumerate(terms):
                    c = int(co or 1) + 1
                    edited = terms[:j] + [(sg, str(c), lbl)] + terms[j + 1:]
                    reps.append("".join(a + b + c2 for a, b, c2 in edited))
            for r in reps:
                new = line[: t.col - 1] + r + line[t.col - 1 + len(t.text):]
                mutated = "\n".join(lines[:idx] + [new] + lines[idx + 1:])
                try:
                    parse(mutated)
                except ScriptSyntaxError:
                    continue
                out.append((idx + 1, f"{t.text} -> {r}", mutated))
    return out


# -- script fuzzing --------------------------------------------------------------

_WORDS = ["a", "b", "w", "u1", "e9", "x_2", "k", "ball", "K9"]
_CLASSES = ["h", "-h", "7h-3e1-2e2", "e9-e10", "0", "2h+e3", "-e1-e2"]
_GROUPS = ["0", "Z", "Z/7", "Z+Z/2+Z/4"]
_STRINGS = ["", "plain", 'with "quotes"', "back\\slash", "# not a comment", "unicode é"]
_COMMENTS = ["# c", "#", "#  spaced  out ", "## double", "# [punct] = , :"]


def _ints(rng, lo=-20, hi=20):
    return rng.randint(lo, hi)


def random_statement(rng: random.Random) -> Statement:
    W = lambda: rng.choice(_WORDS)  # noqa: E731
    I = lambda: _ints(rng)  # noqa: E731
    S = lambda: rng.choice((1, -1))  # noqa: E731
    L = lambda: rng.choice((None, I()))  # noqa: E731
    C = lambda: H(rng.choice(_CLASSES))  # noqa: E731
    P = lambda: rng.choice(("odd", "even"))  # noqa: E731
    T = lambda: rng.choice(_STRINGS)  # noqa: E731
    op = rng.choice(
        ["begin", "use", "save", "ambient", "state", "handle", "link", "ledger", "blowup", "blowdown",
         "slide", "cancel", "pair", "exchange", "rbd", "cork", "twist", "certify", "assume", "assert"]
    )
    if op in ("begin", "use", "save"):
        return statement(op, name=W())
    if op == "ambient":
        return statement(op, basis=tuple((W(), S()) for _ in range(rng.randint(1, 4))))
    if op == "state":
        return statement(op, closed=rng.random() < 0.5, zero=I(), one=I(), three=I(), four=I())
    if op == "handle":
        through = rng.choice((None, tuple((rng.randint(1, 3), L()) for _ in range(rng.randint(0, 3)))))
        if rng.random() < 0.5:
            return Statement(op, (("label", W()), ("class", C()), ("through", through)))
        return Statement(op, (("label", W()), ("framing", L()), ("through", through)))
    if op == "link":
        return statement(op, a=W(), b=W(), value=L())
    if op == "ledger":
        return statement(op, rank=I(), sigma=I(), parity=P())
    if op == "blowup":
        return statement(op, label=W(), sign=S(), on=tuple((W(), I()) for _ in range(rng.randint(0, 3))))
    if op == "blowdown":
        return statement(op, label=W())
    if op == "slide":
        return statement(op, moving=W(), over=W(), sign=S())
    if op == "cancel":
        return statement(op, one=I(), two=W(), token=T())
    if op == "pair":
        return statement(op, label=W(), framing=I())
    if op == "exchange":
        return statement(op, one=I(), label=W(), token=rng.choice((None, T())))
    if op == "rbd":
        return statement(op, p=I(), handles=tuple(W() for _ in range(rng.randint(0, 4))), ball=W())
    if op == "cork":
        return statement(op, name=W(), link=I())
    if op == "twist":
        return statement(op, name=W(), one=I(), two=W())
    if op == "certify":
        return statement(op, name=W(), before=W(), after=W(), facts=tuple(T() for _ in range(rng.randint(0, 2))))
    if op == "assume":
        return statement(op, token=T())
    kind = rng.choice(
        ["b2", "chi", "sigma", "det", "parity", "h1", "framing", "class", "form-ledger", "gram-submatrix",
         "model", "stable-equivalent", "same-ledger", "contractible", "embeddings"]
    )
    if kind in ("b2", "chi", "sigma", "det"):
        return statement(op, kind=kind, value=I())
    if kind == "parity":
        return statement(op, kind=kind, value=P())
    if kind == "h1":
        from kirbylab.handles import AbelianGroup

        return statement(op, kind=kind, value=AbelianGroup.parse(rng.choice(_GROUPS)))
    if kind == "framing":
        return statement(op, kind=kind, label=W(), value=L())
    if kind == "class":
        return statement(op, kind=kind, label=W(), value=C())
    if kind == "form-ledger":
        return statement(op, kind=kind, rank=I(), sigma=I(), parity=P())
    if kind == "gram-submatrix":
        return statement(op, kind=kind, labels=tuple(W() for _ in range(rng.randint(0, 4))), p=I())
    if kind == "model":
        return statement(op, kind=kind, m=I(), n=I())
    if kind == "stable-equivalent":
        ref = lambda: rng.choice((W(), (I(), I(), P())))  # noqa: E731
        return statement(op, kind=kind, left=ref(), right=ref(), value=rng.random() < 0.5)
    if kind == "same-ledger":
        return statement(op, kind=kind, left=W(), right=W())
    if kind == "contractible":
        return statement(op, kind=kind, name=W())
    return statement(op, kind=kind, p=I(), bound=I(), count=I())


def random_script(rng: random.Random, max_lines: int = 12) -> Script:
    """A grammar-valid script (labels unique per session for handle lines)."""
    lines = []
    sessions: dict[str, set] = {"main": set()}
    cur = "main"
    for _ in range(rng.randint(0, max_lines)):
        r = rng.random()
        if r < 0.1:
            lines.append(Line(None, None))
        elif r < 0.2:
            lines.append(Line(None, rng.choice(_COMMENTS)))
        else:
            st = random_statement(rng)
            # mirror the parser's per-session duplicate-label rule
            if st.op == "handle" and st.get("label") in sessions[cur]:
                continue
            if st.op == "begin":
                cur = st.get("name")
                sessions[cur] = set()
            elif st.op == "use":
                cur = st.get("name")
                sessions.setdefault(cur, set())
            elif st.op == "save":
                sessions[st.get("name")] = set(sessions[cur])
            elif st.op == "handle":
                sessions[cur].add(st.get("label"))
            lines.append(Line(st, rng.choice((None, None, rng.choice(_COMMENTS)))))
    return Script(tuple(lines))
