"""Replay a parsed script against a growing presentation.

Every statement yields report entries.  Failed moves and asserts are
recorded as checked-fail and leave the state untouched; nothing raises.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional

from .. import cork as corks
from .. import handles as hd
from .. import lattice, rbd
from ..errors import InvalidMove, KirbyError, UnknownHandle
from ..handles import AmbientBasis, Presentation
from ..lattice import FormClass
from ..report import ASSUMED, FAIL, IMPORTED, PASS, WARN, Report
from .syntax import Script, Statement, format_statement

# change of chi each move must produce
_CHI_DELTA = {"blowup": 1, "blowdown": -1, "slide": 0, "cancel": 0, "pair": 0, "exchange": 2, "twist": 0}


@dataclass
class ScriptReport:
    report: Report
    state: Presentation
    ledger: Optional[FormClass]
    sessions: dict = field(default_factory=dict)
    source: str = ""

    @property
    def verified(self) -> bool:
        return self.report.verified

    @property
    def assumptions(self):
        return self.report.of(ASSUMED)

    @property
    def imported(self):
        return self.report.of(IMPORTED)

    def ledger_line(self) -> str:
        return f"ledger: {self.ledger}" if self.ledger is not None else "ledger: unknown"

    def to_text(self, verbose: bool = False) -> str:
        rep = self.report
        c = rep.counts()
        out = [f"script: {self.source}" if self.source else "script: <text>"]
        shown = rep.entries if verbose else [e for e in rep.entries if e.outcome in (FAIL, WARN)]
        if shown:
            out.append("entries:" if verbose else "problems:")
            for e in shown:
                where = f"line {e.line}" if e.line is not None else "-"
                out.append(f"  {where:>8}  {e.outcome:<12}  {e.check}: {e.detail}")
        out.append(f"machine checks: {c[PASS]} passed, {c[FAIL]} failed")
        out.append(f"assumptions (not machine-checked): {c[ASSUMED]}")
        for e in rep.of(ASSUMED):
            out.append(f"  line {e.line}: {e.detail}")
        out.append(f"imported facts: {c[IMPORTED]}")
        for e in rep.of(IMPORTED):
            out.append(f"  line {e.line}: {e.detail}")
        if c[WARN]:
            out.append(f"warnings: {c[WARN]}")
        out.append("result: " + ("VERIFIED" if self.verified else "FAILED"))
        if self.state is not None:
            inv = hd.invariants(self.state)
            out.append(f"final: chi={inv.chi} b2={inv.b2} h1={inv.h1}")
        out.append(self.ledger_line())
        return "\n".join(out) + "\n"

    def to_dict(self) -> dict:
        inv = hd.invariants(self.state)
        led = self.ledger
        return {
            "script": self.source,
            "verified": self.verified,
            "counts": self.report.counts(),
            "entries": [e.as_dict() for e in self.report.entries],
            "final": {
                "chi": inv.chi,
                "b2": inv.b2,
                "h1": None if inv.h1 is None else str(inv.h1),
                "handles": list(self.state.counts()),
            },
            "ledger": None if led is None else {"rank": led.rank, "signature": led.signature, "parity": led.parity},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


class _Replayer:
    def __init__(self):
        self.report = Report()
        self.sessions: dict[str, Presentation] = {"main": Presentation()}
        self.current = "main"
        self.corks: dict[str, corks.CorkPresentation] = {}
        self.line: Optional[int] = None
        self.text = ""

    @property
    def X(self) -> Presentation:
        return self.sessions[self.current]

    @X.setter
    def X(self, value: Presentation) -> None:
        self.sessions[self.current] = value

    def add(self, outcome, check, detail=""):
        self.report.add(outcome, check, detail, line=self.line, statement=self.text)

    def check(self, ok, check, detail=""):
        return self.report.check(ok, check, detail, line=self.line, statement=self.text)

    def absorb(self, rep: Report):
        self.report.absorb(rep, line=self.line, statement=self.text)

    def expect(self, check, expected, got):
        self.check(expected == got, check, f"expected {expected}, got {got}")

    # -- dispatch
    def run(self, lineno: int, st: Statement) -> None:
        self.line, self.text = lineno, format_statement(st)
        try:
            getattr(self, "do_" + st.op)(st)
        except KirbyError as exc:
            self.add(FAIL, st.op, f"{type(exc).__name__}: {exc}")
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            self.add(FAIL, st.op, f"{type(exc).__name__}: {exc}")

    def move(self, op: str, Y: Presentation) -> None:
        """Accept ``Y`` after checking the per-move postconditions."""
        before = self.X
        bad = hd.framing_violations(Y)
        ok = self.check(not bad, f"{op} framings", "every class framing equals its square" if not bad else f"framing != square on {', '.join(bad)}")
        d = _CHI_DELTA.get(op)
        if d is not None:
            ok = self.check(Y.chi - before.chi == d, f"{op} chi", f"chi {before.chi} -> {Y.chi}") and ok
        if ok:
            self.X = Y

    # -- sessions and declarations
    def do_begin(self, st):
        self.current = st.get("name")
        self.sessions[self.current] = Presentation()
        self.check(True, "begin", f"session {self.current}")

    def do_use(self, st):
        name = st.get("name")
        if name not in self.sessions:
            self.add(FAIL, "use", f"no session {name!r}")
            return
        self.current = name
        self.check(True, "use", f"session {name}")

    def do_save(self, st):
        self.sessions[st.get("name")] = self.X
        self.check(True, "save", f"snapshot {st.get('name')}")

    def do_ambient(self, st):
        names = tuple(k for k, _ in st.get("basis"))
        squares = tuple(s for _, s in st.get("basis"))
        if self.X.ambient is not None:
            raise InvalidMove("ambient basis already declared")
        self.X = replace(self.X, ambient=AmbientBasis(names, squares))
        self.check(True, "ambient", f"{len(names)} generators")

    def do_state(self, st):
        self.X = hd.set_counts(
            self.X, zero=st.get("zero"), one=st.get("one"), three=st.get("three"), four=st.get("four"), closed=st.get("closed")
        )
        self.check(True, "state", f"handle counts {self.X.counts()}")

    def do_handle(self, st):
        through = dict(st.get("through") or ())
        self.X = hd.add_handle(self.X, st.get("label"), st.get("class"), st.get("framing"), through)
        h = self.X.handle(st.get("label"))
        self.check(True, "handle", f"{h.label} framing {h.framing}")

    def do_link(self, st):
        self.X = hd.set_link(self.X, st.get("a"), st.get("b"), st.get("value"))
        self.check(True, "link", f"lk({st.get('a')},{st.get('b')}) = {st.get('value')}")

    def do_ledger(self, st):
        f = FormClass(st.get("rank"), st.get("sigma"), st.get("parity"))
        self.X = replace(self.X, ledger=f)
        self.add(ASSUMED, "ledger", f"declared form ledger {f}")

    # -- moves
    def do_blowup(self, st):
        self.move("blowup", hd.blow_up(self.X, st.get("sign"), st.get("label"), dict(st.get("on"))))

    def do_blowdown(self, st):
        self.move("blowdown", hd.blow_down(self.X, st.get("label")))

    def do_slide(self, st):
        self.move("slide", hd.slide(self.X, st.get("moving"), st.get("over"), st.get("sign")))

    def do_cancel(self, st):
        Y = hd.cancel_pair(self.X, st.get("one"), st.get("two"), st.get("token"))
        self.move("cancel", Y)
        if self.X is Y:
            self.add(ASSUMED, "cancel", st.get("token"))

    def do_pair(self, st):
        self.move("pair", hd.introduce_pair(self.X, st.get("label"), st.get("framing")))

    def do_exchange(self, st):
        Y = hd.zero_dot_exchange(self.X, st.get("one"), st.get("label"), st.get("token"))
        before = hd.form_ledger(self.X)
        self.move("exchange", Y)
        if self.X is not Y:
            return
        if st.get("token"):
            self.add(ASSUMED, "exchange", st.get("token"))
        after = hd.form_ledger(Y)
        if before is not None and after is not None:
            want = before + lattice.HYPERBOLIC
            self.check(after.triple() == want.triple(), "exchange ledger", f"{before} -> {after}")
        else:
            self.add(WARN, "exchange ledger", "form ledger unknown after the exchange")

    def do_rbd(self, st):
        X = self.X
        p, labels = st.get("p"), st.get("handles")
        E = rbd.CpEmbedding.from_handles(X, p, labels)
        self.absorb(rbd.verify_embedding(X, E))
        d = rbd.bp_descriptor(p)
        self.check(d.consistent(), "B_p boundary", f"|H1(B_{p})|^2 = {d.h1_order ** 2} = |det C_{p}|")
        Y = rbd.rational_blowdown(X, E, st.get("ball"))
        self.check(Y.chi == X.chi - (p - 1), "rbd chi", f"chi {X.chi} -> {Y.chi}")
        self.add(ASSUMED, "rbd", f"every self-diffeomorphism of the boundary of B_{p} extends over B_{p}")
        self.move("rbd", Y)
        self.check(True, "rbd ledger", f"{hd.form_ledger(Y)}")

    def do_cork(self, st):
        C = corks.make_cork(st.get("name"), st.get("link"))
        self.corks[C.name] = C
        self.absorb(corks.verify_contractible(C))

    def _cork(self, name):
        if name not in self.corks:
            raise UnknownHandle(f"no cork named {name!r}")
        return self.corks[name]

    def do_twist(self, st):
        X = self.X
        Y = corks.cork_twist(X, self._cork(st.get("name")), st.get("one"), st.get("two"))
        a, b = hd.invariants(X), hd.invariants(Y)
        self.check(a == b, "twist invariants", f"chi/b2/H1 {a.chi}/{a.b2}/{a.h1} -> {b.chi}/{b.b2}/{b.h1}")
        la, lb = hd.form_ledger(X), hd.form_ledger(Y)
        self.check(la == lb and la is not None, "twist ledger", f"{la} -> {lb}")
        self.move("twist", Y)

    def do_certify(self, st):
        C = self._cork(st.get("name"))
        ledgers = []
        for key in ("before", "after"):
            name = st.get(key)
            if name not in self.sessions:
                raise UnknownHandle(f"no session {name!r}")
            ledgers.append(hd.form_ledger(self.sessions[name]))
        cert = corks.CorkCertificate(ledgers[0], ledgers[1], C, tuple(st.get("facts")))
        self.absorb(corks.check_certificate(cert))

    def do_assume(self, st):
        self.add(ASSUMED, "assume", st.get("token"))

    # -- asserts
    def _ref(self, r) -> Optional[FormClass]:
        if isinstance(r, tuple):
            return FormClass(*r)
        if r not in self.sessions:
            raise UnknownHandle(f"no session {r!r}")
        return hd.form_ledger(self.sessions[r])

    def _signed_det(self) -> Optional[int]:
        if self.X.ledger is not None:
            return None
        try:
            Q = hd.linking_form(self.X)
        except KirbyError:
            return None
        f = lattice.form_class(Q, modulo_radical=True)
        neg = (f.rank - f.signature) // 2
        return (-1) ** neg * lattice.discriminant(Q)

    def do_assert(self, st):
        k, X = st.get("kind"), self.X
        name = f"assert {k}"
        if k == "b2":
            self.expect(name, st.get("value"), hd.invariants(X).b2)
        elif k == "chi":
            self.expect(name, st.get("value"), X.chi)
        elif k in ("sigma", "parity"):
            f = hd.form_ledger(X)
            got = None if f is None else (f.signature if k == "sigma" else f.parity)
            self.expect(name, st.get("value"), got)
        elif k == "det":
            self.expect(name, st.get("value"), self._signed_det())
        elif k == "h1":
            self.expect(name, st.get("value"), hd.h1(X))
        elif k == "framing":
            self.expect(f"{name} {st.get('label')}", st.get("value"), X.handle(st.get("label")).framing)
        elif k == "class":
            h = X.handle(st.get("label"))
            got = X.ambient.format(h.cls) if h.has_class else None
            want = st.get("value")
            self.check(h.has_class and h.cls == want, f"{name} {h.label}", f"expected {want}, got {got}")
        elif k == "form-ledger":
            f = hd.form_ledger(X)
            want = (st.get("rank"), st.get("sigma"), st.get("parity"))
            self.expect(name, want, None if f is None else f.triple())
        elif k == "gram-submatrix":
            E = rbd.CpEmbedding.from_handles(X, st.get("p"), st.get("labels"))
            rep = rbd.verify_embedding(X, E)
            self.absorb(rep)
            self.check(rep.verified, name, f"Gram of {', '.join(st.get('labels'))} vs cp_matrix({st.get('p')})")
        elif k == "model":
            f = hd.form_ledger(X)
            got = None
            if f is not None and f.parity == lattice.ODD:
                got = lattice.classify_indefinite_odd(f.rank, f.signature)
            self.expect(name, (st.get("m"), st.get("n")), got)
        elif k == "stable-equivalent":
            a, b = self._ref(st.get("left")), self._ref(st.get("right"))
            got = None if a is None or b is None else lattice.stable_equivalent(a, b)
            self.check(got == st.get("value"), name, f"({a}) vs ({b}): expected {st.get('value')}, got {got}")
        elif k == "same-ledger":
            a, b = self._ref(st.get("left")), self._ref(st.get("right"))
            self.check(a is not None and a == b, name, f"({a}) vs ({b})")
        elif k == "contractible":
            rep = corks.verify_contractible(self._cork(st.get("name")))
            self.check(rep.verified, name, st.get("name"))
        elif k == "embeddings":
            found = rbd.enumerate_embeddings(X, st.get("p"), st.get("bound"))
            self.expect(name, st.get("count"), len(found))
        else:  # pragma: no cover - parser rejects other kinds
            raise ValueError(f"unknown assert kind {k!r}")


def replay_full(s: Script, source: str = "") -> ScriptReport:
    r = _Replayer()
    for lineno, st in s.numbered():
        r.run(lineno, st)
    return ScriptReport(r.report, r.X, hd.form_ledger(r.X), dict(r.sessions), source)


def replay(s: Script) -> Report:
    return replay_full(s).report
