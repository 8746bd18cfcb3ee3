"""Tokenizer, statement model, parser and canonical printer for ``.kcs`` scripts.

Grammar (one statement per line; ``#`` starts a comment kept verbatim)::

    begin NAME | use NAME | save NAME
    ambient LABEL:SIGN ...
    state closed|open zero=INT one=INT three=INT four=INT
    handle LABEL class CLASS [through=[INT:LINK, ...]]
    handle LABEL framing LINK [through=[INT:LINK, ...]]
    link LABEL LABEL LINK
    ledger INT INT PARITY
    blowup LABEL sign SIGN [on=[LABEL:INT, ...]]
    blowdown LABEL
    slide LABEL over LABEL sign SIGN
    cancel INT with LABEL assume STRING
    pair LABEL framing INT
    exchange INT as LABEL [assume STRING]
    rbd p=INT handles=[LABEL, ...] ball=LABEL
    cork NAME link=INT
    twist NAME one=INT two=LABEL
    certify NAME before=NAME after=NAME facts=[STRING, ...]
    assume STRING
    assert b2|chi|sigma|det INT
    assert parity PARITY
    assert h1 GROUP
    assert framing LABEL LINK
    assert class LABEL CLASS
    assert form-ledger INT INT PARITY
    assert gram-submatrix [LABEL, ...] cp INT
    assert model INT INT
    assert stable-equivalent REF REF BOOL
    assert same-ledger NAME NAME
    assert contractible NAME
    assert embeddings p=INT bound=INT count=INT

``SIGN`` is ``+1`` or ``-1``; ``LINK`` is an integer or ``?`` (unknown);
``CLASS`` is a signed coefficient list such as ``7h-3e1-2e2`` or ``0``;
``GROUP`` is ``0`` or a ``+``-joined list of ``Z`` and ``Z/n``; ``REF``
is a session name or a literal ``(rank,signature,parity)``.  Strings use
double quotes with ``\\"`` and ``\\\\`` escapes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..errors import DuplicateLabel, ScriptSyntaxError, UnknownStatement
from ..handles import AbelianGroup, HomologyClass

STATEMENTS = (
    "begin", "use", "save", "ambient", "state", "handle", "link", "ledger",
    "blowup", "blowdown", "slide", "cancel", "pair", "exchange", "rbd",
    "cork", "twist", "certify", "assume", "assert",
)
ASSERT_KINDS = (
    "b2", "chi", "sigma", "det", "parity", "h1", "framing", "class",
    "form-ledger", "gram-submatrix", "model", "stable-equivalent",
    "same-ledger", "contractible", "embeddings",
)
RESERVED = frozenset(STATEMENTS) | {"over", "sign", "with", "as", "class", "framing", "cp", "closed", "open"}

_PUNCT = "[](),:="
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INT = re.compile(r"[+-]?\d+\Z")


@dataclass(frozen=True)
class Token:
    kind: str  # word | string | punct
    text: str
    col: int  # 1-based
    value: Any = None


def tokenize(line: str, lineno: int) -> tuple[list[Token], Optional[str]]:
    """Split one line into tokens and an optional trailing comment."""
    toks: list[Token] = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch in " \t\r":
            i += 1
        elif ch == "#":
            return toks, line[i:].rstrip("\r")
        elif ch in _PUNCT:
            toks.append(Token("punct", ch, i + 1))
            i += 1
        elif ch == '"':
            j, buf = i + 1, []
            while True:
                if j >= n:
                    raise ScriptSyntaxError(lineno, n + 1, ['closing "'])
                c = line[j]
                if c == "\\" and j + 1 < n and line[j + 1] in '"\\':
                    buf.append(line[j + 1])
                    j += 2
                elif c == '"':
                    break
                else:
                    buf.append(c)
                    j += 1
            toks.append(Token("string", line[i:j + 1], i + 1, "".join(buf)))
            i = j + 1
        else:
            j = i
            while j < n and line[j] not in ' \t\r#"' and line[j] not in _PUNCT:
                j += 1
            toks.append(Token("word", line[i:j], i + 1))
            i = j
    return toks, None


@dataclass(frozen=True)
class Statement:
    """One command: ``op`` plus its arguments in canonical order."""

    op: str
    args: tuple[tuple[str, Any], ...] = ()

    def get(self, key: str, default=None):
        for k, v in self.args:
            if k == key:
                return v
        return default

    def __str__(self):
        return format_statement(self)


def statement(op: str, **kw) -> Statement:
    return Statement(op, tuple(kw.items()))


@dataclass(frozen=True)
class Line:
    statement: Optional[Statement] = None
    comment: Optional[str] = None


@dataclass(frozen=True)
class Span:
    line: int
    start: int
    end: int


@dataclass(frozen=True)
class Script:
    lines: tuple[Line, ...] = ()
    source_map: tuple[Span, ...] = field(default=(), compare=False)

    @property
    def statements(self) -> list[Statement]:
        return [ln.statement for ln in self.lines if ln.statement is not None]

    def numbered(self) -> list[tuple[int, Statement]]:
        return [(i, ln.statement) for i, ln in enumerate(self.lines, 1) if ln.statement is not None]


# -- parsing ---------------------------------------------------------------------

class _Cursor:
    def __init__(self, toks: list[Token], lineno: int, end_col: int):
        self.toks = toks
        self.pos = 0
        self.lineno = lineno
        self.end_col = end_col

    def peek(self) -> Optional[Token]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def fail(self, expected, tok: Optional[Token] = None):
        tok = tok if tok is not None else self.peek()
        col = tok.col if tok else self.end_col
        raise ScriptSyntaxError(self.lineno, col, expected, tok.text if tok else None)

    def take(self, expected) -> Token:
        tok = self.peek()
        if tok is None:
            self.fail(expected)
        self.pos += 1
        return tok

    def word(self, expected) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "word":
            self.fail(expected)
        self.pos += 1
        return tok

    def keyword(self, kw: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text != kw:
            self.fail([kw])
        self.pos += 1

    def punct(self, p: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "punct" or tok.text != p:
            self.fail([p])
        self.pos += 1

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (text is None or tok.text == text)

    def end(self) -> None:
        if self.peek() is not None:
            self.fail(["end of line"])

    # typed values
    def label(self, what: str = "LABEL") -> str:
        tok = self.peek()
        if tok is None or tok.kind != "word" or not _IDENT.match(tok.text) or tok.text in RESERVED:
            self.fail([what])
        self.pos += 1
        return tok.text

    def int_(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "word" or not _INT.match(tok.text):
            self.fail(["INT"])
        self.pos += 1
        return int(tok.text)

    def sign(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text not in ("+1", "-1", "1"):
            self.fail(["+1", "-1"])
        self.pos += 1
        return -1 if tok.text == "-1" else 1

    def link(self) -> Optional[int]:
        if self.at("word", "?"):
            self.pos += 1
            return None
        tok = self.peek()
        if tok is None or tok.kind != "word" or not _INT.match(tok.text):
            self.fail(["INT", "?"])
        self.pos += 1
        return int(tok.text)

    def choice(self, options) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text not in options:
            self.fail(list(options))
        self.pos += 1
        return tok.text

    def string(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "string":
            self.fail(["STRING"])
        self.pos += 1
        return tok.value

    def cls(self) -> HomologyClass:
        tok = self.peek()
        if tok is None or tok.kind != "word":
            self.fail(["CLASS"])
        try:
            c = HomologyClass.parse(tok.text)
        except ValueError:
            self.fail(["CLASS"])
        self.pos += 1
        return c

    def group(self) -> AbelianGroup:
        tok = self.peek()
        if tok is None or tok.kind != "word":
            self.fail(["GROUP"])
        try:
            g = AbelianGroup.parse(tok.text)
        except ValueError:
            self.fail(["GROUP"])
        self.pos += 1
        return g

    def kv(self, key: str, value: Callable[[], Any]):
        self.keyword(key)
        self.punct("=")
        return value()

    def listing(self, item: Callable[[], Any]) -> tuple:
        self.punct("[")
        out = []
        if self.at("punct", "]"):
            self.pos += 1
            return ()
        while True:
            out.append(item())
            if self.at("punct", ","):
                self.pos += 1
                continue
            self.punct("]")
            return tuple(out)

    def pair_of(self, left: Callable[[], Any], right: Callable[[], Any]) -> Callable[[], tuple]:
        def item():
            a = left()
            self.punct(":")
            return (a, right())

        return item

    def ref(self):
        if self.at("punct", "("):
            self.pos += 1
            r = self.int_()
            self.punct(",")
            s = self.int_()
            self.punct(",")
            p = self.choice(("odd", "even"))
            self.punct(")")
            return (r, s, p)
        return self.label("NAME or (rank,signature,parity)")


def _parse_handle(c: _Cursor) -> Statement:
    label = c.label()
    kind = c.choice(("class", "framing"))
    args: list[tuple[str, Any]] = [("label", label)]
    if kind == "class":
        args.append(("class", c.cls()))
    else:
        args.append(("framing", c.link()))
    through = None
    if c.at("word", "through"):
        through = c.kv("through", lambda: c.listing(c.pair_of(c.int_, c.link)))
    args.append(("through", through))
    return Statement("handle", tuple(args))


def _parse_assert(c: _Cursor) -> Statement:
    kind = c.choice(ASSERT_KINDS)
    if kind in ("b2", "chi", "sigma", "det"):
        return statement("assert", kind=kind, value=c.int_())
    if kind == "parity":
        return statement("assert", kind=kind, value=c.choice(("odd", "even")))
    if kind == "h1":
        return statement("assert", kind=kind, value=c.group())
    if kind == "framing":
        return statement("assert", kind=kind, label=c.label(), value=c.link())
    if kind == "class":
        return statement("assert", kind=kind, label=c.label(), value=c.cls())
    if kind == "form-ledger":
        return statement("assert", kind=kind, rank=c.int_(), sigma=c.int_(), parity=c.choice(("odd", "even")))
    if kind == "gram-submatrix":
        labels = c.listing(c.label)
        c.keyword("cp")
        return statement("assert", kind=kind, labels=labels, p=c.int_())
    if kind == "model":
        return statement("assert", kind=kind, m=c.int_(), n=c.int_())
    if kind == "stable-equivalent":
        a, b = c.ref(), c.ref()
        return statement("assert", kind=kind, left=a, right=b, value=c.choice(("true", "false")) == "true")
    if kind == "same-ledger":
        return statement("assert", kind=kind, left=c.label("NAME"), right=c.label("NAME"))
    if kind == "contractible":
        return statement("assert", kind=kind, name=c.label("NAME"))
    p = c.kv("p", c.int_)
    bound = c.kv("bound", c.int_)
    return statement("assert", kind=kind, p=p, bound=bound, count=c.kv("count", c.int_))


def _parse_statement(c: _Cursor, op: str) -> Statement:
    if op in ("begin", "use", "save"):
        return statement(op, name=c.label("NAME"))
    if op == "ambient":
        items = [c.pair_of(c.label, c.sign)()]
        while c.peek() is not None:
            items.append(c.pair_of(c.label, c.sign)())
        return statement(op, basis=tuple(items))
    if op == "state":
        closed = c.choice(("closed", "open")) == "closed"
        zero = c.kv("zero", c.int_)
        one = c.kv("one", c.int_)
        three = c.kv("three", c.int_)
        four = c.kv("four", c.int_)
        return statement(op, closed=closed, zero=zero, one=one, three=three, four=four)
    if op == "handle":
        return _parse_handle(c)
    if op == "link":
        return statement(op, a=c.label(), b=c.label(), value=c.link())
    if op == "ledger":
        return statement(op, rank=c.int_(), sigma=c.int_(), parity=c.choice(("odd", "even")))
    if op == "blowup":
        label = c.label()
        c.keyword("sign")
        sign = c.sign()
        on = ()
        if c.at("word", "on"):
            on = c.kv("on", lambda: c.listing(c.pair_of(c.label, c.int_)))
        return statement(op, label=label, sign=sign, on=on)
    if op == "blowdown":
        return statement(op, label=c.label())
    if op == "slide":
        a = c.label()
        c.keyword("over")
        b = c.label()
        c.keyword("sign")
        return statement(op, moving=a, over=b, sign=c.sign())
    if op == "cancel":
        i = c.int_()
        c.keyword("with")
        lbl = c.label()
        c.keyword("assume")
        return statement(op, one=i, two=lbl, token=c.string())
    if op == "pair":
        lbl = c.label()
        c.keyword("framing")
        return statement(op, label=lbl, framing=c.int_())
    if op == "exchange":
        i = c.int_()
        c.keyword("as")
        lbl = c.label()
        token = None
        if c.at("word", "assume"):
            c.pos += 1
            token = c.string()
        return statement(op, one=i, label=lbl, token=token)
    if op == "rbd":
        p = c.kv("p", c.int_)
        handles = c.kv("handles", lambda: c.listing(c.label))
        return statement(op, p=p, handles=handles, ball=c.kv("ball", c.label))
    if op == "cork":
        name = c.label("NAME")
        return statement(op, name=name, link=c.kv("link", c.int_))
    if op == "twist":
        name = c.label("NAME")
        one = c.kv("one", c.int_)
        return statement(op, name=name, one=one, two=c.kv("two", c.label))
    if op == "certify":
        name = c.label("NAME")
        before = c.kv("before", lambda: c.label("NAME"))
        after = c.kv("after", lambda: c.label("NAME"))
        return statement(op, name=name, before=before, after=after, facts=c.kv("facts", lambda: c.listing(c.string)))
    if op == "assume":
        return statement(op, token=c.string())
    return _parse_assert(c)


def parse_line(text: str, lineno: int = 1) -> Line:
    toks, comment = tokenize(text, lineno)
    if not toks:
        return Line(None, comment)
    body = text.rstrip("\r\n") if comment is None else text[: len(text.rstrip("\r")) - len(comment)]
    c = _Cursor(toks, lineno, len(body.rstrip()) + 1)
    head = toks[0]
    if head.kind != "word":
        c.fail(["statement keyword"], head)
    if head.text not in STATEMENTS:
        raise UnknownStatement(lineno, head.col, head.text)
    c.pos = 1
    st = _parse_statement(c, head.text)
    c.end()
    return Line(st, comment)


def parse(text: str) -> Script:
    """Parse a whole script; raises on the first syntax problem."""
    lines, spans = [], []
    raw = text.split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    session_labels: dict[str, dict[str, int]] = {"main": {}}
    current = "main"
    for lineno, src in enumerate(raw, 1):
        ln = parse_line(src, lineno)
        st = ln.statement
        if st is not None:
            if st.op == "begin":
                current = st.get("name")
                session_labels[current] = {}
            elif st.op == "use":
                current = st.get("name")
                session_labels.setdefault(current, {})
            elif st.op == "save":
                session_labels[st.get("name")] = dict(session_labels[current])
            elif st.op == "handle":
                seen = session_labels[current]
                label = st.get("label")
                if label in seen:
                    raise DuplicateLabel(lineno, src.index(label, src.index("handle") + 6) + 1, label)
                seen[label] = lineno
        stripped = src.rstrip()
        start = len(src) - len(src.lstrip()) + 1
        spans.append(Span(lineno, start, len(stripped) + 1))
        lines.append(ln)
    return Script(tuple(lines), tuple(spans))


# -- printing --------------------------------------------------------------------

def _sign(s: int) -> str:
    return "+1" if s > 0 else "-1"


def _link(v: Optional[int]) -> str:
    return "?" if v is None else str(v)


def _string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _list(items) -> str:
    return "[" + ", ".join(items) + "]"


def _ref(r) -> str:
    if isinstance(r, tuple):
        return f"({r[0]},{r[1]},{r[2]})"
    return r


def _format_assert(g) -> str:
    kind = g("kind")
    head = f"assert {kind}"
    if kind in ("b2", "chi", "sigma", "det", "parity", "h1"):
        return f"{head} {g('value')}"
    if kind == "framing":
        return f"{head} {g('label')} {_link(g('value'))}"
    if kind == "class":
        return f"{head} {g('label')} {g('value')}"
    if kind == "form-ledger":
        return f"{head} {g('rank')} {g('sigma')} {g('parity')}"
    if kind == "gram-submatrix":
        return f"{head} {_list(g('labels'))} cp {g('p')}"
    if kind == "model":
        return f"{head} {g('m')} {g('n')}"
    if kind == "stable-equivalent":
        return f"{head} {_ref(g('left'))} {_ref(g('right'))} {'true' if g('value') else 'false'}"
    if kind == "same-ledger":
        return f"{head} {g('left')} {g('right')}"
    if kind == "contractible":
        return f"{head} {g('name')}"
    return f"{head} p={g('p')} bound={g('bound')} count={g('count')}"


def format_statement(st: Statement) -> str:
    g, op = st.get, st.op
    if op in ("begin", "use", "save"):
        return f"{op} {g('name')}"
    if op == "ambient":
        return "ambient " + " ".join(f"{k}:{_sign(s)}" for k, s in g("basis"))
    if op == "state":
        kind = "closed" if g("closed") else "open"
        return f"state {kind} zero={g('zero')} one={g('one')} three={g('three')} four={g('four')}"
    if op == "handle":
        if g("class") is not None:
            out = f"handle {g('label')} class {g('class')}"
        else:
            out = f"handle {g('label')} framing {_link(g('framing'))}"
        if g("through") is not None:
            out += " through=" + _list(f"{i}:{_link(v)}" for i, v in g("through"))
        return out
    if op == "link":
        return f"link {g('a')} {g('b')} {_link(g('value'))}"
    if op == "ledger":
        return f"ledger {g('rank')} {g('sigma')} {g('parity')}"
    if op == "blowup":
        out = f"blowup {g('label')} sign {_sign(g('sign'))}"
        if g("on"):
            out += " on=" + _list(f"{k}:{m}" for k, m in g("on"))
        return out
    if op == "blowdown":
        return f"blowdown {g('label')}"
    if op == "slide":
        return f"slide {g('moving')} over {g('over')} sign {_sign(g('sign'))}"
    if op == "cancel":
        return f"cancel {g('one')} with {g('two')} assume {_string(g('token'))}"
    if op == "pair":
        return f"pair {g('label')} framing {g('framing')}"
    if op == "exchange":
        out = f"exchange {g('one')} as {g('label')}"
        if g("token") is not None:
            out += f" assume {_string(g('token'))}"
        return out
    if op == "rbd":
        return f"rbd p={g('p')} handles={_list(g('handles'))} ball={g('ball')}"
    if op == "cork":
        return f"cork {g('name')} link={g('link')}"
    if op == "twist":
        return f"twist {g('name')} one={g('one')} two={g('two')}"
    if op == "certify":
        facts = _list(_string(f) for f in g("facts"))
        return f"certify {g('name')} before={g('before')} after={g('after')} facts={facts}"
    if op == "assume":
        return f"assume {_string(g('token'))}"
    if op == "assert":
        return _format_assert(g)
    raise ValueError(f"unknown statement {op!r}")


def format_line(ln: Line) -> str:
    if ln.statement is None:
        return ln.comment or ""
    text = format_statement(ln.statement)
    return f"{text}  {ln.comment}" if ln.comment else text


def print_script(s: Script) -> str:
    """Canonical text: one line per entry, trailing newline unless empty."""
    if not s.lines:
        return ""
    return "\n".join(format_line(ln) for ln in s.lines) + "\n"
