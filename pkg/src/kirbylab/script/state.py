"""Presentations to and from ``state`` blocks of the script language."""
from __future__ import annotations

from dataclasses import replace

from ..errors import ScriptError
from ..handles import Presentation
from .replay import replay_full
from .syntax import Line, Script, Statement, print_script, statement

_DECLARATIONS = {"ambient", "state", "handle", "link", "ledger", "assume"}


def to_state_block(X: Presentation) -> str:
    """Declarations that rebuild ``X`` (notes are not carried)."""
    sts = []
    if X.ambient is not None:
        sts.append(statement("ambient", basis=tuple(zip(X.ambient.names, X.ambient.squares))))
    sts.append(
        statement(
            "state", closed=X.closed, zero=X.zero_handles, one=X.one_handles,
            three=X.three_handles, four=X.four_handles,
        )
    )
    for h in X.two_handles:
        through = tuple((i, v) for i, v in enumerate(h.one_links, 1) if v != 0) or None
        if h.has_class:
            args = (("label", h.label), ("class", h.cls), ("through", through))
        else:
            args = (("label", h.label), ("framing", h.framing), ("through", through))
        sts.append(Statement("handle", args))
    for (a, b), v in X.links:
        sts.append(statement("link", a=a, b=b, value=v))
    if X.ledger is not None:
        f = X.ledger
        sts.append(statement("ledger", rank=f.rank, sigma=f.signature, parity=f.parity))
    for token in X.assumptions:
        sts.append(statement("assume", token=token))
    return print_script(Script(tuple(Line(s) for s in sts)))


def from_state_block(script: Script) -> Presentation:
    """Rebuild a presentation from declarations only."""
    bad = [st.op for st in script.statements if st.op not in _DECLARATIONS]
    if bad:
        raise ScriptError(f"state blocks hold declarations only, found {bad[0]!r}")
    result = replay_full(script)
    if not result.verified:
        raise ScriptError("; ".join(e.detail for e in result.report.failures))
    X = result.state
    tokens = tuple(e.detail for e in result.assumptions if e.check == "assume")
    return replace(X, assumptions=X.assumptions + tokens)
