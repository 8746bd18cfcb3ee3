"""Cork data, contractibility checks, cork twists and cork certificates.

The involution of the cork boundary is modelled only as the exchange of the
dot and the zero on the embedded 1-handle / 2-handle pair.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import EmbeddingTokensInvalid
from .handles import Presentation, TwoHandle, _freeze_links, _key, h1, invariants
from .lattice import FormClass
from .report import IMPORTED, WARN, Report

DOT_ZERO_SWAP = "dot_zero_swap"


def cork_presentation(link: int = 1) -> Presentation:
    """One 0-handle, one dotted circle, one 0-framed 2-handle linking it ``link`` times."""
    return Presentation(
        zero_handles=1,
        one_handles=1,
        two_handles=(TwoHandle("k", None, 0, (link,)),),
    )


@dataclass(frozen=True)
class CorkPresentation:
    name: str
    presentation: Presentation
    algebraic_link: int
    twist_involution: str = DOT_ZERO_SWAP


def w2() -> CorkPresentation:
    # algebraic link 1 is forced: a cork is contractible, so H1 = Z/|link| must vanish
    return CorkPresentation("W2", cork_presentation(1), 1)


def make_cork(name: str, link: int) -> CorkPresentation:
    return CorkPresentation(name, cork_presentation(link), link)


def verify_contractible(C: CorkPresentation) -> Report:
    rep = Report()
    X = C.presentation
    counts = X.counts()
    rep.check(counts == (1, 1, 1, 0, 0), "handle-counts", f"(0,1,2,3,4)-handles = {counts}")
    rep.check(X.chi == 1, "chi", f"chi = {X.chi}")
    data_link = X.two_handles[0].one_links[0] if len(X.two_handles) == 1 and X.one_handles == 1 else None
    rep.check(
        abs(C.algebraic_link) == 1 and data_link == C.algebraic_link,
        "link",
        f"algebraic link {C.algebraic_link}, presentation link {data_link}",
    )
    g = h1(X)
    inv = invariants(X)
    rep.check(
        g is not None and g.trivial and inv.b2 == 0,
        "homology",
        f"H1 = {g}, b2 = {inv.b2}",
    )
    rep.check(C.twist_involution == DOT_ZERO_SWAP, "involution", C.twist_involution)
    rep.add("assumed", "simply-connected", f"pi1({C.name}) = 1 is read off the diagram, not computed")
    return rep


def _twist_marker(C: CorkPresentation, one_handle: int, two_handle: str) -> str:
    return f"cork twist along {C.name} (1-handle {one_handle}, 2-handle {two_handle})"


def cork_twist(X: Presentation, C: CorkPresentation, one_handle: int, two_handle: str) -> Presentation:
    """Exchange dot and zero on the marked pair.

    The dotted circle becomes the 0-framed unknot and vice versa: for every
    other 2-handle, its linking with 1-handle ``one_handle`` and its linking
    with ``two_handle`` trade places.  Twisting twice restores the input.
    """
    if not 1 <= one_handle <= X.one_handles:
        raise EmbeddingTokensInvalid(f"no 1-handle number {one_handle}")
    if not X.has(two_handle):
        raise EmbeddingTokensInvalid(f"no 2-handle labelled {two_handle!r}")
    w = X.handle(two_handle)
    col = one_handle - 1
    if w.has_class:
        raise EmbeddingTokensInvalid(f"{two_handle!r} carries a homology class; a cork 2-handle cannot")
    cork_h = C.presentation.two_handles[0]
    if w.framing != cork_h.framing:
        raise EmbeddingTokensInvalid(f"{two_handle!r} has framing {w.framing}, the cork needs {cork_h.framing}")
    if w.one_links[col] is None or abs(w.one_links[col]) != abs(C.algebraic_link):
        raise EmbeddingTokensInvalid(
            f"{two_handle!r} links 1-handle {one_handle} {w.one_links[col]} times, the cork needs {C.algebraic_link}"
        )
    if any(x != 0 for j, x in enumerate(w.one_links) if j != col):
        raise EmbeddingTokensInvalid(f"{two_handle!r} runs over other 1-handles")
    links = X.link_map()
    handles = []
    for h in X.two_handles:
        if h.label == two_handle:
            handles.append(h)
            continue
        if h.has_class:
            raise EmbeddingTokensInvalid(f"{h.label!r} carries a class; twist a class-free presentation")
        old_dot = h.one_links[col]
        old_zero = X.linking(h.label, two_handle)
        links[_key(h.label, two_handle)] = old_dot
        one = h.one_links[:col] + (old_zero,) + h.one_links[col + 1:]
        handles.append(replace(h, one_links=one))
    marker = _twist_marker(C, one_handle, two_handle)
    notes = X.notes[:-1] if X.notes and X.notes[-1] == marker else X.notes + (marker,)
    return replace(X, two_handles=tuple(handles), links=_freeze_links(links), notes=notes)


@dataclass(frozen=True)
class CorkCertificate:
    ambient_before: Optional[FormClass]
    ambient_after: Optional[FormClass]
    cork: CorkPresentation
    external_facts: tuple[str, ...] = ()


def check_certificate(cert: CorkCertificate) -> Report:
    """Machine-check the homeomorphism half; list the smooth half as imported."""
    rep = Report()
    rep.absorb(verify_contractible(cert.cork))
    a, b = cert.ambient_before, cert.ambient_after
    if a is None or b is None:
        rep.check(False, "ledgers", "a ledger is unknown")
    else:
        rep.check(a.triple() == b.triple(), "ledgers", f"before ({a}) vs after ({b})")
    if cert.external_facts:
        for fact in cert.external_facts:
            rep.add(IMPORTED, "smooth distinction", fact)
    else:
        rep.add(WARN, "smooth distinction", "no external fact given: the cork claim is unsupported on the smooth side")
    return rep
