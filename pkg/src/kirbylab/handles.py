"""Handle presentations at the algebraic level and the checked Kirby moves.

A presentation keeps handle counts, the 2-handles (each with an optional
homology class over a diagonal ambient basis, a framing and its algebraic
linking with every 1-handle), and the pairwise linking of 2-handles that do
not carry classes.  Moves never mutate; each returns a new presentation.

Linking numbers that the data model cannot know are stored as ``None`` and
propagate through arithmetic.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from . import lattice
from .errors import (
    DanglingOneHandles,
    InvalidMove,
    LabelClash,
    MissingAssumptionToken,
    MissingClass,
    MixedRepresentation,
    NoSuchOneHandle,
    NonUnitLinking,
    NotClosed,
    NotExceptional,
    UnknownBasis,
    UnknownHandle,
    UnknownLinking,
)
from .lattice import HYPERBOLIC, FormClass, IntSymMatrix

Link = Optional[int]


def _add(*xs: Link) -> Link:
    if any(x is None for x in xs):
        return None
    return sum(xs)


def _mul(a: int, x: Link) -> Link:
    return None if x is None else a * x


def _prod(x: Link, y: Link) -> Link:
    return None if x is None or y is None else x * y


# -- homology ------------------------------------------------------------------

_TERM = re.compile(r"([+-]?)(\d*)([A-Za-z_][A-Za-z0-9_]*)")
_LABEL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class HomologyClass:
    """Integer combination of ambient basis labels.

    Zero coefficients are dropped; equality ignores term order, while the
    original order is kept for printing.
    """

    __slots__ = ("_items",)

    def __init__(self, coeffs: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[str, int] = {}
        for label, c in items:
            merged[label] = merged.get(label, 0) + int(c)
        self._items = tuple((k, v) for k, v in merged.items() if v)

    @classmethod
    def basis(cls, label: str) -> "HomologyClass":
        return cls({label: 1})

    @classmethod
    def parse(cls, text: str) -> "HomologyClass":
        """Parse ``7h-3e1-2e2`` style expressions (``0`` is the zero class)."""
        text = text.strip()
        if text == "0":
            return cls()
        pos = 0
        items = []
        while pos < len(text):
            m = _TERM.match(text, pos)
            if not m or (pos > 0 and not m.group(1)):
                raise ValueError(f"bad class expression {text!r} at offset {pos}")
            sign = -1 if m.group(1) == "-" else 1
            coeff = int(m.group(2)) if m.group(2) else 1
            items.append((m.group(3), sign * coeff))
            pos = m.end()
        if not items:
            raise ValueError(f"empty class expression {text!r}")
        return cls(items)

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def coefficient(self, label: str) -> int:
        return dict(self._items).get(label, 0)

    def labels(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self._items)

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        return HomologyClass(self._items + other._items)

    def __neg__(self) -> "HomologyClass":
        return HomologyClass((k, -v) for k, v in self._items)

    def __sub__(self, other: "HomologyClass") -> "HomologyClass":
        return self + (-other)

    def __rmul__(self, a: int) -> "HomologyClass":
        return HomologyClass((k, a * v) for k, v in self._items)

    def __eq__(self, other):
        if isinstance(other, HomologyClass):
            return dict(self._items) == dict(other._items)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._items))

    def __bool__(self):
        return bool(self._items)

    def __str__(self):
        return format_terms(self._items)

    def __repr__(self):
        return f"HomologyClass({str(self)!r})"


def format_terms(items: Iterable[tuple[str, int]]) -> str:
    out = []
    for k, v in items:
        if not v:
            continue
        mag = "" if abs(v) == 1 else str(abs(v))
        sign = "-" if v < 0 else ("+" if out else "")
        out.append(f"{sign}{mag}{k}")
    return "".join(out) or "0"


@dataclass(frozen=True)
class AmbientBasis:
    """Ordered diagonal basis: ``h^2 = 1``, ``e_i^2 = -1``, all cross terms zero."""

    names: tuple[str, ...] = ()
    squares: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.names) != len(self.squares):
            raise ValueError("names and squares differ in length")
        if len(set(self.names)) != len(self.names):
            raise LabelClash(f"duplicate ambient labels in {self.names}")
        for n, s in zip(self.names, self.squares):
            if s not in (1, -1):
                raise ValueError(f"square of {n} must be +1 or -1, got {s}")
            if not _LABEL.match(n):
                raise ValueError(f"bad ambient label {n!r}")

    @property
    def rank(self) -> int:
        return len(self.names)

    def square(self, label: str) -> int:
        try:
            return self.squares[self.names.index(label)]
        except ValueError:
            raise UnknownBasis(f"{label!r} is not an ambient basis label") from None

    def extended(self, label: str, square: int) -> "AmbientBasis":
        if label in self.names:
            raise LabelClash(f"ambient label {label!r} already exists")
        return AmbientBasis(self.names + (label,), self.squares + (square,))

    def without(self, label: str) -> "AmbientBasis":
        i = self.names.index(label)
        return AmbientBasis(self.names[:i] + self.names[i + 1:], self.squares[:i] + self.squares[i + 1:])

    def check(self, c: HomologyClass) -> None:
        for label in c.labels():
            self.square(label)

    def pair(self, a: HomologyClass, b: HomologyClass) -> int:
        bd = dict(b.items())
        return sum(self.square(k) * v * bd[k] for k, v in a.items() if k in bd)

    def vector(self, c: HomologyClass) -> list[int]:
        self.check(c)
        return [c.coefficient(n) for n in self.names]

    def gram(self) -> IntSymMatrix:
        return lattice.diagonal(self.squares)

    def format(self, c: HomologyClass) -> str:
        order = {n: i for i, n in enumerate(self.names)}
        return format_terms(sorted(c.items(), key=lambda kv: order.get(kv[0], len(order))))


# -- presentations ---------------------------------------------------------------

@dataclass(frozen=True)
class TwoHandle:
    label: str
    cls: Optional[HomologyClass]
    framing: Link
    one_links: tuple[Link, ...] = ()

    @property
    def has_class(self) -> bool:
        return self.cls is not None


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group ``Z^free + Z/t1 + Z/t2 + ...``."""

    free: int = 0
    torsion: tuple[int, ...] = ()

    def __str__(self):
        parts = ["Z"] * self.free + [f"Z/{t}" for t in self.torsion]
        return "+".join(parts) or "0"

    @property
    def trivial(self) -> bool:
        return not self.free and not self.torsion

    @classmethod
    def parse(cls, text: str) -> "AbelianGroup":
        text = text.strip()
        if text == "0":
            return cls()
        free, tors = 0, []
        for part in text.split("+"):
            if part == "Z":
                free += 1
            elif part.startswith("Z/") and part[2:].isdigit() and int(part[2:]) > 1:
                tors.append(int(part[2:]))
            else:
                raise ValueError(f"bad group descriptor {text!r}")
        return cls(free, tuple(sorted(tors)))

    @classmethod
    def cokernel(cls, rows: Sequence[Sequence[int]], ncols: int) -> "AbelianGroup":
        """``Z^ncols`` modulo the row span of ``rows``."""
        if not rows or not ncols:
            return cls(ncols, ())
        factors = lattice.invariant_factors(rows)
        nonzero = [d for d in factors if d]
        return cls(ncols - len(nonzero), tuple(sorted(d for d in nonzero if d > 1)))


@dataclass(frozen=True)
class Invariants:
    chi: int
    b2: Optional[int]
    h1: Optional[AbelianGroup]


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Presentation:
    zero_handles: int = 0
    one_handles: int = 0
    three_handles: int = 0
    four_handles: int = 0
    two_handles: tuple[TwoHandle, ...] = ()
    ambient: Optional[AmbientBasis] = None
    closed: bool = False
    assumptions: tuple[str, ...] = ()
    # linking of pairs where at least one handle carries no class; absent = 0
    links: tuple[tuple[tuple[str, str], Link], ...] = ()
    # explicit topological form ledger; None means "compute from the data"
    ledger: Optional[FormClass] = None
    notes: tuple[str, ...] = ()

    # -- lookup
    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(t.label for t in self.two_handles)

    def index(self, label: str) -> int:
        for i, t in enumerate(self.two_handles):
            if t.label == label:
                return i
        raise UnknownHandle(f"no 2-handle labelled {label!r}")

    def handle(self, label: str) -> TwoHandle:
        return self.two_handles[self.index(label)]

    def has(self, label: str) -> bool:
        return label in self.labels

    @property
    def chi(self) -> int:
        return self.zero_handles - self.one_handles + len(self.two_handles) - self.three_handles + self.four_handles

    def counts(self) -> tuple[int, int, int, int, int]:
        return (self.zero_handles, self.one_handles, len(self.two_handles), self.three_handles, self.four_handles)

    def link_map(self) -> dict[tuple[str, str], Link]:
        return dict(self.links)

    def linking(self, a: str, b: str) -> Link:
        ha, hb = self.handle(a), self.handle(b)
        if a == b:
            return ha.framing
        if ha.has_class and hb.has_class:
            return self.ambient.pair(ha.cls, hb.cls)
        return self.link_map().get(_key(a, b), 0)

    def square(self, c: HomologyClass) -> int:
        return self.ambient.pair(c, c)


def _freeze_links(d: Mapping[tuple[str, str], Link]) -> tuple:
    return tuple(sorted((k, v) for k, v in d.items() if v != 0))


def _rebuild(X: Presentation, handles: Sequence[TwoHandle], links: Mapping, **kw) -> Presentation:
    live = {h.label for h in handles}
    classed = {h.label for h in handles if h.has_class}
    kept = {k: v for k, v in links.items() if k[0] in live and k[1] in live and not (k[0] in classed and k[1] in classed)}
    return replace(X, two_handles=tuple(handles), links=_freeze_links(kept), **kw)


# -- construction ----------------------------------------------------------------

def standard_cp2() -> Presentation:
    """``CP^2`` as one 0-handle, a +1-framed 2-handle of class ``h``, one 4-handle."""
    amb = AmbientBasis(("h",), (1,))
    return Presentation(
        zero_handles=1,
        four_handles=1,
        two_handles=(TwoHandle("h", HomologyClass.basis("h"), 1, ()),),
        ambient=amb,
        closed=True,
    )


def standard_cp2_blown_up(k: int) -> Presentation:
    """``CP^2 # k CP^2-bar`` from ``k`` disjoint blowups of :func:`standard_cp2`."""
    X = standard_cp2()
    for i in range(1, k + 1):
        X = blow_up(X, -1, f"e{i}", {})
    return X


def set_counts(X: Presentation, zero=None, one=None, three=None, four=None, closed=None) -> Presentation:
    new_one = X.one_handles if one is None else one
    handles = []
    for h in X.two_handles:
        links = list(h.one_links)
        if new_one < len(links):
            if any(x != 0 for x in links[new_one:]):
                raise InvalidMove(f"cannot drop 1-handles linked by {h.label!r}")
            links = links[:new_one]
        links += [0] * (new_one - len(links))
        handles.append(replace(h, one_links=tuple(links)))
    return replace(
        X,
        zero_handles=X.zero_handles if zero is None else zero,
        one_handles=new_one,
        three_handles=X.three_handles if three is None else three,
        four_handles=X.four_handles if four is None else four,
        closed=X.closed if closed is None else closed,
        two_handles=tuple(handles),
    )


def extend_ambient(X: Presentation, names: Sequence[str], squares: Sequence[int]) -> Presentation:
    amb = X.ambient or AmbientBasis()
    for n, s in zip(names, squares):
        amb = amb.extended(n, s)
    return replace(X, ambient=amb)


def _one_links(X: Presentation, through: Mapping[int, int] | None) -> tuple[Link, ...]:
    links: list[Link] = [0] * X.one_handles
    for i, v in (through or {}).items():
        if not 1 <= i <= X.one_handles:
            raise NoSuchOneHandle(f"no 1-handle number {i}")
        links[i - 1] = v
    return tuple(links)


def add_handle(
    X: Presentation,
    label: str,
    cls: HomologyClass | None = None,
    framing: Link = None,
    through: Mapping[int, int] | None = None,
) -> Presentation:
    """Declare a 2-handle.  A class fixes the framing as its square."""
    if X.has(label):
        raise LabelClash(f"2-handle {label!r} already exists")
    if cls is not None:
        if X.ambient is None:
            raise UnknownBasis("declare an ambient basis before class-bearing handles")
        X.ambient.check(cls)
        sq = X.square(cls)
        if framing is not None and framing != sq:
            raise InvalidMove(f"framing {framing} of {label!r} differs from its square {sq}")
        framing = sq
    h = TwoHandle(label, cls, framing, _one_links(X, through))
    return replace(X, two_handles=X.two_handles + (h,))


def set_link(X: Presentation, a: str, b: str, value: Link) -> Presentation:
    ha, hb = X.handle(a), X.handle(b)
    if a == b:
        raise InvalidMove("use the framing to set a self-linking")
    if ha.has_class and hb.has_class:
        raise InvalidMove(f"{a!r} and {b!r} both carry classes; their linking is their pairing")
    links = X.link_map()
    links[_key(a, b)] = value
    return _rebuild(X, X.two_handles, links)


# -- moves -----------------------------------------------------------------------

def _require_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise InvalidMove(f"sign must be +1 or -1, got {sign}")


def blow_up(X: Presentation, sign: int, new_label: str, strand_multiplicities: Mapping[str, int]) -> Presentation:
    """Blow up with a ``sign``-framed unknot (``-1`` adds a ``CP^2-bar`` summand).

    Each listed handle passes ``m`` times through the new unknot; its class
    gains ``-m`` times the new generator.
    """
    _require_sign(sign)
    if X.has(new_label) or (X.ambient is not None and new_label in X.ambient.names):
        raise LabelClash(f"label {new_label!r} is already in use")
    for lbl in strand_multiplicities:
        X.index(lbl)
    mult = {k: v for k, v in strand_multiplicities.items() if v}
    links = X.link_map()
    handles = []
    if X.ambient is not None:
        amb = X.ambient.extended(new_label, sign)
        e = HomologyClass.basis(new_label)
        for h in X.two_handles:
            m = mult.get(h.label, 0)
            if m and not h.has_class:
                raise MissingClass(f"{h.label!r} carries no class")
            if m:
                c = h.cls - m * e
                h = replace(h, cls=c, framing=amb.pair(c, c))
            handles.append(h)
        new = TwoHandle(new_label, e, sign, (0,) * X.one_handles)
    else:
        amb = None
        for h in X.two_handles:
            m = mult.get(h.label, 0)
            if m:
                h = replace(h, framing=_add(h.framing, sign * m * m))
                links[_key(h.label, new_label)] = -m * sign
            handles.append(h)
        affected = sorted(mult)
        for i, a in enumerate(affected):
            for b in affected[i + 1:]:
                links[_key(a, b)] = _add(links.get(_key(a, b), 0), sign * mult[a] * mult[b])
        new = TwoHandle(new_label, None, sign, (0,) * X.one_handles)
    handles.append(new)
    ledger = X.ledger + lattice.unit_form(sign) if X.ledger is not None else None
    return _rebuild(X, handles, links, ambient=amb, ledger=ledger)


def blow_down(X: Presentation, label: str) -> Presentation:
    """Blow down a ``±1``-framed 2-handle split from every 1-handle.

    Every other handle ``c`` is reflected off the exceptional class ``v``:
    ``c -> c - (c.v)(v.v) v``, which is ``c + (c.v) v`` when ``v.v = -1``.
    """
    v = X.handle(label)
    if any(x != 0 for x in v.one_links):
        raise InvalidMove(f"{label!r} runs over a 1-handle")
    amb = X.ambient
    if v.has_class:
        eps = X.square(v.cls)
        if eps not in (1, -1):
            raise NotExceptional(f"{label!r} has square {eps}")
        items = v.cls.items()
        if len(items) != 1 or abs(items[0][1]) != 1:
            raise NotExceptional(f"{label!r} is not plus or minus an ambient generator")
        gen = items[0][0]
    else:
        eps = v.framing
        if eps not in (1, -1):
            raise NotExceptional(f"{label!r} has framing {eps}")
        gen = None
    lam = {h.label: X.linking(h.label, label) for h in X.two_handles if h.label != label}
    rest = [h for h in X.two_handles if h.label != label]
    if not v.has_class and any(h.has_class and lam[h.label] for h in rest):
        raise MixedRepresentation(f"{label!r} carries no class but links class-bearing handles")
    links = {}
    for i, a in enumerate(rest):
        for b in rest[i + 1:]:
            if a.has_class and b.has_class:
                continue
            links[_key(a.label, b.label)] = _add(X.linking(a.label, b.label), _mul(-eps, _prod(lam[a.label], lam[b.label])))
    if gen is not None:
        amb = amb.without(gen)
    handles = []
    for h in rest:
        if h.has_class:
            c = h.cls - (eps * lam[h.label]) * v.cls
            if gen is not None and c.coefficient(gen):
                raise InvalidMove("reflection left a component along the removed generator")
            h = replace(h, cls=c, framing=amb.pair(c, c))
        else:
            h = replace(h, framing=_add(h.framing, _mul(-eps, _prod(lam[h.label], lam[h.label]))))
        handles.append(h)
    notes = X.notes
    ledger = None
    if X.ledger is not None:
        notes = notes + ("form ledger dropped: blowdown leaves the parity of the complement open",)
    return _rebuild(X, handles, links, ambient=amb, ledger=ledger, notes=notes)


def slide(X: Presentation, moving: str, over: str, sign: int) -> Presentation:
    """Slide ``moving`` over ``over``: on homology ``a -> a + sign * b``."""
    _require_sign(sign)
    if moving == over:
        raise InvalidMove("a handle cannot slide over itself")
    A, B = X.handle(moving), X.handle(over)
    if A.has_class != B.has_class:
        raise MixedRepresentation(f"exactly one of {moving!r}, {over!r} carries a class")
    one = tuple(_add(x, _mul(sign, y)) for x, y in zip(A.one_links, B.one_links))
    links = X.link_map()
    for h in X.two_handles:
        c = h.label
        if c == moving:
            continue
        if A.has_class and h.has_class:
            continue
        links[_key(moving, c)] = _add(X.linking(moving, c), _mul(sign, X.linking(over, c)))
    if A.has_class:
        cls = A.cls + sign * B.cls
        new = replace(A, cls=cls, framing=X.square(cls), one_links=one)
    else:
        f = _add(A.framing, B.framing, _mul(2 * sign, X.linking(moving, over)))
        new = replace(A, framing=f, one_links=one)
    handles = [new if h.label == moving else h for h in X.two_handles]
    return _rebuild(X, handles, links)


def cancel_pair(X: Presentation, one_handle: int, two_handle: str, token: str | None) -> Presentation:
    """Cancel 1-handle number ``one_handle`` (1-based) against ``two_handle``.

    Other handles running over the 1-handle are first slid off over the
    cancelling 2-handle.  The geometric-once condition is not visible to the
    engine, so ``token`` must name it; it is appended to the assumptions.
    """
    if not 1 <= one_handle <= X.one_handles:
        raise NoSuchOneHandle(f"no 1-handle number {one_handle}")
    k = X.handle(two_handle)
    col = one_handle - 1
    eps = k.one_links[col]
    if eps is None:
        raise UnknownLinking(f"linking of {two_handle!r} with 1-handle {one_handle} is unknown")
    if abs(eps) != 1:
        raise NonUnitLinking(f"{two_handle!r} links 1-handle {one_handle} algebraically {eps} times")
    if not token or not token.strip():
        raise MissingAssumptionToken("cancellation needs a geometric-cancellation assumption")
    for h in X.two_handles:
        if h.label == two_handle:
            continue
        lk = h.one_links[col]
        if lk is None:
            raise UnknownLinking(f"linking of {h.label!r} with 1-handle {one_handle} is unknown")
        s = -eps if lk > 0 else eps
        for _ in range(abs(lk)):
            X = slide(X, h.label, two_handle, s)
    handles = [
        replace(h, one_links=h.one_links[:col] + h.one_links[col + 1:])
        for h in X.two_handles
        if h.label != two_handle
    ]
    return _rebuild(
        X,
        handles,
        X.link_map(),
        one_handles=X.one_handles - 1,
        assumptions=X.assumptions + (token,),
    )


def introduce_pair(X: Presentation, label: str, framing: int) -> Presentation:
    """Add a cancelling 1-handle / 2-handle pair, split from everything else."""
    if X.has(label):
        raise LabelClash(f"2-handle {label!r} already exists")
    handles = [replace(h, one_links=h.one_links + (0,)) for h in X.two_handles]
    handles.append(TwoHandle(label, None, framing, (0,) * X.one_handles + (1,)))
    return _rebuild(X, handles, X.link_map(), one_handles=X.one_handles + 1)


def zero_dot_exchange(X: Presentation, one_handle: int, new_label: str, token: str | None = None) -> Presentation:
    """Turn a dotted circle into a 0-framed unknot (surgery on a circle).

    Each 2-handle's linking with the new unknot is its former linking with the
    dotted circle.  On an explicit form ledger the result is ledger + H when
    ``token`` asserts the geometric condition or when the ledger is odd (for
    non-spin manifolds both surgery results agree); otherwise the ledger is
    dropped.
    """
    if not 1 <= one_handle <= X.one_handles:
        raise NoSuchOneHandle(f"no 1-handle number {one_handle}")
    if X.has(new_label):
        raise LabelClash(f"2-handle {new_label!r} already exists")
    col = one_handle - 1
    links = X.link_map()
    handles = []
    for h in X.two_handles:
        links[_key(h.label, new_label)] = h.one_links[col]
        handles.append(replace(h, one_links=h.one_links[:col] + h.one_links[col + 1:]))
    handles.append(TwoHandle(new_label, None, 0, (0,) * (X.one_handles - 1)))
    ledger, notes, assumptions = None, X.notes, X.assumptions
    if token:
        assumptions = assumptions + (token,)
    if X.ledger is not None:
        if token or X.ledger.parity == lattice.ODD:
            ledger = X.ledger + HYPERBOLIC
        else:
            notes = notes + ("form ledger dropped: surgery on an even form may give either stabilization",)
    return _rebuild(
        X, handles, links, one_handles=X.one_handles - 1, ledger=ledger, notes=notes, assumptions=assumptions
    )


# -- invariants ------------------------------------------------------------------

def boundary_rows(X: Presentation) -> list[list[Link]]:
    return [list(h.one_links) for h in X.two_handles]


def linking_matrix(X: Presentation) -> list[list[Link]]:
    labels = X.labels
    return [[X.linking(a, b) for b in labels] for a in labels]


def h1(X: Presentation) -> Optional[AbelianGroup]:
    rows = boundary_rows(X)
    if any(x is None for r in rows for x in r):
        return None
    return AbelianGroup.cokernel(rows, X.one_handles)


def invariants(X: Presentation) -> Invariants:
    """Euler characteristic, ``b2`` shadow and ``H1`` shadow from handle data.

    For closed presentations ``b2 = chi - 2 + 2 b1`` (Poincare duality);
    otherwise ``b2`` is the rank of the kernel of the 2-to-1 boundary map.
    """
    g = h1(X)
    if g is None:
        return Invariants(X.chi, None, None)
    if X.closed:
        b2 = X.chi - 2 + 2 * g.free
    else:
        rows = boundary_rows(X)
        rank = sum(1 for d in lattice.invariant_factors(rows) if d) if rows and X.one_handles else 0
        b2 = len(X.two_handles) - rank
    return Invariants(X.chi, b2, g)


def intersection_form(X: Presentation) -> IntSymMatrix:
    """Gram matrix of the 2-handle classes of a closed, 1-handle-free presentation."""
    if not X.closed:
        raise NotClosed("presentation is not closed")
    if X.one_handles:
        raise DanglingOneHandles(f"{X.one_handles} 1-handle(s) remain; cancel them first")
    missing = [h.label for h in X.two_handles if not h.has_class]
    if missing:
        raise MissingClass(f"handles without classes: {', '.join(missing)}")
    cs = [h.cls for h in X.two_handles]
    return IntSymMatrix([[X.ambient.pair(a, b) for b in cs] for a in cs])


def linking_form(X: Presentation) -> IntSymMatrix:
    """The linking matrix restricted to the kernel of the 2-to-1 boundary map."""
    L = linking_matrix(X)
    if any(x is None for r in L for x in r):
        raise UnknownLinking("some 2-handle linking numbers are unknown")
    rows = boundary_rows(X)
    if any(x is None for r in rows for x in r):
        raise UnknownLinking("some 1-handle linking numbers are unknown")
    n = len(L)
    if X.one_handles and n:
        K = lattice.kernel_basis(lattice.transpose(rows), n)
    else:
        K = [[int(i == j) for j in range(n)] for i in range(n)]
    return IntSymMatrix([[sum(x[i] * L[i][j] * y[j] for i in range(n) if x[i] for j in range(n) if y[j]) for y in K] for x in K])


def computed_ledger(X: Presentation) -> Optional[FormClass]:
    try:
        Q = linking_form(X)
    except UnknownLinking:
        return None
    return lattice.form_class(Q, modulo_radical=True)


def form_ledger(X: Presentation) -> Optional[FormClass]:
    """The explicit topological ledger if set, else the form computed from the data."""
    if X.ledger is not None:
        return X.ledger
    return computed_ledger(X)


def framing_violations(X: Presentation) -> list[str]:
    """Labels of class-bearing handles whose framing is not their square."""
    return [h.label for h in X.two_handles if h.has_class and h.framing != X.square(h.cls)]
