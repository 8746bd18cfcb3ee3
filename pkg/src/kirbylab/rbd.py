"""Linear plumbings ``C_p``, embedding checks and search, the rational blowdown."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from . import lattice
from .errors import BadP, EmbeddingInvalid, InvalidMove, NotClosed
from .handles import (
    HomologyClass,
    Presentation,
    TwoHandle,
    _freeze_links,
    _key,
    computed_ledger,
)
from .lattice import FormClass, IntSymMatrix
from .report import Report


def cp_matrix(p: int) -> IntSymMatrix:
    """Gram matrix of ``u_1 ... u_{p-1}``: a -2 chain ending in ``-p-2``."""
    if p < 2:
        raise BadP(f"p must be at least 2, got {p}")
    n = p - 1
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = -2
        if i + 1 < n:
            rows[i][i + 1] = rows[i + 1][i] = 1
    rows[n - 1][n - 1] = -p - 2
    return IntSymMatrix(rows)


@dataclass(frozen=True)
class BpDescriptor:
    """Homological shadow of the rational ball ``B_p``."""

    p: int
    h1_order: int
    rational_ball: bool = True

    def consistent(self) -> bool:
        return self.h1_order ** 2 == abs(lattice.determinant(cp_matrix(self.p)))


def bp_descriptor(p: int) -> BpDescriptor:
    cp_matrix(p)
    return BpDescriptor(p, p)


@dataclass(frozen=True)
class CpEmbedding:
    p: int
    classes: tuple[HomologyClass, ...]
    handle_labels: tuple[str, ...]
    multipliers: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.multipliers:
            object.__setattr__(self, "multipliers", (1,) * len(self.handle_labels))

    @classmethod
    def from_handles(cls, X: Presentation, p: int, labels: Sequence[str], multipliers: Sequence[int] = ()):
        mult = tuple(multipliers) or (1,) * len(labels)
        classes = tuple(k * X.handle(lbl).cls for lbl, k in zip(labels, mult))
        return cls(p, classes, tuple(labels), mult)


def verify_embedding(X: Presentation, E: CpEmbedding) -> Report:
    """Check the claimed classes against the handles and the Gram against ``cp_matrix``."""
    rep = Report()
    try:
        target = cp_matrix(E.p)
    except BadP as exc:
        rep.check(False, "p", str(exc))
        return rep
    n = E.p - 1
    if not rep.check(
        len(E.classes) == n and len(E.handle_labels) == n and len(E.multipliers) == n,
        "length",
        f"{len(E.classes)} classes, {len(E.handle_labels)} handles; C_{E.p} needs {n}",
    ):
        return rep
    if X.ambient is None:
        rep.check(False, "ambient", "presentation carries no homology classes")
        return rep
    ok = True
    for i, (lbl, c, k) in enumerate(zip(E.handle_labels, E.classes, E.multipliers), 1):
        if not X.has(lbl):
            ok = rep.check(False, f"u{i} handle", f"no 2-handle labelled {lbl!r}") and ok
            continue
        h = X.handle(lbl)
        if not h.has_class:
            ok = rep.check(False, f"u{i} handle", f"{lbl!r} carries no class") and ok
            continue
        if c != k * h.cls:
            ok = rep.check(
                False, f"u{i} class", f"claimed {X.ambient.format(c)}, handle {lbl} has {X.ambient.format(h.cls)}"
            ) and ok
    if len(set(E.handle_labels)) != n:
        ok = rep.check(False, "distinct handles", f"repeated labels in {E.handle_labels}") and ok
    try:
        for c in E.classes:
            X.ambient.check(c)
    except Exception as exc:
        rep.check(False, "classes", str(exc))
        return rep
    mismatches = []
    for i in range(n):
        for j in range(n):
            got = X.ambient.pair(E.classes[i], E.classes[j])
            if got != target[i, j]:
                mismatches.append((i, j, got))
    for i, j, got in mismatches:
        rep.check(False, f"u{i + 1}.u{j + 1}", f"got {got}, C_{E.p} needs {target[i, j]}")
    if not mismatches:
        rep.check(True, "gram", f"{n * n}/{n * n} entries equal cp_matrix({E.p})")
    if ok and not mismatches:
        rep.check(True, "classes", "every claimed class matches its handle")
    return rep


def gram_of(X: Presentation, classes: Sequence[HomologyClass]) -> IntSymMatrix:
    return IntSymMatrix([[X.ambient.pair(a, b) for b in classes] for a in classes])


def boundary_residues(p: int, pairings: Sequence[Sequence[int]]) -> list[int]:
    """Image in ``H1(B_p) = Z/p`` of each pairing vector ``(c.u_1, ..., c.u_{p-1})``.

    Pairing vectors live in ``H1`` of the common boundary, ``coker cp_matrix(p)``,
    cyclic of order ``p^2``; the ball's ``H1`` is its unique quotient of order
    ``p``.  A row of the adjugate realises the isomorphism with ``Z/p^2``, so
    the residue is that row's dot product reduced mod ``p`` (symmetric range).
    The identification is fixed up to a unit of ``Z/p``.
    """
    Q = cp_matrix(p)
    n = p - 1
    det = lattice.determinant(Q)
    inv = _inverse(Q)
    adj = [[int(det * inv[i][j]) for j in range(n)] for i in range(n)]
    row = next(r for r in adj if any(x % p for x in r))
    out = []
    for v in pairings:
        r = sum(a * b for a, b in zip(row, v)) % p
        out.append(r - p if r > p // 2 else r)
    return out


def _inverse(M: IntSymMatrix) -> list[list[Fraction]]:
    n = M.n
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.entries)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        d = A[c][c]
        A[c] = [x / d for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [r[n:] for r in A]


def complement_form(X: Presentation, E: CpEmbedding) -> FormClass:
    vecs = [X.ambient.vector(c) for c in E.classes]
    gram, _ = lattice.orthogonal_complement(X.ambient.gram(), vecs)
    return lattice.form_class(gram)


def rational_blowdown(X: Presentation, E: CpEmbedding, ball_label: str = "b") -> Presentation:
    """Replace the embedded ``C_p`` by ``B_p``.

    The realising handles are removed and the ball is glued as a dotted
    circle with a ``(p-1)``-framed 2-handle running ``p`` times over it.  The
    remaining handles lose their classes (framings are kept as squares) and
    run over the new dotted circle by their boundary residues.  How the
    ball's 2-handle links the rest is not algebraic data and is recorded as
    unknown.  The closed form becomes the topological ledger: rank,
    signature and parity of the integral orthogonal complement of the
    embedding.
    """
    if not X.closed:
        raise NotClosed("rational blowdown needs a closed presentation")
    rep = verify_embedding(X, E)
    if not rep.verified:
        raise EmbeddingInvalid("; ".join(f"{e.check}: {e.detail}" for e in rep.failures))
    if X.has(ball_label):
        raise InvalidMove(f"label {ball_label!r} is already in use")
    before = computed_ledger(X)
    if before is None or before.rank != X.ambient.rank:
        raise InvalidMove("the ambient basis does not carry the second homology of this presentation")
    p = E.p
    after = complement_form(X, E)
    if after.rank != before.rank - (p - 1) or after.signature != before.signature + (p - 1):
        raise InvalidMove(f"complement {after} breaks the blowdown ledger from {before}")

    removed = set(E.handle_labels)
    rest = [h for h in X.two_handles if h.label not in removed]
    pairings = [[X.ambient.pair(h.cls, u) for u in E.classes] for h in rest]
    residues = boundary_residues(p, pairings)
    links = {}
    for i, a in enumerate(rest):
        for b in rest[i + 1:]:
            links[_key(a.label, b.label)] = X.linking(a.label, b.label)
    handles = []
    for h, r in zip(rest, residues):
        handles.append(TwoHandle(h.label, None, h.framing, h.one_links + (r,)))
    for h in rest:
        links[_key(h.label, ball_label)] = None
    handles.append(TwoHandle(ball_label, None, p - 1, (0,) * X.one_handles + (p,)))
    note = (
        f"rational blowdown along C_{p} ({', '.join(E.handle_labels)}); B_{p} glued with H1 of order {p}; "
        "well-defined since every self-diffeomorphism of the boundary extends over the ball"
    )
    return replace(
        X,
        one_handles=X.one_handles + 1,
        two_handles=tuple(handles),
        ambient=None,
        links=_freeze_links(links),
        ledger=FormClass(after.rank, after.signature, after.parity),
        notes=X.notes + (note,),
    )


def enumerate_embeddings(X: Presentation, p: int, coeff_bound: int) -> list[CpEmbedding]:
    """All ordered chains of handle classes, scaled by ``1 <= |k| <= coeff_bound``,
    whose Gram matrix is ``cp_matrix(p)``.

    Output is sorted by the tuple of handle labels, then by multipliers.
    """
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be at least 1")
    target = cp_matrix(p)
    n = p - 1
    if X.ambient is None:
        return []
    pool = [h for h in X.two_handles if h.has_class]
    amb = X.ambient
    ks = [k for m in range(1, coeff_bound + 1) for k in (m, -m)]
    per_slot = []
    for j in range(n):
        per_slot.append(
            [(h, k) for h in pool for k in ks if k * k * amb.pair(h.cls, h.cls) == target[j, j]]
        )
    found = []

    def extend(chain):
        j = len(chain)
        if j == n:
            found.append(tuple(chain))
            return
        used = {h.label for h, _ in chain}
        for h, k in per_slot[j]:
            if h.label in used:
                continue
            if all(ki * k * amb.pair(hi.cls, h.cls) == target[i, j] for i, (hi, ki) in enumerate(chain)):
                chain.append((h, k))
                extend(chain)
                chain.pop()

    extend([])
    found.sort(key=lambda ch: (tuple(h.label for h, _ in ch), tuple(k for _, k in ch)))
    return [
        CpEmbedding(p, tuple(k * h.cls for h, k in ch), tuple(h.label for h, _ in ch), tuple(k for _, k in ch))
        for ch in found
    ]
