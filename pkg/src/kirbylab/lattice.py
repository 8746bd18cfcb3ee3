"""Exact linear algebra for integral symmetric bilinear forms.

Everything here works on plain Python integers and ``Fraction``; no floating
point is ever involved, so every invariant returned is an exact claim.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DefiniteInput, DegenerateSpan, ParityMismatch

EVEN = "even"
ODD = "odd"


class IntSymMatrix:
    """A square symmetric integer matrix, immutable after construction."""

    __slots__ = ("_rows",)

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        n = len(rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise ValueError(f"row {i} has length {len(r)}, expected {n}")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        self._rows = rows

    @property
    def n(self) -> int:
        return len(self._rows)

    @property
    def entries(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        if isinstance(other, IntSymMatrix):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"IntSymMatrix({[list(r) for r in self._rows]})"

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self._rows[i][i] for i in range(self.n))

    def submatrix(self, indices: Sequence[int]) -> "IntSymMatrix":
        return IntSymMatrix([[self._rows[i][j] for j in indices] for i in indices])

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        rows = self._rows
        return sum(x[i] * rows[i][j] * y[j] for i in range(self.n) if x[i] for j in range(self.n) if y[j])

    def congruent(self, U: Sequence[Sequence[int]]) -> "IntSymMatrix":
        """Return ``U^T M U``."""
        UT = transpose(U)
        return IntSymMatrix(matmul(matmul(UT, self._rows), U))

    def to_grid(self) -> str:
        lines = [str(self.n)]
        lines += [" ".join(str(x) for x in r) for r in self._rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_grid(cls, text: str) -> "IntSymMatrix":
        """Parse the row-major grid format: first line is the dimension."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ValueError("empty matrix file")
        try:
            n = int(lines[0])
        except ValueError:
            raise ValueError(f"first line must be the dimension, got {lines[0]!r}") from None
        if n < 0:
            raise ValueError("dimension must be non-negative")
        body = lines[1:]
        if len(body) != n:
            raise ValueError(f"expected {n} rows, got {len(body)}")
        try:
            rows = [[int(tok) for tok in ln.split()] for ln in body]
        except ValueError as exc:
            raise ValueError(f"non-integer entry: {exc}") from None
        return cls(rows)


def identity(n: int) -> IntSymMatrix:
    return IntSymMatrix([[int(i == j) for j in range(n)] for i in range(n)])


def diagonal(values: Sequence[int]) -> IntSymMatrix:
    n = len(values)
    return IntSymMatrix([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])


def hyperbolic() -> IntSymMatrix:
    return IntSymMatrix([[0, 1], [1, 0]])


def direct_sum(*blocks: IntSymMatrix) -> IntSymMatrix:
    n = sum(b.n for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                rows[off + i][off + j] = b[i, j]
        off += b.n
    return IntSymMatrix(rows)


# -- plain integer matrix helpers -------------------------------------------

def transpose(A: Sequence[Sequence[int]]) -> list[list[int]]:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def _eye(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


# -- invariants ----------------------------------------------------------------

def signature(M: IntSymMatrix) -> tuple[int, int]:
    """Return ``(signature, nullity)`` by symmetric elimination over Q.

    Each step is a congruence, so Sylvester's law of inertia makes the count
    of positive and negative pivots the inertia of ``M``.
    """
    A = [[Fraction(x) for x in row] for row in M.entries]
    live = list(range(M.n))
    pos = neg = 0
    while live:
        piv = next((i for i in live if A[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in live for j in live if i < j and A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # x_i <- x_i + x_j makes the (i, i) entry 2*A[i][j] != 0
            for k in range(len(A)):
                A[i][k] += A[j][k]
            for k in range(len(A)):
                A[k][i] += A[k][j]
            piv = i
        d = A[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        live.remove(piv)
        for r in live:
            f = A[r][piv] / d
            if f:
                for c in live:
                    A[r][c] -= f * A[piv][c]
    return pos - neg, M.n - pos - neg


def determinant(M) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    rows = M.entries if isinstance(M, IntSymMatrix) else M
    A = [list(r) for r in rows]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def parity(M: IntSymMatrix) -> str:
    """``"even"`` iff every diagonal entry is even."""
    return EVEN if all(d % 2 == 0 for d in M.diagonal()) else ODD


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return ``(D, U, V)`` with ``U A V = D`` and ``d1 | d2 | ...``.

    ``A`` is any m x n integer matrix (lists of rows). ``U`` and ``V`` are
    unimodular; diagonal entries of ``D`` are non-negative.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(r) for r in A]
    U = _eye(m)
    V = _eye(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M_ in (D, V):
            for r in M_:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        for M_ in (D, U):
            rs, rd = M_[src], M_[dst]
            for k in range(len(rd)):
                rd[k] += q * rs[k]

    def add_col(dst, src, q):  # col dst += q * col src
        for M_ in (D, V):
            for r in M_:
                r[dst] += q * r[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        done = False
            if not done:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and D[t][t] < 0:
            for M_ in (D, U):
                M_[t] = [-x for x in M_[t]]
    return D, U, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    D, _, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def kernel_basis(A: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """Basis of the saturated integer kernel ``{x : A x = 0}``."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return _eye(n)
    D, _, V = smith_normal_form(A)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [[V[row][c] for row in range(n)] for c in range(r, n)]


def discriminant(M: IntSymMatrix) -> int:
    """|det| of the form induced on ``Z^n / radical``."""
    out = 1
    for d in invariant_factors(M.entries) if M.n else []:
        if d:
            out *= d
    return out


# -- classification --------------------------------------------------------------

def _definiteness(rank: int, sig: int, nullity: int) -> str:
    if nullity:
        return "degenerate"
    if rank and sig == rank:
        return "posdef"
    if rank and sig == -rank:
        return "negdef"
    return "indefinite"


@dataclass(frozen=True)
class FormClass:
    rank: int
    signature: int
    parity: str
    definiteness: str = ""

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.rank < 0 or abs(self.signature) > self.rank:
            raise ValueError(f"|signature| must not exceed rank: {self.rank}, {self.signature}")
        if (self.rank - self.signature) % 2:
            raise ValueError("signature and rank must have the same parity")
        if not self.definiteness:
            object.__setattr__(self, "definiteness", _definiteness(self.rank, self.signature, 0))

    def triple(self) -> tuple[int, int, str]:
        return (self.rank, self.signature, self.parity)

    def __add__(self, other: "FormClass") -> "FormClass":
        par = ODD if ODD in (self.parity, other.parity) else EVEN
        return FormClass(self.rank + other.rank, self.signature + other.signature, par)

    def __str__(self):
        return f"b2={self.rank} sigma={self.signature} parity={self.parity}"


HYPERBOLIC = FormClass(2, 0, EVEN)


def unit_form(sign: int) -> FormClass:
    return FormClass(1, 1 if sign > 0 else -1, ODD)


def form_class(M: IntSymMatrix, modulo_radical: bool = False) -> FormClass:
    """Rank (of the nondegenerate part), signature, parity, definiteness.

    With ``modulo_radical`` the definiteness describes the induced form on
    ``Z^n / radical``, which is how handle presentations with cancelling
    3-handles are read.
    """
    sig, nullity = signature(M)
    rank = M.n - nullity
    kind = _definiteness(rank, sig, 0 if modulo_radical else nullity)
    return FormClass(rank, sig, parity(M), kind)


def classify_indefinite_odd(rank: int, sig: int) -> tuple[int, int]:
    """``(m, n)`` with the odd indefinite unimodular form ``m<1> + n<-1>``."""
    if rank <= 0 or abs(sig) >= rank:
        raise DefiniteInput(f"rank {rank}, signature {sig} is not indefinite")
    if (rank - sig) % 2:
        raise ParityMismatch(f"rank {rank} and signature {sig} differ in parity")
    return (rank + sig) // 2, (rank - sig) // 2


def stable_equivalent(f1: FormClass, f2: FormClass) -> bool:
    """Whether ``f1 + H`` and ``f2 + H`` are isomorphic unimodular forms.

    Both sums are indefinite, where rank, signature and parity are complete.
    """
    return f1.triple() == f2.triple()


def rokhlin_constraint(f: FormClass) -> bool:
    if f.parity == ODD:
        return True
    return f.signature % 16 == 0


def orthogonal_complement(M: IntSymMatrix, span: Sequence[Sequence[int]]):
    """Integral orthogonal complement of ``span`` inside ``(Z^n, M)``.

    Returns ``(gram, basis)``; ``basis`` spans the saturated sublattice of
    vectors pairing to zero with every span vector.
    """
    span = [list(v) for v in span]
    n = M.n
    for v in span:
        if len(v) != n:
            raise ValueError(f"span vector has length {len(v)}, expected {n}")
    if span:
        pairing = matmul(span, M.entries)
        gram_s = matmul(pairing, transpose(span))
        if determinant(gram_s) == 0:
            raise DegenerateSpan("Gram matrix of the span is singular")
    else:
        pairing = []
    basis = kernel_basis(pairing, n)
    gram = IntSymMatrix([[M.pair(x, y) for y in basis] for x in basis])
    return gram, basis
