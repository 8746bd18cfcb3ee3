import random

import pytest

from kirbylab import handles as hd
from kirbylab import lattice
from kirbylab.errors import BadP, EmbeddingInvalid, NotClosed
from kirbylab.handles import Presentation
from kirbylab.lattice import ODD
from kirbylab.rbd import (
    CpEmbedding,
    boundary_residues,
    bp_descriptor,
    complement_form,
    cp_matrix,
    enumerate_embeddings,
    rational_blowdown,
    verify_embedding,
)

from helpers import H, U6, ambient, brute_embeddings, build_cp2_14, cofactor_det, cor27_classes, dot, standard

CHAIN = ["e9", "e10", "e11", "e12", "e13", "w"]


def _cor27_presentation() -> Presentation:
    X = Presentation(zero_handles=1, four_handles=1, closed=True, ambient=ambient(14))
    for i, c in enumerate(cor27_classes(), 1):
        X = hd.add_handle(X, f"u{i}", c)
    return X


def test_cp_matrix_shape():
    M = cp_matrix(7)
    assert M.diagonal() == (-2, -2, -2, -2, -2, -9)
    assert all(M[i, i + 1] == 1 for i in range(5))
    assert all(M[i, j] == 0 for i in range(6) for j in range(6) if abs(i - j) > 1)
    assert cp_matrix(2).entries == ((-4,),)
    assert abs(cofactor_det(M.entries)) == 49
    with pytest.raises(BadP):
        cp_matrix(1)


@pytest.mark.parametrize("p", range(2, 13))
def test_cp_negative_definite_and_descriptor(p):
    assert lattice.signature(cp_matrix(p)) == (-(p - 1), 0)
    d = bp_descriptor(p)
    assert d.h1_order == p and d.rational_ball and d.consistent()


def test_verify_cor27_data_by_dot_oracle():
    X = _cor27_presentation()
    rep = verify_embedding(X, CpEmbedding.from_handles(X, 7, [f"u{i}" for i in range(1, 7)]))
    assert rep.verified
    u = cor27_classes()
    amb = X.ambient
    assert dot(amb, u[5], u[5]) == -9 and dot(amb, u[4], u[5]) == 1 and dot(amb, u[0], u[5]) == 0
    Q = cp_matrix(7)
    assert all(dot(amb, u[i], u[j]) == Q[i, j] for i in range(6) for j in range(6))


def test_verify_flags_changed_coefficient():
    X = _cor27_presentation()
    bad = list(cor27_classes())
    bad[5] = H(U6.replace("-3e1", "-2e1"))
    X2 = hd.add_handle(X, "v", bad[5])
    E = CpEmbedding(7, tuple(bad), ("u1", "u2", "u3", "u4", "u5", "v"))
    rep = verify_embedding(X2, E)
    assert not rep.verified
    assert any(e.check == "u6.u6" and "-9" in e.detail for e in rep.failures)
    # claiming a class that differs from the handle is flagged too
    E2 = CpEmbedding(7, tuple(bad), tuple(f"u{i}" for i in range(1, 7)))
    assert any(e.check == "u6 class" for e in verify_embedding(X, E2).failures)


def test_verify_other_failures():
    X = _cor27_presentation()
    assert not verify_embedding(X, CpEmbedding(7, (), ())).verified
    assert not verify_embedding(X, CpEmbedding(1, (), ())).verified
    E = CpEmbedding.from_handles(X, 7, ["u1"] * 6)
    assert not verify_embedding(X, E).verified


def test_p2_genuine_minus_four_vector():
    # brute force a class of square -4 in Z^{1,4}
    amb = ambient(4)
    from itertools import product

    found = None
    for coeffs in product(range(-2, 3), repeat=5):
        c = hd.HomologyClass(zip(amb.names, coeffs))
        if c and dot(amb, c, c) == -4:
            found = c
            break
    X = hd.add_handle(Presentation(zero_handles=1, four_handles=1, closed=True, ambient=amb), "u", found)
    assert verify_embedding(X, CpEmbedding.from_handles(X, 2, ["u"])).verified
    Y = hd.add_handle(Presentation(zero_handles=1, four_handles=1, closed=True, ambient=ambient(3)), "u", H("2h+e1+e2+e3"))
    assert not verify_embedding(Y, CpEmbedding.from_handles(Y, 2, ["u"])).verified


def test_rational_blowdown_r8():
    X = build_cp2_14()
    E = CpEmbedding.from_handles(X, 7, CHAIN)
    assert complement_form(X, E).triple() == (9, -7, ODD)
    R = rational_blowdown(X, E)
    inv = hd.invariants(R)
    assert (inv.chi, inv.b2, str(inv.h1)) == (11, 9, "0")
    assert hd.form_ledger(R).triple() == (9, -7, ODD)
    assert R.chi == X.chi - 6
    assert R.handle("b").framing == 6 and R.handle("b").one_links == (7,)
    assert any("rational blowdown" in n for n in R.notes)
    with pytest.raises(EmbeddingInvalid):
        rational_blowdown(R, E)
    with pytest.raises(NotClosed):
        rational_blowdown(hd.set_counts(X, closed=False), E)


def test_rational_blowdown_p2_toy():
    X = standard(4)
    for lbl in ("e2", "e3", "e4"):
        X = hd.slide(X, "e1", lbl, 1)
    assert X.handle("e1").framing == -4
    before = hd.computed_ledger(X)
    R = rational_blowdown(X, CpEmbedding.from_handles(X, 2, ["e1"]))
    after = hd.form_ledger(R)
    assert after.rank == before.rank - 1 and after.signature == before.signature + 1
    # e2, e3, e4 pair oddly with u, so they run once (mod 2) over the new dotted circle
    assert hd.h1(R).trivial
    assert R.chi == X.chi - 1


def test_boundary_residues_orbit():
    # residues of the pairing vectors of the chain's own handles vanish
    Q = cp_matrix(7)
    rows = [list(r) for r in Q.entries]
    assert boundary_residues(7, rows) == [0] * 6
    res = boundary_residues(7, [[0, 0, 0, 0, 0, 1]])
    assert res[0] % 7 != 0


def test_enumerate_matches_brute_force():
    X = build_cp2_14()
    found = enumerate_embeddings(X, 7, 1)
    pairs = [(E.handle_labels, E.multipliers) for E in found]
    assert (tuple(CHAIN), (1,) * 6) in pairs
    assert len(found) == 2
    assert all(verify_embedding(X, E).verified for E in found)
    assert enumerate_embeddings(hd.standard_cp2(), 2, 3) == []
    assert enumerate_embeddings(standard(8), 7, 1) == []
    with pytest.raises(ValueError):
        enumerate_embeddings(X, 7, 0)


def test_enumerate_toy_against_exhaustive_tuples():
    rng = random.Random(13)
    base = Presentation(zero_handles=1, four_handles=1, closed=True, ambient=ambient(3))
    pool = ["e1-e2", "e2+2e3", "e2-e3", "h-e1-e2", "e1+e2", "2e3+e2", "e3", "h"]
    for _ in range(40):
        X = base
        for i, c in enumerate(rng.sample(pool, rng.randint(2, 6))):
            X = hd.add_handle(X, f"c{i}", H(c))
        for p in (2, 3):
            for bound in (1, 2):
                got = [(E.handle_labels, E.multipliers) for E in enumerate_embeddings(X, p, bound)]
                assert got == brute_embeddings(X, cp_matrix(p), bound)
