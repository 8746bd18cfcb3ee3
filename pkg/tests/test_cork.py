import random
from dataclasses import replace

import pytest

from kirbylab import handles as hd
from kirbylab.cork import CorkCertificate, check_certificate, cork_twist, make_cork, verify_contractible, w2
from kirbylab.errors import EmbeddingTokensInvalid
from kirbylab.lattice import FormClass
from kirbylab.report import FAIL, IMPORTED, WARN

from helpers import random_cork_presentation, standard


def _failing(rep):
    return {e.check for e in rep.failures}


def test_w2_is_contractible():
    rep = verify_contractible(w2())
    assert rep.verified
    assert any(e.outcome == "assumed" and "simply" in e.check for e in rep.entries)
    inv = hd.invariants(w2().presentation)
    assert inv.chi == 1 and inv.h1.trivial


def test_link_two_fails_with_z2():
    rep = verify_contractible(make_cork("W", 2))
    assert not rep.verified
    hom = next(e for e in rep.entries if e.check == "homology")
    assert hom.outcome == FAIL and "Z/2" in hom.detail


def test_extra_handle_fails_chi():
    C = w2()
    P = hd.add_handle(C.presentation, "x", framing=0)
    rep = verify_contractible(replace(C, presentation=P))
    assert "chi" in _failing(rep)


def test_perturbing_each_field_fails_its_check():
    C = w2()
    assert "involution" in _failing(verify_contractible(replace(C, twist_involution="other")))
    assert "link" in _failing(verify_contractible(replace(C, algebraic_link=3)))
    P = hd.set_counts(C.presentation, zero=2)
    assert {"handle-counts", "chi"} <= _failing(verify_contractible(replace(C, presentation=P)))


def test_twist_requires_valid_tokens():
    X = hd.add_handle(Presentation_with_pair(), "z", framing=1, through={1: 1})
    with pytest.raises(EmbeddingTokensInvalid):
        cork_twist(X, w2(), 2, "k")
    with pytest.raises(EmbeddingTokensInvalid):
        cork_twist(X, w2(), 1, "nope")
    with pytest.raises(EmbeddingTokensInvalid):
        cork_twist(X, w2(), 1, "z")  # framing 1
    Y = standard(1)
    Y = hd.introduce_pair(Y, "k", 0)
    with pytest.raises(EmbeddingTokensInvalid):
        cork_twist(Y, w2(), 1, "e1")  # carries a class


def Presentation_with_pair():
    X = hd.Presentation(zero_handles=1, four_handles=1, closed=True)
    X = hd.add_handle(X, "a", framing=-1)
    return hd.introduce_pair(X, "k", 0)


def test_twist_is_an_involution_and_keeps_invariants():
    rng = random.Random(17)
    for _ in range(300):
        X = random_cork_presentation(rng)
        C = make_cork("W2", 1)
        Y = cork_twist(X, C, 1, "k")
        assert cork_twist(Y, C, 1, "k") == X
        assert hd.invariants(Y) == hd.invariants(X)
        assert hd.computed_ledger(Y) == hd.computed_ledger(X)
        assert Y.chi == X.chi


def test_twist_swaps_dot_and_zero_linking():
    X = Presentation_with_pair()
    X = hd.add_handle(X, "z", framing=2, through={1: 3})
    X = hd.set_link(X, "z", "k", -1)
    Y = cork_twist(X, w2(), 1, "k")
    assert Y.handle("z").one_links == (-1,) and Y.linking("z", "k") == 3
    assert "cork twist" in Y.notes[-1]


def test_certificates():
    led = FormClass(9, -7, "odd")
    rep = check_certificate(CorkCertificate(led, FormClass(9, -7, "odd"), w2(), ("SW(R_8) is nontrivial",)))
    assert rep.verified and [e.detail for e in rep.of(IMPORTED)] == ["SW(R_8) is nontrivial"]
    rep = check_certificate(CorkCertificate(led, FormClass(9, -5, "odd"), w2(), ("x",)))
    assert "ledgers" in _failing(rep)
    rep = check_certificate(CorkCertificate(led, led, w2(), ()))
    assert rep.verified and rep.of(WARN)
    assert not check_certificate(CorkCertificate(None, led, w2(), ("x",))).verified
