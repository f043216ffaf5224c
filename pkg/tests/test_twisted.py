"""Twisted-arrow categories, grid weights, and the anchored square category."""

from __future__ import annotations

import pytest

from hace.errors import AnchorNotUnique
from hace.fincat import (
    SetDiagram,
    hom_functor,
    is_isomorphism_functor,
    pullback_diagram,
    validate_category,
    validate_functor,
    validate_functor_pq,
)
from hace import setops
from hace.ends import end_pq
from hace.twisted import (
    category_of_elements,
    classical_tw,
    cospan_weight,
    grid_collapse,
    hom_pi,
    hom_pi_cowedge,
    sigma_pq,
    span_weight,
    square_functor,
    tw_iso_functors,
    tw_j,
    tw_j_embedding,
    tw_pq,
)


# ---------------------------------------------------------------------------
# grid functor
# ---------------------------------------------------------------------------

def test_hom_pi_fibers_are_row_major_grids(arrow):
    H = hom_pi(arrow, (2, 1))
    assert (H.sig.p, H.sig.q) == (2, 1)
    # one arrow from each contravariant anchor into the covariant one
    assert H.fiber(("0", "0", "1")).elements == (("le_0_1", "le_0_1"),)
    assert len(H.fiber(("1", "1", "0"))) == 0
    validate_functor_pq(H)


def test_hom_pi_action_composes_on_both_sides(z2):
    H = hom_pi(z2, (1, 1))
    fn = H.act(("s", "s"))
    # grid entry w becomes s.w.s
    assert fn(("e",)) == ("e",)
    assert fn(("s",)) == ("s",)


# ---------------------------------------------------------------------------
# twisted-arrow categories
# ---------------------------------------------------------------------------

def test_classical_tw_of_the_arrow(arrow):
    T = classical_tw(arrow)
    validate_category(T)
    assert len(T.objects) == 3
    assert len(T.morphisms) == 5  # counted by hand over (phi, psi) pairs


def test_tw_pq_matches_classical(arrow, z2, chain3):
    for C in (arrow, z2, chain3):
        fwd, bwd = tw_iso_functors(C)
        validate_functor(fwd)
        validate_functor(bwd)
        assert is_isomorphism_functor(fwd)
        T1, T2 = fwd.src_cat, fwd.tgt_cat
        assert all(bwd.on_obj(fwd.on_obj(f)) == f for f in T1.objects)
        assert all(fwd.on_obj(bwd.on_obj(o)) == o for o in T2.objects)
        assert all(bwd.on_mor(fwd.on_mor(m)) == m for m in T1.morphisms)
        assert all(fwd.on_mor(bwd.on_mor(m)) == m for m in T2.morphisms)


def test_end_as_limit_over_classical_tw(z2, arrow):
    # independent route: restrict the integrand along src/tgt of each
    # twisted object and take a plain limit, then read off the identity
    # anchors
    for C in (z2, arrow):
        H = hom_functor(C)
        T = classical_tw(C)
        fibers = {f: H.fiber((C.src[f], C.tgt[f])) for f in T.objects}
        action = {(phi, psi, f): H.act((phi, psi)) for (phi, psi, f) in T.morphisms}
        diag = SetDiagram(T, fibers, action, "HoTw")
        lim = setops.limit(diag)
        pos = {f: k for k, f in enumerate(T.objects)}
        got = {tuple(fam[pos[C.ident[A]]] for A in C.objects)
               for fam in lim.carrier}
        assert got == set(end_pq(H).carrier.elements)
        assert len(lim.carrier) == len(got)


def test_sigma_pq_is_a_functor(arrow, z2):
    for C in (arrow, z2):
        for sig in ((1, 1), (2, 1), (1, 2)):
            sigma = sigma_pq(C, sig)
            validate_functor(sigma)
            A_obj = sigma.src_cat.objects[0]
            assert len(sigma.on_obj(A_obj)) == sig[0] + sig[1]


# ---------------------------------------------------------------------------
# span and cospan weights
# ---------------------------------------------------------------------------

def test_span_weight_identifies_slid_midpoints(arrow):
    W = span_weight(arrow, (1, 1))
    # both generators over ("0","1") slide onto each other
    assert len(W.fiber(("0", "1"))) == 1
    assert len(W.fiber(("1", "0"))) == 0
    validate_functor_pq(W.functor)
    lab = W.id_class("0")
    assert lab in W.fiber(("0", "0"))
    assert W.rep(("0", "0"), lab)[0] in arrow.objects


def test_cospan_weight_is_a_presheaf(arrow):
    V = cospan_weight(arrow, (1, 1))
    assert V.diagram.cat.name.endswith("_op")
    assert len(V.fiber(("0", "0"))) == 1
    assert len(V.fiber(("0", "1"))) == 0  # no midpoint receives 1 and maps to 0
    assert len(V.fiber(("1", "0"))) == 1
    assert V.id_class("1") in V.fiber(("1", "1"))


def test_hom_pi_cowedge_reversed_grids(arrow):
    V0 = hom_pi_cowedge(arrow, (1, 1))
    assert V0.cat.name.endswith("_op")
    assert len(V0.fiber(("0", "1"))) == 0  # wants an arrow 1 -> 0
    assert V0.fiber(("1", "0")).elements == (("le_0_1",),)


def test_grid_collapse_at_single_slot_blocks(arrow, z2, chain3):
    for C, sig in ((arrow, (1, 1)), (arrow, (2, 1)), (chain3, (1, 2)),
                   (z2, (1, 1))):
        ok, detail = grid_collapse(C, sig)
        assert ok, (C.name, sig, detail)


def test_grid_collapse_can_fail_with_two_by_two_blocks(z2):
    # with two slots on each side the span classes outnumber the grids
    ok, _ = grid_collapse(z2, (2, 2))
    assert not ok


# ---------------------------------------------------------------------------
# categories of elements
# ---------------------------------------------------------------------------

def test_category_of_elements_covariant(arrow):
    H = hom_functor(arrow)
    E = category_of_elements(H.as_diagram())
    validate_category(E.total)
    validate_functor(E.projection)
    assert len(E.total.objects) == sum(
        len(H.fiber(T)) for T in H.power_cat.objects)


def test_category_of_elements_contravariant(arrow):
    V0 = hom_pi_cowedge(arrow, (1, 1))
    P = hom_pi(arrow, (1, 1)).power_cat
    E = category_of_elements(V0, contravariant=True, project_to=P)
    validate_category(E.total)
    validate_functor(E.projection)
    assert len(E.total.objects) == 3
    # the element arrow over (le_0_1, id_0) runs toward the smaller key
    m = (("le_0_1", "le_0_0"), ("le_0_0",))
    assert E.total.src[m] == (("1", "0"), ("le_0_1",))
    assert E.total.tgt[m] == (("0", "0"), ("le_0_0",))


def test_tw_pq_total_category(arrow):
    E = tw_pq(arrow, (1, 1))
    validate_category(E.total)
    assert len(E.total.objects) == 3
    assert len(E.total.morphisms) == 5


# ---------------------------------------------------------------------------
# anchored squares
# ---------------------------------------------------------------------------

def test_square_functor_fibers(diamond):
    S = square_functor(diamond, "bot", "top")
    validate_functor_pq(S)
    # a square over (X, Y) exists exactly when X <= Y, and then uniquely
    for X in diamond.objects:
        for Y in diamond.objects:
            expected = 1 if diamond.hom(X, Y) else 0
            assert len(S.fiber((X, Y))) == expected


def test_tw_j_matches_twisted_arrows_on_a_bounded_poset(diamond):
    E = tw_j(diamond, "bot", "top")
    validate_category(E.total)
    T = classical_tw(diamond)
    assert len(E.total.objects) == len(T.objects) == 9
    assert len(E.total.morphisms) == len(T.morphisms)
    emb = tw_j_embedding(diamond, "bot", "top")
    validate_functor(emb)
    assert len(set(emb.obj_map.values())) == len(T.objects)
    assert len(set(emb.mor_map.values())) == len(T.morphisms)


def test_tw_j_embedding_needs_singleton_anchors(z2, cospan):
    with pytest.raises(AnchorNotUnique):
        tw_j_embedding(z2, "*", "*")  # two endomorphisms share the anchor
    with pytest.raises(AnchorNotUnique):
        tw_j_embedding(cospan, "a", "c")  # b maps into c but a misses b


def test_pullback_of_integrand_over_tw(arrow):
    # the composite diagram over tw agrees fiberwise with the integrand
    H = hom_functor(arrow)
    E = tw_pq(arrow, (1, 1))
    diag = pullback_diagram(H.as_diagram(), E.projection)
    for (T, grid) in E.total.objects:
        assert diag.fiber((T, grid)).elements == H.fiber(T).elements
