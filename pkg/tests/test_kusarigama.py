"""Chained and hooked functors, their adjunctions, and lattice closed forms."""

from __future__ import annotations

import pytest

from hace import generate, setops
from hace.errors import NotALattice, ShapeMismatch
from hace.fincat import (
    Functor,
    const_functor_pq,
    functor_from_rule,
    hom_functor,
    point_category,
    point_functor,
    poset_category,
    validate_functor_pq,
)
from hace.kusarigama import (
    adjunction_check,
    cokus_fiber_via_squares,
    cokusarigama,
    colim_flattening_check,
    diagonal_expansion_check,
    hooked_point_trivial,
    kus_fiber_via_squares,
    kusarigama,
    lattice_const_cokus_check,
    lattice_join,
    lattice_meet,
    lattice_reflection_check,
    left_kan,
    lim_flattening_check,
    point_cokus_matches_spans,
    right_kan,
)
from hace.setops import finset
from hace.twisted import hom_pi


def _two_level(arrow):
    act = {"le_0_0": lambda x: x, "le_1_1": lambda x: x,
           "le_0_1": lambda x: "b0"}
    return functor_from_rule(
        arrow, (0, 1),
        lambda T: finset(["a0", "a1"] if T[0] == "0" else ["b0", "b1"]),
        lambda us: act[us[0]], "two_level")


# ---------------------------------------------------------------------------
# the chained functor on degenerate inputs
# ---------------------------------------------------------------------------

def test_point_cokus_carries_span_classes(arrow, chain3):
    assert point_cokus_matches_spans(arrow, (1, 1))
    assert point_cokus_matches_spans(chain3, (1, 1))
    assert point_cokus_matches_spans(arrow, (2, 1))
    assert point_cokus_matches_spans(chain3, (1, 2))


def test_point_cokus_is_the_grid_at_single_slot_blocks(arrow, chain3, z2):
    # spans compose bijectively onto grids when a variance block has one
    # slot, so J of the point then has exactly the grid fibers
    for C, sig in ((arrow, (1, 1)), (chain3, (2, 1)), (z2, (1, 1))):
        J = cokusarigama(point_functor(C, sig))
        grid = hom_pi(C, (sig[1], sig[0]))
        for T in J.functor.power_cat.objects:
            assert len(J.functor.fiber(T)) == len(grid.fiber(T))


def test_point_cokus_departs_from_the_grid_without_midpoints():
    # on the bipartite order a,b <= c,d no object sits between the pairs,
    # so the span fiber is empty while the grid fiber is not
    N = poset_category("bipart", ("a", "b", "c", "d"),
                       [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
    J = cokusarigama(point_functor(N, (2, 2)))
    grid = hom_pi(N, (2, 2))
    key = ("a", "b", "c", "d")
    assert len(J.functor.fiber(key)) == 0
    assert len(grid.fiber(key)) == 1


def test_hooked_point_is_the_point(arrow, z2, chain3):
    assert hooked_point_trivial(arrow, (1, 1))
    assert hooked_point_trivial(arrow, (2, 1))
    assert hooked_point_trivial(z2, (1, 1))
    assert hooked_point_trivial(chain3, (1, 2))


def test_cokus_structure_and_unit(arrow):
    H = hom_functor(arrow)
    J = cokusarigama(H)
    assert (J.functor.sig.p, J.functor.sig.q) == (1, 1)
    validate_functor_pq(J.functor)
    for A in arrow.objects:
        eta = J.eta(A)
        assert eta.src.elements == H.diagonal_fiber(A).elements
        for x in eta.src:
            assert eta(x) in J.functor.fiber((A, A))


def test_kus_structure_and_counit(arrow):
    H = hom_functor(arrow)
    K = kusarigama(H)
    assert (K.functor.sig.p, K.functor.sig.q) == (1, 1)
    validate_functor_pq(K.functor)
    for X in arrow.objects:
        eps = K.epsilon(X)
        for t in eps.src:
            assert eps(t) in H.diagonal_fiber(X)


# ---------------------------------------------------------------------------
# the adjunction triangle
# ---------------------------------------------------------------------------

def test_adjunction_point_into_hom(arrow):
    rep = adjunction_check(point_functor(arrow, (1, 1)), hom_functor(arrow))
    assert rep.ok, rep.detail
    assert rep.n_dinat == rep.n_chained == rep.n_hooked == 1


def test_adjunction_hom_to_hom_on_z2(z2):
    rep = adjunction_check(hom_functor(z2), hom_functor(z2))
    assert rep.ok, rep.detail
    assert rep.n_dinat == rep.n_chained == rep.n_hooked == 4


def test_adjunction_at_higher_arity(arrow):
    rep = adjunction_check(hom_pi(arrow, (2, 1)), hom_pi(arrow, (1, 2)))
    assert rep.ok, rep.detail
    assert rep.n_dinat == rep.n_chained == rep.n_hooked


def test_adjunction_on_generated_instances():
    for seed in range(6):
        inst = generate.instance(seed, "kusarigama")
        rep = adjunction_check(inst.functor, inst.partner, count_naturals=False)
        assert rep.ok, (seed, rep.detail)


# ---------------------------------------------------------------------------
# flattening to coend and end
# ---------------------------------------------------------------------------

def test_flattening(arrow, z2):
    for C in (arrow, z2):
        H = hom_functor(C)
        assert colim_flattening_check(H)
        assert lim_flattening_check(H)
    D = _two_level(arrow)
    assert colim_flattening_check(D)
    assert lim_flattening_check(D)


def test_diagonal_expansion(arrow, z2):
    assert diagonal_expansion_check(hom_functor(arrow))
    assert diagonal_expansion_check(hom_functor(z2))
    with pytest.raises(ShapeMismatch):
        diagonal_expansion_check(_two_level(arrow))  # needs both variances


# ---------------------------------------------------------------------------
# pointwise extensions
# ---------------------------------------------------------------------------

def test_left_kan_to_the_point_is_the_colimit(arrow):
    D = _two_level(arrow).as_diagram()
    pt = point_category()
    K = Functor(D.cat, pt, {o: "*" for o in D.cat.objects},
                {m: "id_*" for m in D.cat.morphisms}, name="collapse")
    lan = left_kan(D, K)["*"]
    col = setops.colimit(D)
    got = {frozenset((a, x) for (a, _phi), x in members)
           for members in lan.classes}
    want = {frozenset(m) for m in col.classes}
    assert got == want


def test_right_kan_to_the_point_is_the_limit(arrow):
    D = _two_level(arrow).as_diagram()
    pt = point_category()
    K = Functor(D.cat, pt, {o: "*" for o in D.cat.objects},
                {m: "id_*" for m in D.cat.morphisms}, name="collapse")
    ran = right_kan(D, K)["*"]
    lim = setops.limit(D)
    assert set(ran.elements) == set(lim.carrier.elements)


def test_kan_along_the_identity_keeps_fiber_sizes(arrow):
    D = _two_level(arrow).as_diagram()
    K = Functor(D.cat, D.cat, {o: o for o in D.cat.objects},
                {m: m for m in D.cat.morphisms}, name="id")
    lan = left_kan(D, K)
    ran = right_kan(D, K)
    for o in D.cat.objects:
        assert len(lan[o].carrier) == len(D.fiber(o))
        assert len(ran[o]) == len(D.fiber(o))


# ---------------------------------------------------------------------------
# lattice closed forms
# ---------------------------------------------------------------------------

def test_lattice_bounds(diamond, cospan):
    assert lattice_join(diamond, ("x", "y")) == "top"
    assert lattice_meet(diamond, ("x", "y")) == "bot"
    assert lattice_join(diamond, ()) == "bot"
    assert lattice_meet(diamond, ()) == "top"
    with pytest.raises(NotALattice):
        lattice_meet(cospan, ("a", "b"))  # no common lower bound


def test_lattice_const_cokus(diamond, chain3):
    E0 = finset(["e0", "e1"])
    assert lattice_const_cokus_check(diamond, E0, (1, 1))
    assert lattice_const_cokus_check(chain3, E0, (2, 1))


def test_lattice_reflection(diamond, chain3):
    E0 = finset(["e0", "e1"])
    assert lattice_reflection_check(const_functor_pq(diamond, (1, 1), E0))
    assert lattice_reflection_check(hom_functor(chain3))


# ---------------------------------------------------------------------------
# single fibers over anchored squares
# ---------------------------------------------------------------------------

def test_fibers_via_squares(arrow, diamond):
    H = hom_functor(arrow)
    assert kus_fiber_via_squares(H, "0", "1")
    assert cokus_fiber_via_squares(H, "0", "1")
    E0 = const_functor_pq(diamond, (1, 1), finset(["e0", "e1"]))
    assert kus_fiber_via_squares(E0, "bot", "top")
    assert cokus_fiber_via_squares(E0, "bot", "top")
    with pytest.raises(ShapeMismatch):
        kus_fiber_via_squares(point_functor(arrow, (2, 1)), "0", "1")
