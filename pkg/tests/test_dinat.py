"""Dinatural transformations, wedges, and cowedges."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hace.dinat import (
    Cowedge,
    DinatPQ,
    Wedge,
    check_cowedge,
    check_dinatural,
    check_wedge,
    enumerate_cowedges,
    enumerate_dinat,
    enumerate_wedges,
    identity_dinat,
    mixed_keys,
)
from hace.errors import ShapeMismatch
from hace.fincat import (
    functor_from_rule,
    hom_functor,
    point_functor,
    poset_category,
    representable,
    walking_arrow,
)
from hace.setops import POINT, FinFn, finset, fn_from_map, hom_set


def test_pair_guard_rejects_unflipped_sigs(arrow):
    P21 = point_functor(arrow, (2, 1))
    P21b = point_functor(arrow, (2, 1))
    with pytest.raises(ShapeMismatch):
        enumerate_dinat(P21, P21b)  # (2,1) pairs with (1,2)
    other = point_functor(walking_arrow(), (1, 2))
    with pytest.raises(ShapeMismatch):
        enumerate_dinat(P21, other)  # distinct base categories


def test_identity_dinat_is_dinatural(arrow, z2):
    for C in (arrow, z2):
        H = hom_functor(C)
        assert check_dinatural(identity_dinat(H)) == []
    with pytest.raises(ShapeMismatch):
        identity_dinat(representable(arrow, "1"))  # (1,0) has p != q


def test_point_to_hom_on_arrow(arrow):
    # Components pick one endomorphism per object; the hexagon forces the
    # identities, leaving exactly one transformation.
    P = point_functor(arrow, (1, 1))
    H = hom_functor(arrow)
    dinats = enumerate_dinat(P, H)
    assert len(dinats) == 1
    theta = dinats[0]
    assert theta.component("0")("*") == "le_0_0"
    assert theta.component("1")("*") == "le_1_1"

    # independent brute loop: every candidate family, filtered by the
    # hexagon checker
    brute = []
    for f0 in hom_set(POINT, H.fiber(("0", "0"))):
        for f1 in hom_set(POINT, H.fiber(("1", "1"))):
            cand = DinatPQ(P, H, {
                "0": FinFn(POINT, H.fiber(("0", "0")), f0),
                "1": FinFn(POINT, H.fiber(("1", "1")), f1),
            })
            if check_dinatural(cand) == []:
                brute.append(cand.label())
    assert sorted(brute) == sorted(t.label() for t in dinats)


def test_z2_hom_to_hom_has_more_dinats_than_end_elements(z2):
    # On a commutative monoid every self-map of the hom fiber is dinatural
    # (the hexagon becomes t(ws) = t(sw)), while only two families form
    # wedges from the point.  The counts 4 and 2 must not be conflated.
    H = hom_functor(z2)
    dinats = enumerate_dinat(H, H)
    assert len(dinats) == 4
    wedges = enumerate_wedges(POINT, H)
    assert len(wedges) == 2
    assert {w.leg("*").images[0] for w in wedges} == {"e", "s"}


def test_wedges_from_point_match_dinats_from_point(arrow, z2):
    for C in (arrow, z2):
        H = hom_functor(C)
        P = point_functor(C, (1, 1))
        wedges = enumerate_wedges(POINT, H)
        dinats = enumerate_dinat(P, H)
        assert sorted(w.label() for w in wedges) == \
            sorted(t.label() for t in dinats)
        for w in wedges:
            assert check_wedge(w) == []


def _two_level(arrow):
    act = {"le_0_0": lambda x: x, "le_1_1": lambda x: x,
           "le_0_1": lambda x: "b0"}
    return functor_from_rule(
        arrow, (0, 1),
        lambda T: finset(["a0", "a1"] if T[0] == "0" else ["b0", "b1"]),
        lambda us: act[us[0]], "two_level")


def test_check_wedge_reports_witnesses(arrow):
    D = _two_level(arrow)
    good = Wedge(POINT, D, {
        "0": fn_from_map(POINT, D.fiber(("0",)), {"*": "a0"}),
        "1": fn_from_map(POINT, D.fiber(("1",)), {"*": "b0"}),
    })
    assert check_wedge(good) == []
    bad = Wedge(POINT, D, {
        "0": fn_from_map(POINT, D.fiber(("0",)), {"*": "a0"}),
        "1": fn_from_map(POINT, D.fiber(("1",)), {"*": "b1"}),
    })
    assert check_wedge(bad) == [("le_0_1", "*")]


def test_check_cowedge_reports_witnesses(arrow):
    D = _two_level(arrow)
    pair = finset(["p", "q"])
    good = Cowedge(D, pair, {
        "0": fn_from_map(D.fiber(("0",)), pair, {"a0": "p", "a1": "p"}),
        "1": fn_from_map(D.fiber(("1",)), pair, {"b0": "p", "b1": "q"}),
    })
    assert check_cowedge(good) == []
    bad = Cowedge(D, pair, {
        "0": fn_from_map(D.fiber(("0",)), pair, {"a0": "p", "a1": "q"}),
        "1": fn_from_map(D.fiber(("1",)), pair, {"b0": "p", "b1": "p"}),
    })
    assert check_cowedge(bad) == [("le_0_1", "a1")]


def test_enumerate_cowedges_into_point(arrow):
    H = hom_functor(arrow)
    cowedges = enumerate_cowedges(H, POINT)
    assert len(cowedges) == 1
    assert check_cowedge(cowedges[0]) == []


def test_mixed_keys_on_monoid(z2):
    # both hexagon legs act on the single mixed fiber hom(*,*) = {e,s}
    H = hom_functor(z2)
    contra_leg, cov_leg = mixed_keys(H, "s")
    assert contra_leg("e") == "s" and contra_leg("s") == "e"
    assert cov_leg("e") == "s" and cov_leg("s") == "e"


def test_mixed_keys_on_arrow(arrow):
    # for a poset the mixed fiber hom(1, 0) is empty, so both legs are
    # the unique maps out of the empty set
    H = hom_functor(arrow)
    contra_leg, cov_leg = mixed_keys(H, "le_0_1")
    assert len(contra_leg.src) == 0 and len(cov_leg.src) == 0
    assert set(contra_leg.tgt) == {"le_0_0"}
    assert set(cov_leg.tgt) == {"le_1_1"}


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                max_size=6))
def test_point_to_hom_is_singleton_on_posets(pairs):
    # in a poset each diagonal hom fiber is the single identity, and the
    # hexagon holds for it, so exactly one transformation exists
    objs = sorted({f"v{i}" for i, _ in pairs} | {f"v{j}" for _, j in pairs}
                  | {"v0"})
    rels = [(f"v{i}", f"v{j}") for i, j in pairs if i <= j]
    C = poset_category("rand", objs, rels)
    dinats = enumerate_dinat(point_functor(C, (1, 1)), hom_functor(C))
    assert len(dinats) == 1
    theta = dinats[0]
    assert all(C.is_identity(theta.component(A)("*")) for A in C.objects)
