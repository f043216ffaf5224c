"""Ends and coends: four methods, universal property, structural laws."""

from __future__ import annotations

import pytest

from hace import generate
from hace.ends import (
    COEND_METHODS,
    END_METHODS,
    EndResult,
    coend_all,
    coend_induced,
    coend_pq,
    coend_via_grid_elements_check,
    dinat_as_end,
    end_all,
    end_induced,
    end_pq,
    end_via_grid_elements_check,
    end_via_sigma_check,
    hom_commutation_check,
    hom_integrand,
    mute_invariance_check,
    verify_universal_property,
    weighted_forms_check,
)
from hace.errors import MethodUnavailable
from hace.fincat import (
    SetDiagram,
    const_functor_pq,
    enumerate_nat,
    functor_from_rule,
    hom_functor,
    point_functor,
)
from hace.setops import FinFn, finset
from hace import setops
from hace import twisted as tw


def _two_level(arrow):
    act = {"le_0_0": lambda x: x, "le_1_1": lambda x: x,
           "le_0_1": lambda x: "b0"}
    return functor_from_rule(
        arrow, (0, 1),
        lambda T: finset(["a0", "a1"] if T[0] == "0" else ["b0", "b1"]),
        lambda us: act[us[0]], "two_level")


# ---------------------------------------------------------------------------
# hand-computed carriers
# ---------------------------------------------------------------------------

def test_end_of_hom_on_the_arrow(arrow):
    # diagonal fibers are the singletons {id_0} and {id_1}; the one family
    # satisfies the wedge condition, and nothing relates the two summands
    # of the coend (the mixed fiber hom(1,0) is empty)
    results, agree = end_all(hom_functor(arrow))
    assert agree
    end = results[END_METHODS[0]]
    assert end.carrier.elements == (("le_0_0", "le_1_1"),)
    assert end.leg("0").images == ("le_0_0",)
    co_results, co_agree = coend_all(hom_functor(arrow))
    assert co_agree
    co = co_results[COEND_METHODS[0]]
    assert len(co.carrier) == 2
    assert {frozenset(m) for m in co.classes} == \
        {frozenset({("0", "le_0_0")}), frozenset({("1", "le_1_1")})}


def test_end_of_hom_on_z2(z2):
    # x must satisfy s.x = x.s, which every element of a commutative monoid
    # does, so the end keeps both elements; the coend relates w.s with s.w,
    # which never merges distinct elements here
    H = hom_functor(z2)
    results, agree = end_all(H)
    assert agree
    assert len(results[END_METHODS[0]].carrier) == 2
    co_results, co_agree = coend_all(H)
    assert co_agree
    assert len(co_results[COEND_METHODS[0]].carrier) == 2


def test_end_of_hom_on_chain3(chain3):
    results, agree = end_all(hom_functor(chain3))
    assert agree
    assert len(results[END_METHODS[0]].carrier) == 1
    co_results, co_agree = coend_all(hom_functor(chain3))
    assert co_agree
    assert len(co_results[COEND_METHODS[0]].carrier) == 3


def test_unknown_method_rejected(arrow):
    with pytest.raises(MethodUnavailable):
        end_pq(hom_functor(arrow), "guess")
    with pytest.raises(MethodUnavailable):
        coend_pq(hom_functor(arrow), "guess")


def test_methods_agree_on_generated_instances():
    for seed in range(12):
        inst = generate.instance(seed, "standard")
        _, agree = end_all(inst.functor)
        assert agree, f"end methods disagree on seed {seed}"
        _, co_agree = coend_all(inst.functor)
        assert co_agree, f"coend methods disagree on seed {seed}"


# ---------------------------------------------------------------------------
# universal property
# ---------------------------------------------------------------------------

def test_universal_property_of_hom_end(arrow):
    H = hom_functor(arrow)
    end = end_pq(H)
    co = coend_pq(H)
    rep = verify_universal_property(H, end, co)
    assert rep.ok and rep.failures == []
    # completeness forces exactly |end|^n wedges and n^|coend| cowedges
    assert rep.checked_end == sum(len(end.carrier) ** n for n in (0, 1, 2, 3))
    assert rep.checked_coend == sum(n ** len(co.carrier) for n in (0, 1, 2, 3))


def test_universal_property_checks_nothing_without_results(arrow):
    rep = verify_universal_property(hom_functor(arrow))
    assert rep.ok and rep.checked_end == 0 and rep.checked_coend == 0


def test_universal_property_rejects_padded_carrier(arrow):
    # an end with a spurious extra element fails the wedge count identity
    H = hom_functor(arrow)
    fake_carrier = finset([("le_0_0", "le_1_1"), ("X", "Y")])
    fake = EndResult(H, "equalizer", fake_carrier, {
        "0": FinFn(fake_carrier, H.fiber(("0", "0")), ("le_0_0", "le_0_0")),
        "1": FinFn(fake_carrier, H.fiber(("1", "1")), ("le_1_1", "le_1_1")),
    })
    rep = verify_universal_property(H, end_result=fake)
    assert not rep.ok
    assert any("wedge count" in f for f in rep.failures)


# ---------------------------------------------------------------------------
# the dinaturality set as an end
# ---------------------------------------------------------------------------

def test_dinat_as_end_point_into_hom(arrow):
    bridge = dinat_as_end(point_functor(arrow, (1, 1)), hom_functor(arrow))
    assert bridge.ok, bridge.detail
    assert len(bridge.end.carrier) == 1 == len(bridge.dinats)


def test_dinat_as_end_hom_to_hom_on_z2(z2):
    bridge = dinat_as_end(hom_functor(z2), hom_functor(z2))
    assert bridge.ok, bridge.detail
    assert len(bridge.end.carrier) == 4 == len(bridge.dinats)


def test_dinat_as_end_flips_signature(arrow):
    F = point_functor(arrow, (2, 1))
    G = point_functor(arrow, (1, 2))
    H = hom_integrand(F, G)
    assert (H.sig.p, H.sig.q) == (1, 2)
    bridge = dinat_as_end(F, G)
    assert bridge.ok and len(bridge.dinats) == 1


# ---------------------------------------------------------------------------
# functoriality in the integrand
# ---------------------------------------------------------------------------

def test_end_and_coend_induced_maps(arrow):
    D1 = _two_level(arrow)
    D2 = const_functor_pq(arrow, (0, 1), finset(["z0", "z1"]), "const2")
    nats = enumerate_nat(D1.as_diagram(), D2.as_diagram())
    assert nats, "no transformation to transport along"
    alpha = nats[0]
    e1, e2 = end_pq(D1), end_pq(D2)
    f = end_induced(alpha, e1, e2)
    for fam in e1.carrier:
        moved = f(fam)
        for k, A in enumerate(arrow.objects):
            assert moved[k] == alpha.component((A,))(fam[k])
    c1, c2 = coend_pq(D1), coend_pq(D2)
    g = coend_induced(alpha, c1, c2)
    for A in arrow.objects:
        for x in D1.fiber((A,)):
            assert g(c1.leg(A)(x)) == c2.leg(A)(alpha.component((A,))(x))


# ---------------------------------------------------------------------------
# degenerate arities
# ---------------------------------------------------------------------------

def test_nullary_end_is_the_fiber_on_a_connected_base(arrow):
    S = const_functor_pq(arrow, (0, 0), finset(["s0", "s1"]), "S")
    end = end_pq(S)
    co = coend_pq(S)
    # constant families over a connected base: one per element
    assert end.carrier.elements == (("s0", "s0"), ("s1", "s1"))
    assert len(co.carrier) == 2


def test_covariant_unary_end_is_the_limit(arrow, cospan):
    for C, D in ((arrow, _two_level(arrow)),
                 (cospan, hom_limitlike(cospan))):
        end = end_pq(D)
        lim = setops.limit(D.as_diagram())
        # power objects of arity one list base objects in the same order
        assert set(end.carrier) == {tuple(fam) for fam in lim.carrier}
        co = coend_pq(D)
        col = setops.colimit(D.as_diagram())
        assert len(co.carrier) == len(col.carrier)
        assert {frozenset((A, x) for (A,), x in m) for m in col.classes} == \
            {frozenset(m) for m in co.classes}


def hom_limitlike(cospan):
    """A covariant diagram on the cospan with a two-element limit."""
    fib = {"a": ["a0", "a1"], "b": ["b0", "b1"], "c": ["c0", "c1"]}
    act = {"le_a_c": {"a0": "c0", "a1": "c1"},
           "le_b_c": {"b0": "c0", "b1": "c0"}}

    def rule(us):
        u = us[0]
        if u in act:
            return lambda x: act[u][x]
        return lambda x: x

    return functor_from_rule(cospan, (0, 1),
                             lambda T: finset(fib[T[0]]), rule, "cosp")


def test_contravariant_unary_end_is_the_limit_over_the_opposite(chain3):
    from hace.fincat import representable
    R = representable(chain3, "c1")
    end = end_pq(R)
    lim = setops.limit(R.as_diagram())  # diagram lives on the opposite
    assert set(end.carrier) == {tuple(fam) for fam in lim.carrier}
    co = coend_pq(R)
    col = setops.colimit(R.as_diagram())
    assert len(co.carrier) == len(col.carrier)


def test_purely_covariant_end_is_the_diagonal_limit(arrow):
    E = _two_level(arrow)

    def fiber(T):
        return setops.product([E.fiber((T[0],)), E.fiber((T[1],))])

    def act(us):
        f0, f1 = E.act((us[0],)), E.act((us[1],))
        return lambda xy: (f0(xy[0]), f1(xy[1]))

    F = functor_from_rule(arrow, (0, 2), fiber, act, "EE")
    assert (F.sig.p, F.sig.q) == (0, 2)
    diag = SetDiagram(arrow,
                      {A: F.fiber((A, A)) for A in arrow.objects},
                      {u: F.act((u, u)) for u in arrow.morphisms},
                      "diagF")
    end = end_pq(F)
    lim = setops.limit(diag)
    assert set(end.carrier) == {tuple(fam) for fam in lim.carrier}
    co = coend_pq(F)
    col = setops.colimit(diag)
    assert len(co.carrier) == len(col.carrier)
    assert {frozenset(m) for m in co.classes} == \
        {frozenset(m) for m in col.classes}


# ---------------------------------------------------------------------------
# structural laws
# ---------------------------------------------------------------------------

def test_mute_invariance(arrow, z2):
    assert mute_invariance_check(hom_functor(arrow))
    assert mute_invariance_check(hom_functor(z2))
    assert mute_invariance_check(_two_level(arrow))


def test_hom_commutation(arrow, z2):
    S = finset(["t0", "t1"])
    assert hom_commutation_check(hom_functor(arrow), S)
    assert hom_commutation_check(hom_functor(z2), S)


def test_end_via_sigma(arrow, z2):
    assert end_via_sigma_check(hom_functor(arrow))
    assert end_via_sigma_check(hom_functor(z2))


def test_grid_element_forms(arrow, z2):
    for D in (hom_functor(arrow), hom_functor(z2),
              tw.hom_pi(arrow, (2, 1))):
        assert end_via_grid_elements_check(D)
        assert coend_via_grid_elements_check(D)


def test_weighted_forms(arrow, z2):
    assert weighted_forms_check(hom_functor(arrow))
    assert weighted_forms_check(hom_functor(z2))
    assert weighted_forms_check(tw.hom_pi(arrow, (1, 2)))
