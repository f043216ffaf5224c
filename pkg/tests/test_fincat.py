"""Categories, multivariant functors, and their validators."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hace.errors import (
    CyclicGraph,
    IllTypedComposite,
    InterchangeFailure,
    MissingIdentity,
    NotAMonoid,
    NotAPoset,
    ShapeMismatch,
)
from hace.fincat import (
    FinCat,
    Functor,
    SetDiagram,
    SetFunctorPQ,
    as_sig,
    components_of,
    constant_diagram,
    external_product,
    free_category,
    functor_from_rule,
    functor_from_slots,
    hom_functor,
    corepresentable,
    enumerate_nat,
    monoid_category,
    mute_extend,
    opposite,
    point_functor,
    poset_category,
    power_pq,
    product_category,
    pullback_diagram,
    representable,
    restrict_diagonal,
    validate_category,
    validate_diagram,
    validate_functor,
    validate_functor_pq,
    walking_arrow,
)
from hace.setops import finset


def test_variance_sig_coercion():
    sig = as_sig((2, 1))
    assert (sig.p, sig.q, sig.arity) == (2, 1, 3)
    assert as_sig(sig) is sig


def test_poset_category_takes_transitive_closure(chain3):
    assert "le_c0_c2" in chain3.morphisms
    assert chain3.compose("le_c1_c2", "le_c0_c1") == "le_c0_c2"
    validate_category(chain3)


def test_poset_category_rejects_cycles():
    with pytest.raises(NotAPoset):
        poset_category("bad", ("a", "b"), [("a", "b"), ("b", "a")])


def test_monoid_category_checks_laws():
    with pytest.raises(NotAMonoid):
        monoid_category("bad", ("e", "s"), "e",
                        {("e", "e"): "e", ("e", "s"): "s",
                         ("s", "e"): "e", ("s", "s"): "s"})


def test_monoid_category_composition_order(z2):
    # compose(g, f) reads "g after f" and multiplies in that order
    assert z2.compose("s", "s") == "e"
    assert z2.compose("e", "s") == "s"
    validate_category(z2)


def test_free_category_paths_and_cycles():
    C = free_category("path2", ("a", "b", "c"),
                      [("f", "a", "b"), ("g", "b", "c")])
    assert "f>g" in C.morphisms  # the composite path
    assert C.compose("g", "f") == "f>g"
    validate_category(C)
    with pytest.raises(CyclicGraph):
        free_category("loop", ("a", "b"), [("f", "a", "b"), ("g", "b", "a")])


def test_opposite_involution(arrow):
    op = opposite(arrow)
    assert op.src["le_0_1"] == "1" and op.tgt["le_0_1"] == "0"
    validate_category(op)
    opop = opposite(op)
    assert opop.src == arrow.src and opop.tgt == arrow.tgt


def test_product_and_power_categories(arrow, z2):
    P = product_category(arrow, z2)
    assert len(P.objects) == 2 and len(P.morphisms) == 6
    validate_category(P)
    Q = power_pq(arrow, (1, 1))
    # contravariant first slot: src of (u, v) takes tgt(u)
    assert Q.src[("le_0_1", "le_0_1")] == ("1", "0")
    assert Q.tgt[("le_0_1", "le_0_1")] == ("0", "1")
    validate_category(Q)
    assert power_pq(arrow, (0, 0)).objects == ((),)


def test_components_of(cospan):
    assert components_of(cospan) == [("a", "b", "c")]
    two = poset_category("two", ("a", "b"), [])
    assert len(components_of(two)) == 2


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=6))
def test_random_relations_give_valid_posets_or_fail_loudly(rel):
    objs = [f"o{i}" for i in range(4)]
    named = [(objs[i], objs[j]) for i, j in rel]
    try:
        C = poset_category("rand", objs, named)
    except NotAPoset:
        return
    validate_category(C)


def test_validate_category_catches_bad_tables():
    with pytest.raises(MissingIdentity):
        FinCat("noident", ("a",), ("f",), {"f": "a"}, {"f": "a"}, {}, {})
    # g . f lands a -> a but the table names f: a -> b
    broken = FinCat("broken", ("a", "b"), ("id_a", "id_b", "f", "g"),
                    {"id_a": "a", "id_b": "b", "f": "a", "g": "b"},
                    {"id_a": "a", "id_b": "b", "f": "b", "g": "a"},
                    {"a": "id_a", "b": "id_b"},
                    {("g", "f"): "f", ("f", "g"): "id_b"})
    with pytest.raises(IllTypedComposite):
        validate_category(broken)


def test_hom_functor_action(arrow):
    H = hom_functor(arrow)
    assert (H.sig.p, H.sig.q) == (1, 1)
    assert set(H.fiber(("0", "1"))) == {"le_0_1"}
    assert len(H.fiber(("1", "0"))) == 0
    # act (u, v): w -> v . w . u; source fiber hom(tgt u, src v)
    fn = H.act(("le_0_0", "le_0_1"))
    assert fn("le_0_0") == "le_0_1"
    assert len(H.act(("le_0_1", "le_0_1")).src) == 0  # empty source fiber
    validate_functor_pq(H)


def test_representables_sigs(chain3):
    R = representable(chain3, "c1")  # hom(-, c1), one contravariant slot
    Q = corepresentable(chain3, "c1")  # hom(c1, -), one covariant slot
    assert (R.sig.p, R.sig.q) == (1, 0)
    assert (Q.sig.p, Q.sig.q) == (0, 1)
    assert set(R.fiber(("c0",))) == {"le_c0_c1"}
    assert set(Q.fiber(("c2",))) == {"le_c1_c2"}
    validate_functor_pq(R)
    validate_functor_pq(Q)


def test_functor_from_slots_validates_interchange(arrow):
    two = finset(["x", "y"])
    fibers = {T: two for T in power_pq(arrow, (0, 2)).objects}
    F = functor_from_slots(arrow, (0, 2), fibers,
                           lambda k, u, T: (lambda v: v), "const2")
    validate_functor_pq(F)
    assert F.act(("le_0_1", "le_0_1"))("x") == "x"

    def skewed(k, u, T):
        # slot 0 swaps along le_0_1 only while slot 1 sits at "1", so the
        # two orders of moving the slots disagree
        if k == 0 and u == "le_0_1" and T[1] == "1":
            return lambda v: {"x": "y", "y": "x"}[v]
        return lambda v: v

    with pytest.raises(InterchangeFailure):
        functor_from_slots(arrow, (0, 2), fibers, skewed, "skew")


def test_validate_functor_pq_catches_broken_composition(arrow):
    swap = {"le_0_0": {"a0": "a1", "a1": "a0"},  # not the identity action
            "le_1_1": {"b0": "b0"}, "le_0_1": {"a0": "b0", "a1": "b0"}}
    F = functor_from_rule(arrow, (0, 1),
                          lambda T: finset(["a0", "a1"] if T[0] == "0" else ["b0"]),
                          lambda us: (lambda x: swap[us[0]][x]), "broken")
    with pytest.raises(Exception):
        validate_functor_pq(F)


def test_restrict_diagonal(arrow):
    H = hom_functor(arrow)
    W = external_product(H, H)
    D = restrict_diagonal(W)
    assert (D.sig.p, D.sig.q) == (1, 1)


def test_mute_extend_appends_trailing_slots(arrow):
    H = hom_functor(arrow)
    M = mute_extend(H, 1, 1)
    assert (M.sig.p, M.sig.q) == (2, 2)
    # new slots are ignored: fiber depends only on the original ones
    assert M.fiber(("0", "0", "1", "0")).elements == H.fiber(("0", "1")).elements
    assert M.fiber(("0", "1", "1", "1")).elements == H.fiber(("0", "1")).elements
    validate_functor_pq(M)


def test_external_product_layout(arrow, z2):
    F = hom_functor(arrow)
    G = hom_functor(z2)
    H = external_product(F, G)
    assert (H.sig.p, H.sig.q) == (2, 2)
    # slot order: F-contra, G-contra, F-cov, G-cov, each an object pair
    T = (("0", "*"), ("1", "*"), ("1", "*"), ("0", "*"))
    fib = H.fiber(T)
    assert set(fib) == {(x, y) for x in F.fiber(("0", "1"))
                        for y in G.fiber(("*", "*"))}
    # acting with F-identities fixes the F-component
    us = ((arrow.ident["0"], "s"), (arrow.ident["1"], "s"),
          (arrow.ident["1"], "s"), (arrow.ident["0"], "s"))
    fn = H.act(us)
    for x, y in fn.src:
        assert fn((x, y))[0] == x


def test_set_diagram_and_validate(cospan):
    D = constant_diagram(cospan, finset(["s"]))
    validate_diagram(D)
    K = Functor(cospan, cospan, {A: A for A in cospan.objects},
                {u: u for u in cospan.morphisms}, "id")
    validate_functor(K)
    P = pullback_diagram(D, K)
    assert set(P.fiber("a")) == {"s"}


def test_validate_functor_rejects_nonfunctorial(chain3):
    K = Functor(chain3, chain3, {A: A for A in chain3.objects},
                dict({u: u for u in chain3.morphisms},
                     **{"le_c0_c2": "le_c0_c1"}), "bad")
    with pytest.raises(Exception):
        validate_functor(K)


def test_enumerate_nat_count(arrow):
    # Nat(D, D) for D: 0 -> {a0,a1}, 1 -> {b0} collapsing everything at 1:
    # a component at 0 may be any of 4 maps, at 1 only one; all are natural
    # because the square into the singleton commutes trivially.
    fib = {"0": finset(["a0", "a1"]), "1": finset(["b0"])}
    act = {"le_0_1": lambda x: "b0"}
    D = SetDiagram(arrow, fib.__getitem__,
                   lambda u: act.get(u, lambda x: x), "D")
    nats = enumerate_nat(D, D)
    assert len(nats) == 4


def test_point_functor_fibers(arrow):
    P = point_functor(arrow, (2, 1))
    assert all(P.fiber(T).elements == ("*",) for T in P.power_cat.objects)


def test_functor_from_rule_materializes_tables(arrow):
    H = hom_functor(arrow)
    assert H.fiber(("0", "1")) is H.fiber(("0", "1"))  # cached table entry
    assert len(H._action) == len(arrow.morphisms) ** 2
    with pytest.raises(ShapeMismatch):
        SetFunctorPQ(arrow, (1, 1), {}, {}, "empty")
