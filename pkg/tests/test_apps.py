"""Weighted integrals, two-variable extensions, convolution, interchange."""

from __future__ import annotations

import itertools

import pytest

from hace import apps, generate, setops
from hace.apps import (
    abelian_monoid_monoidal,
    collapse_functor,
    copower_grid_nat_count_check,
    cyclic_monoidal,
    day_singleton_is_identity,
    day_tensor,
    day_via_kan,
    diagonal_kan,
    diagonal_kan_identity_is_chained,
    diagonal_kan_left_hom_weighted_check,
    diagonal_kan_nat_count_check,
    diagonal_kan_point_is_coend,
    diagonal_kan_right,
    diagonal_kan_right_hom_weighted_check,
    diagonal_kan_right_nat_count_check,
    fubini_check,
    meet_monoidal,
    multi_weighted_end_matches_iterated,
    multi_weighted_end_point_reduction,
    pairwise_end,
    validate_strict_monoidal,
    weighted_coend_maps_out_check,
    weighted_coend_point_reduction,
    weighted_diagonal_kan,
    weighted_diagonal_kan_point_reduction,
    weighted_diagonal_kan_right_point_reduction,
    weighted_diagonal_kan_terminal_check,
    weighted_end,
    weighted_end_matches_dinat,
    weighted_end_point_reduction,
    weighted_kan_left_nat_count_check,
    weighted_kan_left_point_reduction,
    weighted_kan_right_nat_count_check,
    weighted_kan_right_point_reduction,
)
from hace.dinat import enumerate_dinat
from hace.errors import NotStrictMonoidal, ShapeMismatch
from hace.fincat import (
    Functor,
    SetDiagram,
    constant_diagram,
    const_functor_pq,
    corepresentable,
    functor_from_rule,
    hom_functor,
    point_functor,
    poset_category,
    power_pq,
    representable,
)
from hace.setops import finset
from hace.twisted import hom_pi


# ---------------------------------------------------------------------------
# shared fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def incl(chain3):
    """The walking arrow included as the two ends of the chain."""
    import hace.fincat as fincat
    arrow = fincat.walking_arrow()
    obj = {"0": "c0", "1": "c2"}
    mor = {u: chain3.hom(obj[arrow.src[u]], obj[arrow.tgt[u]])[0]
           for u in arrow.morphisms}
    return Functor(arrow, chain3, obj, mor, name="ends")


@pytest.fixture(scope="module")
def arrow_diagram(arrow):
    return SetDiagram(
        arrow,
        {"0": finset(["a0", "a1"]), "1": finset(["b0", "b1"])},
        {"le_0_0": lambda x: x, "le_1_1": lambda x: x,
         "le_0_1": lambda x: "b0"},
        "steps")


@pytest.fixture(scope="module")
def z2_diagram(z2):
    return SetDiagram(
        z2,
        {"*": finset(["m0", "m1"])},
        {"e": lambda x: x, "s": lambda x: {"m0": "m1", "m1": "m0"}[x]},
        "swap")


@pytest.fixture(scope="module")
def z2_ident(z2):
    return Functor(z2, z2, {"*": "*"}, {"e": "e", "s": "s"}, name="idZ")


@pytest.fixture(scope="module")
def power_to_chain(arrow, chain3):
    """A monotone collapse of the one-step power category onto the chain."""
    P = power_pq(arrow, (1, 1))
    obj = {T: "c0" if T == ("1", "0") else "c1" for T in P.objects}
    mor = {us: chain3.hom(obj[P.src[us]], obj[P.tgt[us]])[0]
           for us in P.morphisms}
    return Functor(P, chain3, obj, mor, name="steps_down")


@pytest.fixture(scope="module")
def power_to_z2(z2):
    """The multiplication functor from the one-step power category."""
    P = power_pq(z2, (1, 1))
    return Functor(P, z2, {T: "*" for T in P.objects},
                   {us: z2.compose(us[1], us[0]) for us in P.morphisms},
                   name="mult")


# ---------------------------------------------------------------------------
# weighted ends and coends
# ---------------------------------------------------------------------------

def test_weighted_end_carries_the_dinaturals(arrow, z2):
    assert weighted_end_matches_dinat(hom_functor(arrow), hom_functor(arrow))
    assert weighted_end_matches_dinat(hom_functor(z2), hom_functor(z2))
    assert weighted_end_matches_dinat(point_functor(arrow, (1, 1)),
                                      hom_functor(arrow))


def test_weighted_end_size_is_the_dinat_count(z2):
    H = hom_functor(z2)
    res = weighted_end(H, H)
    assert len(res.carrier) == len(enumerate_dinat(H, H)) == 4


def test_weighted_end_point_reduction(arrow, z2):
    assert weighted_end_point_reduction(hom_functor(arrow))
    assert weighted_end_point_reduction(hom_functor(z2))
    assert weighted_end_point_reduction(
        const_functor_pq(arrow, (1, 1), finset(["e0", "e1"])))


def test_weighted_coend_point_reduction(arrow, z2):
    assert weighted_coend_point_reduction(hom_functor(arrow))
    assert weighted_coend_point_reduction(hom_functor(z2))
    assert weighted_coend_point_reduction(
        const_functor_pq(arrow, (1, 1), finset(["e0", "e1"])))


def test_weighted_coend_maps_out(arrow, z2):
    assert weighted_coend_maps_out_check(hom_functor(arrow),
                                         hom_functor(arrow))
    assert weighted_coend_maps_out_check(hom_functor(z2), hom_functor(z2))
    assert weighted_coend_maps_out_check(point_functor(arrow, (1, 1)),
                                         hom_functor(arrow), n_points=3)


def test_multi_weighted_end(arrow, z2):
    assert multi_weighted_end_point_reduction(hom_functor(arrow), 1)
    assert multi_weighted_end_point_reduction(hom_functor(arrow), 2)
    H = hom_functor(arrow)
    assert multi_weighted_end_matches_iterated(H, H, H)
    Hz = hom_functor(z2)
    assert multi_weighted_end_matches_iterated(Hz, point_functor(z2, (1, 1)),
                                               Hz)


# ---------------------------------------------------------------------------
# weighted extensions along one-variable functors
# ---------------------------------------------------------------------------

def test_weighted_kan_point_reductions(incl, arrow_diagram, z2_ident,
                                       z2_diagram):
    assert weighted_kan_left_point_reduction(incl, arrow_diagram)
    assert weighted_kan_right_point_reduction(incl, arrow_diagram)
    assert weighted_kan_left_point_reduction(z2_ident, z2_diagram)
    assert weighted_kan_right_point_reduction(z2_ident, z2_diagram)


def test_weighted_kan_nat_counts(arrow, chain3, incl, arrow_diagram,
                                 z2, z2_ident, z2_diagram):
    W = hom_functor(arrow)
    G = constant_diagram(chain3, finset(["g0", "g1"]))
    assert weighted_kan_left_nat_count_check(W, incl, arrow_diagram, G)
    assert weighted_kan_right_nat_count_check(W, incl, arrow_diagram, G)
    Wz = hom_functor(z2)
    assert weighted_kan_left_nat_count_check(Wz, z2_ident, z2_diagram,
                                             z2_diagram)
    assert weighted_kan_right_nat_count_check(Wz, z2_ident, z2_diagram,
                                              z2_diagram)


# ---------------------------------------------------------------------------
# two-variable extensions
# ---------------------------------------------------------------------------

def test_diagonal_kan_point_is_coend(arrow, z2):
    assert diagonal_kan_point_is_coend(hom_functor(arrow))
    assert diagonal_kan_point_is_coend(hom_functor(z2))


def test_diagonal_kan_identity_is_chained(arrow, z2):
    assert diagonal_kan_identity_is_chained(hom_functor(arrow))
    assert diagonal_kan_identity_is_chained(hom_functor(z2))


def test_diagonal_kan_nat_counts(arrow, chain3, power_to_chain,
                                 z2, power_to_z2, z2_diagram):
    G = constant_diagram(chain3, finset(["g0", "g1"]))
    assert diagonal_kan_nat_count_check(power_to_chain, hom_functor(arrow), G)
    assert diagonal_kan_right_nat_count_check(power_to_chain,
                                              hom_functor(arrow), G)
    assert diagonal_kan_nat_count_check(power_to_z2, hom_functor(z2),
                                        z2_diagram)
    assert diagonal_kan_right_nat_count_check(power_to_z2, hom_functor(z2),
                                              z2_diagram)


def test_diagonal_kan_is_the_hom_weighted_form(power_to_chain, arrow,
                                               power_to_z2, z2):
    assert diagonal_kan_left_hom_weighted_check(power_to_chain,
                                                hom_functor(arrow))
    assert diagonal_kan_right_hom_weighted_check(power_to_chain,
                                                 hom_functor(arrow))
    assert diagonal_kan_left_hom_weighted_check(power_to_z2, hom_functor(z2))
    assert diagonal_kan_right_hom_weighted_check(power_to_z2, hom_functor(z2))


def test_diagonal_kan_toggled_variant(power_to_chain, arrow):
    lan = diagonal_kan(power_to_chain, hom_functor(arrow), variance="toggled")
    assert lan.diagram is None  # no endorsed laws ride along
    assert set(lan.fibers) == set(power_to_chain.tgt_cat.objects)
    with pytest.raises(ShapeMismatch):
        diagonal_kan(power_to_chain, hom_functor(arrow), variance="sideways")


def test_weighted_diagonal_kan(power_to_chain, arrow):
    H = hom_functor(arrow)
    assert weighted_diagonal_kan_point_reduction(power_to_chain, H)
    assert weighted_diagonal_kan_right_point_reduction(power_to_chain, H)
    assert weighted_diagonal_kan_terminal_check(H, H)
    with pytest.raises(ShapeMismatch):
        weighted_diagonal_kan(point_functor(arrow, (2, 2)), power_to_chain,
                              H, direction="diagonal")


# ---------------------------------------------------------------------------
# convolution over strict monoidal bases
# ---------------------------------------------------------------------------

def _discrete_presheaf(M, fibs, name):
    return functor_from_rule(M.cat, (1, 0), lambda T: finset(fibs[T[0]]),
                             lambda us: (lambda x: x), name)


@pytest.fixture(scope="module")
def chain2_meet():
    chain2 = poset_category("chain2", ("lo", "hi"), [("lo", "hi")])
    return meet_monoidal(chain2)


def _chain2_presheaf(M):
    fib = {"lo": ["r"], "hi": ["p", "q"]}
    down = {"p": "r", "q": "r"}

    def rule(us):
        u = us[0]
        if u == "le_lo_hi":
            return lambda x: down[x]
        return lambda x: x

    return functor_from_rule(M.cat, (1, 0),
                             lambda T: finset(fib[T[0]]), rule, "steps_down")


def test_monoidal_bases_validate(z2, chain2_meet):
    validate_strict_monoidal(cyclic_monoidal(2))
    validate_strict_monoidal(cyclic_monoidal(3))
    validate_strict_monoidal(chain2_meet)
    validate_strict_monoidal(abelian_monoid_monoidal(z2))


def test_monoidal_validation_catches_breakage(chain3):
    M = cyclic_monoidal(2)
    M.tensor_obj[(1, 1)] = 1  # 1 + 1 must wrap to 0
    with pytest.raises(NotStrictMonoidal):
        validate_strict_monoidal(M)
    with pytest.raises(NotStrictMonoidal):
        abelian_monoid_monoidal(chain3)  # more than one object


def test_day_singleton_is_identity(z2, chain2_meet):
    M2 = cyclic_monoidal(2)
    F = _discrete_presheaf(M2, {0: ["a", "b"], 1: ["c"]}, "F")
    assert day_singleton_is_identity(M2, F)
    assert day_singleton_is_identity(chain2_meet, _chain2_presheaf(chain2_meet))
    Mz = abelian_monoid_monoidal(z2)
    assert day_singleton_is_identity(Mz, representable(z2, "*"))


def _diagonal_day_oracle(M, Fs, c):
    """Independent count of the convolution fiber at c.

    Brute union-find over triples (A, xs, phi in hom(c, A tensored with
    itself)), merging drop-leg and lift-leg images of every mixed element.
    """
    C = M.cat
    n = len(Fs)
    items = []
    for A in C.objects:
        for xs in itertools.product(*[Fs[k].fiber((A,)) for k in range(n)]):
            for phi in C.hom(c, M.tensor_objs((A,) * n)):
                items.append((A, xs, phi))
    parent = {it: it for it in items}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u in C.morphisms:
        if C.is_identity(u):
            continue
        A, B = C.src[u], C.tgt[u]
        for xs in itertools.product(*[Fs[k].fiber((B,)) for k in range(n)]):
            for phi in C.hom(c, M.tensor_objs((A,) * n)):
                dropped = (A, tuple(Fs[k].act((u,))(xs[k]) for k in range(n)),
                           phi)
                lifted = (B, xs, C.compose(M.tensor_mors((u,) * n), phi))
                ra, rb = find(dropped), find(lifted)
                if ra != rb:
                    parent[ra] = rb
    return len({find(it) for it in items})


def test_day_on_the_discrete_base(z2):
    M2 = cyclic_monoidal(2)
    F = _discrete_presheaf(M2, {0: ["a", "b"], 1: ["c"]}, "F")
    G = _discrete_presheaf(M2, {0: ["u"], 1: ["v", "w"]}, "G")
    D = day_tensor(M2, [F, G])
    # only the diagonal objects contribute: 2*1 at stage 0 plus 1*2 at
    # stage 1 (whose self-tensor also lands on 0), and nothing reaches 1
    assert len(D.fiber((0,))) == 4
    assert len(D.fiber((1,))) == 0
    for c in M2.cat.objects:
        assert len(D.fiber((c,))) == _diagonal_day_oracle(M2, [F, G], c)


def test_day_on_the_regular_representation(z2):
    Mz = abelian_monoid_monoidal(z2)
    R = representable(z2, "*")
    D2 = day_tensor(Mz, [R, R])
    assert len(D2.fiber(("*",))) == 4
    assert len(D2.fiber(("*",))) == _diagonal_day_oracle(Mz, [R, R], "*")
    D3 = day_tensor(Mz, [R, R, R])
    assert len(D3.fiber(("*",))) == 8
    assert len(D3.fiber(("*",))) == _diagonal_day_oracle(Mz, [R, R, R], "*")


def test_day_on_the_meet_base(chain2_meet):
    M = chain2_meet
    F = _chain2_presheaf(M)
    D = day_tensor(M, [F, F])
    for c in M.cat.objects:
        assert len(D.fiber((c,))) == _diagonal_day_oracle(M, [F, F], c)


def test_day_via_kan_is_the_classical_form(z2):
    # on a discrete base the extension along the tensor is the plain
    # convolution sum; the diagonal form differs from it at object 1
    M2 = cyclic_monoidal(2)
    F = _discrete_presheaf(M2, {0: ["a", "b"], 1: ["c"]}, "F")
    G = _discrete_presheaf(M2, {0: ["u"], 1: ["v", "w"]}, "G")
    kan = day_via_kan(M2, F, G)
    for c in M2.cat.objects:
        classical = sum(
            len(F.fiber((a,))) * len(G.fiber((b,)))
            for a in M2.cat.objects for b in M2.cat.objects
            if M2.tobj(a, b) == c)
        assert len(kan[c].carrier) == classical
    D = day_tensor(M2, [F, G])
    assert len(D.fiber((1,))) != len(kan[1].carrier)


def test_day_rejects_wrong_factor_signature(z2):
    Mz = abelian_monoid_monoidal(z2)
    with pytest.raises(ShapeMismatch):
        day_tensor(Mz, [hom_functor(z2)])


# ---------------------------------------------------------------------------
# interchange of iterated ends
# ---------------------------------------------------------------------------

def test_fubini_on_hom_pairs(arrow, z2, chain3):
    rep = fubini_check(hom_functor(arrow), hom_functor(z2))
    assert rep.ok, rep.detail
    assert rep.n_joint == rep.n_outer_first == rep.n_outer_second
    rep2 = fubini_check(hom_functor(arrow), hom_functor(chain3))
    assert rep2.ok, rep2.detail


def test_fubini_with_mixed_signatures(arrow, chain3, z2):
    rep = fubini_check(representable(arrow, "1"), corepresentable(chain3, "c0"))
    assert rep.ok, rep.detail
    rep2 = fubini_check(hom_functor(z2), representable(arrow, "1"))
    assert rep2.ok, rep2.detail


def test_fubini_on_generated_instances():
    for seed in range(4):
        inst = generate.instance(seed, "fubini")
        rep = fubini_check(inst.functor, inst.partner)
        assert rep.ok, (seed, rep.detail)


def test_pairwise_end_departs_from_the_joint_end(arrow):
    # reading the four slots as a product-base (1,1) pair keeps the two
    # anchor pairs independent, losing the family that ties them together
    H = hom_pi(arrow, (2, 2))
    assert len(apps.end_pq(H).carrier) == 1
    assert len(pairwise_end(H).carrier) == 0
    with pytest.raises(ShapeMismatch):
        pairwise_end(hom_functor(arrow))


# ---------------------------------------------------------------------------
# copower counting
# ---------------------------------------------------------------------------

def test_copower_grid_nat_count(arrow, z2):
    S = finset(["s0", "s1"])
    assert copower_grid_nat_count_check(hom_functor(arrow), S)
    assert copower_grid_nat_count_check(hom_functor(z2), S)
