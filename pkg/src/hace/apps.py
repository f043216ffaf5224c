"""Applications of the mixed-variance engine.

Everything here is a derived construction: weighted ends and coends as
(2,2)-ends and coends, weighted and two-variable Kan extensions as
per-object ends/coends, Day convolution over a strict monoidal base, and
the product-interchange (Fubini) comparison with its flattening bijections.
Each construction ships with the definitional check or reduction law that
pins it to an independently computed special case: weighted forms against
dinatural enumeration, point weights against the plain construction, and
two-variable extensions against naturality counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import setops
from .dinat import DinatPQ, check_dinatural, enumerate_dinat
from .ends import CoendResult, EndResult, coend_pq, end_pq
from .errors import HaceError, NotStrictMonoidal, ShapeMismatch
from .fincat import (
    FinCat,
    Functor,
    SetDiagram,
    SetFunctorPQ,
    enumerate_nat,
    external_product,
    functor_from_rule,
    hom_functor,
    mute_extend,
    opposite,
    point_category,
    point_functor,
    power_pq,
    product_category,
    validate_functor_pq,
)
from .kusarigama import cokusarigama, lattice_meet, left_kan, right_kan
from .setops import FinFn, FinSet, finset, hom_set


# ---------------------------------------------------------------------------
# weighted ends and coends
# ---------------------------------------------------------------------------

def hom_pairing_functor(W: SetFunctorPQ, D: SetFunctorPQ,
                        cap: int | None = None) -> SetFunctorPQ:
    """T(A1,A2; B1,B2) = Fn(W(B1;A1), D(A2;B2)), signature (2,2)."""
    if W.sig.arity != 2 or D.sig.arity != 2:
        raise ShapeMismatch("weighted pairing needs (1,1) inputs")
    C = W.base

    def fiber(T):
        A1, A2, B1, B2 = T
        return hom_set(W.fiber((B1, A1)), D.fiber((A2, B2)), cap)

    def act(us):
        u1, u2, v1, v2 = us
        pre = W.act((v1, u1))
        post = D.act((u2, v2))
        src_fib = W.fiber((C.src[v1], C.tgt[u1]))

        def apply(lab):
            return tuple(post(lab[src_fib.position(pre(w))]) for w in pre.src)

        return apply

    return functor_from_rule(C, (2, 2), fiber, act,
                             f"fn({W.name},{D.name})", cap)


def dinat_integrand(F: SetFunctorPQ, G: SetFunctorPQ,
                    cap: int | None = None) -> SetFunctorPQ:
    """T(A;B) = Fn(F(B;A), G(A;B)), the (1,1) functor whose end is DiNat(F,G)."""
    if F.sig.arity != 2 or G.sig.arity != 2:
        raise ShapeMismatch("dinat integrand needs (1,1) inputs")
    C = F.base

    def fiber(T):
        A, B = T
        return hom_set(F.fiber((B, A)), G.fiber((A, B)), cap)

    def act(us):
        u, v = us
        pre = F.act((v, u))
        post = G.act((u, v))
        src_fib = F.fiber((C.src[v], C.tgt[u]))

        def apply(lab):
            return tuple(post(lab[src_fib.position(pre(w))]) for w in pre.src)

        return apply

    return functor_from_rule(C, (1, 1), fiber, act,
                             f"fn1({F.name},{G.name})", cap)


def weighted_end(W: SetFunctorPQ, D: SetFunctorPQ,
                 cap: int | None = None) -> EndResult:
    """The end of D weighted by W, as a (2,2)-end of the hom pairing."""
    return end_pq(hom_pairing_functor(W, D, cap), cap=cap)


def weighted_end_matches_dinat(W: SetFunctorPQ, D: SetFunctorPQ,
                               cap: int | None = None) -> bool:
    """Weighted-end families are exactly the dinaturals W => D.

    This is the defining property of the weighted end at the point: the
    carrier must enumerate, component for component, the dinatural
    transformations from the weight to the integrand.
    """
    res = weighted_end(W, D, cap)
    C = W.base
    built = []
    for fam in res.carrier:
        comps = {A: FinFn(W.diagonal_fiber(A), D.diagonal_fiber(A), fam[k])
                 for k, A in enumerate(C.objects)}
        theta = DinatPQ(W, D, comps)
        if check_dinatural(theta):
            return False
        built.append(theta.label())
    wanted = {t.label() for t in enumerate_dinat(W, D, cap)}
    return len(built) == len(set(built)) and set(built) == wanted


def weighted_end_point_reduction(D: SetFunctorPQ, cap: int | None = None) -> bool:
    """With the point weight, the weighted end is the plain end, label for label."""
    C = D.base
    res = weighted_end(point_functor(C, (1, 1)), D, cap)
    want = end_pq(D, cap=cap)
    got = set()
    for fam in res.carrier:
        got.add(tuple(fam[k][0] for k in range(len(C.objects))))
    return len(got) == len(res.carrier) and got == set(want.carrier.elements)


def product_pairing_functor(W: SetFunctorPQ, D: SetFunctorPQ,
                            cap: int | None = None) -> SetFunctorPQ:
    """S(A1,A2; B1,B2) = W(A1;B1) x D(A2;B2), signature (2,2)."""
    if W.sig.arity != 2 or D.sig.arity != 2:
        raise ShapeMismatch("weighted pairing needs (1,1) inputs")

    def fiber(T):
        A1, A2, B1, B2 = T
        return setops.product([W.fiber((A1, B1)), D.fiber((A2, B2))], cap)

    def act(us):
        u1, u2, v1, v2 = us
        wmap, dmap = W.act((u1, v1)), D.act((u2, v2))
        return lambda t: (wmap(t[0]), dmap(t[1]))

    return functor_from_rule(W.base, (2, 2), fiber, act,
                             f"({W.name}x{D.name})", cap)


def weighted_coend(W: SetFunctorPQ, D: SetFunctorPQ,
                   cap: int | None = None) -> CoendResult:
    """The coend of D weighted by W, as a (2,2)-coend of the product pairing."""
    return coend_pq(product_pairing_functor(W, D, cap), cap=cap)


def weighted_coend_point_reduction(D: SetFunctorPQ, cap: int | None = None) -> bool:
    """With the point weight, the weighted coend is the plain coend.

    The comparison sends a class through (A, (pt, x)) |-> [A, x] and must be
    constant on classes and bijective.
    """
    C = D.base
    res = weighted_coend(point_functor(C, (1, 1)), D, cap)
    want = coend_pq(D, cap=cap)
    assign = {}
    for cls, members in zip(res.carrier, res.classes):
        vals = {want.legs[A](t[1]) for A, t in members}
        if len(vals) != 1:
            return False
        assign[cls] = vals.pop()
    return len(set(assign.values())) == len(assign) and \
        set(assign.values()) == set(want.carrier.elements)


def weighted_coend_maps_out_check(W: SetFunctorPQ, D: SetFunctorPQ,
                                  n_points: int = 2,
                                  cap: int | None = None) -> bool:
    """Maps out of the weighted coend are dinaturals from W into Fn(D-flip, X).

    This is the defining property of the weighted coend, checked against a
    test set X with n_points elements by counting both sides.
    """
    X = finset(tuple(f"x{i}" for i in range(n_points)))
    res = weighted_coend(W, D, cap)

    def fiber(T):
        A, B = T
        return hom_set(D.fiber((B, A)), X, cap)

    def act(us):
        u, v = us
        pre = D.act((v, u))
        src_fib = D.fiber((D.base.src[v], D.base.tgt[u]))

        def apply(lab):
            return tuple(lab[src_fib.position(pre(w))] for w in pre.src)

        return apply

    H = functor_from_rule(D.base, (1, 1), fiber, act, f"fn({D.name},X)", cap)
    dinats = enumerate_dinat(W, H, cap)
    return n_points ** len(res.carrier) == len(dinats)


def multi_pairing_functor(Ws, D: SetFunctorPQ, cap: int | None = None) -> SetFunctorPQ:
    """Fn(prod_k W_k(B_k;A_k), D(A_0;B_0)) of signature (n+1, n+1)."""
    n = len(Ws)
    C = D.base

    def src_product(T):
        As, Bs = T[1:n + 1], T[n + 2:]
        return setops.product([Ws[k].fiber((Bs[k], As[k])) for k in range(n)], cap)

    def fiber(T):
        return hom_set(src_product(T), D.fiber((T[0], T[n + 1])), cap)

    def act(us):
        u0, v0 = us[0], us[n + 1]
        pres = [Ws[k].act((us[n + 2 + k], us[1 + k])) for k in range(n)]
        post = D.act((u0, v0))
        Ts = tuple(C.tgt[u] for u in us[:n + 1]) + tuple(C.src[v] for v in us[n + 1:])
        src_fib = src_product(Ts)

        def apply(lab):
            def one(ws):
                moved = tuple(pres[k](ws[k]) for k in range(n))
                return post(lab[src_fib.position(moved)])

            tgt_ws = setops.product([p.src for p in pres], cap) if n else finset([()])
            return tuple(one(ws) for ws in tgt_ws)

        return apply

    return functor_from_rule(C, (n + 1, n + 1), fiber, act,
                             f"fn({n}-weights,{D.name})", cap)


def multi_weighted_end(Ws, D: SetFunctorPQ, cap: int | None = None) -> EndResult:
    """The end of D weighted by a list of weights, as an (n+1,n+1)-end."""
    return end_pq(multi_pairing_functor(Ws, D, cap), cap=cap)


def multi_weighted_end_point_reduction(D: SetFunctorPQ, n: int,
                                       cap: int | None = None) -> bool:
    """With every weight the point, the n-weighted end is the plain end."""
    C = D.base
    res = multi_weighted_end([point_functor(C, (1, 1))] * n, D, cap)
    want = end_pq(D, cap=cap)
    got = set()
    for fam in res.carrier:
        got.add(tuple(fam[k][0] for k in range(len(C.objects))))
    return len(got) == len(res.carrier) and got == set(want.carrier.elements)


def multi_weighted_end_matches_iterated(W1: SetFunctorPQ, W2: SetFunctorPQ,
                                        D: SetFunctorPQ,
                                        cap: int | None = None) -> bool:
    """A doubly weighted end agrees in size with weighting once, then again.

    Currying Fn(W1 x W2, D) as Fn(W1, Fn(W2, D)) identifies the two-weight
    end with the W1-weighted end of the dinaturality integrand of (W2, D).
    """
    res = multi_weighted_end([W1, W2], D, cap)
    inner = dinat_integrand(W2, D, cap)
    ref = weighted_end(W1, inner, cap)
    return len(res.carrier) == len(ref.carrier)


# ---------------------------------------------------------------------------
# weighted Kan extensions, one object at a time
# ---------------------------------------------------------------------------

@dataclass
class WeightedKan:
    """Per-object fibers of a weighted Kan extension, with its diagram."""

    W: SetFunctorPQ
    K: Functor
    source: SetDiagram
    direction: str
    fibers: dict = field(repr=False)
    diagram: SetDiagram | None = None


def weighted_kan_left(W: SetFunctorPQ, K: Functor, F: SetDiagram,
                      cap: int | None = None) -> WeightedKan:
    """The W-weighted left extension of F along K.

    At a target object e the fiber is the (2,2)-coend of
    W(A1;B1) x hom(K A2, e) x F(B2); e varies by postcomposition.
    """
    C = K.src_cat
    E = K.tgt_cat
    out = {}
    for e in E.objects:
        def fiber(T, e=e):
            A1, A2, B1, B2 = T
            return setops.product([W.fiber((A1, B1)),
                                   finset(E.hom(K.on_obj(A2), e)),
                                   F.fiber(B2)], cap)

        def act(us, e=e):
            u1, u2, v1, v2 = us
            wmap, fmap = W.act((u1, v1)), F.act(v2)
            ku2 = K.on_mor(u2)
            return lambda t: (wmap(t[0]), E.compose(t[1], ku2), fmap(t[2]))

        T = functor_from_rule(C, (2, 2), fiber, act, f"wlan@{e}", cap)
        out[e] = coend_pq(T, cap=cap)

    def dfiber(e):
        return out[e].carrier

    def dact(m):
        e, e2 = E.src[m], E.tgt[m]

        def move(cls):
            A, t = _class_rep(out[e], cls)
            w, phi, y = t
            return out[e2].legs[A]((w, E.compose(m, phi), y))

        return setops.fn_from_map(out[e].carrier, out[e2].carrier, move)

    diagram = SetDiagram(E, dfiber, dact, name=f"wlan({F.name})")
    return WeightedKan(W, K, F, "left", out, diagram)


def weighted_kan_right(W: SetFunctorPQ, K: Functor, F: SetDiagram,
                       cap: int | None = None) -> WeightedKan:
    """The W-weighted right extension of F along K.

    At a target object e the fiber is the (2,2)-end of
    Fn(W(B1;A1) x hom(e, K A2), F(B2)); e varies by precomposition.
    """
    C = K.src_cat
    E = K.tgt_cat
    out = {}
    for e in E.objects:
        def src_prod(A1, A2, B1, e=e):
            return setops.product([W.fiber((B1, A1)),
                                   finset(E.hom(e, K.on_obj(A2)))], cap)

        def fiber(T, e=e):
            A1, A2, B1, B2 = T
            return hom_set(src_prod(A1, A2, B1), F.fiber(B2), cap)

        def act(us, e=e):
            u1, u2, v1, v2 = us
            pre_w = W.act((v1, u1))
            ku2 = K.on_mor(u2)
            post = F.act(v2)
            src_fib = src_prod(C.tgt[u1], C.tgt[u2], C.src[v1])

            def apply(lab):
                dom = setops.product([pre_w.src,
                                      finset(E.hom(e, K.on_obj(C.src[u2])))], cap)
                return tuple(
                    post(lab[src_fib.position((pre_w(w), E.compose(ku2, phi)))])
                    for (w, phi) in dom)

            return apply

        T = functor_from_rule(C, (2, 2), fiber, act, f"wran@{e}", cap)
        out[e] = end_pq(T, cap=cap)

    def dfiber(e):
        return out[e].carrier

    def dact(m):
        e, e2 = E.src[m], E.tgt[m]

        def move(fam):
            new = []
            for k, A in enumerate(C.objects):
                dom_old = setops.product([W.fiber((A, A)),
                                          finset(E.hom(e, K.on_obj(A)))], cap)
                dom_new = setops.product([W.fiber((A, A)),
                                          finset(E.hom(e2, K.on_obj(A)))], cap)
                lab = fam[k]
                new.append(tuple(lab[dom_old.position((w, E.compose(phi, m)))]
                                 for (w, phi) in dom_new))
            return tuple(new)

        return setops.fn_from_map(out[e].carrier, out[e2].carrier, move)

    diagram = SetDiagram(E, dfiber, dact, name=f"wran({F.name})")
    return WeightedKan(W, K, F, "right", out, diagram)


def weighted_kan_left_point_reduction(K: Functor, F: SetDiagram,
                                      cap: int | None = None) -> bool:
    """With the point weight, the weighted left extension is the pointwise one.

    The comparison sends a class through (A, (pt, phi, y)) |-> [(A, phi), y]
    and must be constant on classes and bijective.
    """
    C = K.src_cat
    got = weighted_kan_left(point_functor(C, (1, 1)), K, F, cap)
    want = left_kan(F, K, cap)
    for e in K.tgt_cat.objects:
        res = got.fibers[e]
        assign = {}
        for cls, members in zip(res.carrier, res.classes):
            vals = {want[e].projection(((A, t[1]), t[2])) for A, t in members}
            if len(vals) != 1:
                return False
            assign[cls] = vals.pop()
        if len(set(assign.values())) != len(assign) or \
                set(assign.values()) != set(want[e].carrier.elements):
            return False
    return True


def weighted_kan_right_point_reduction(K: Functor, F: SetDiagram,
                                       cap: int | None = None) -> bool:
    """With the point weight, the weighted right extension is the pointwise one.

    Families are flattened by evaluating each component at (pt, phi) and must
    reproduce the pointwise right extension label for label.
    """
    C = K.src_cat
    E = K.tgt_cat
    got = weighted_kan_right(point_functor(C, (1, 1)), K, F, cap)
    want = right_kan(F, K, cap)
    for e in E.objects:
        variables = [(a, phi) for a in C.objects
                     for phi in E.hom(e, K.on_obj(a))]
        flat = set()
        for fam in got.fibers[e].carrier:
            vals = []
            for a, phi in variables:
                dom = setops.product([setops.POINT,
                                      finset(E.hom(e, K.on_obj(a)))])
                k = C.obj_position(a)
                vals.append(fam[k][dom.position(("*", phi))])
            flat.add(tuple(vals))
        if len(flat) != len(got.fibers[e].carrier) or \
                flat != set(want[e].elements):
            return False
    return True


def weighted_kan_left_nat_count_check(W: SetFunctorPQ, K: Functor,
                                      F: SetDiagram, G: SetDiagram,
                                      cap: int | None = None) -> bool:
    """Maps out of the weighted left extension = weighted end of Fn(F, GK).

    This is the defining adjunction of the weighted left extension, checked
    by counting natural transformations against the weighted end of the
    integrand A, B |-> Fn(F A, G(K B)).
    """
    lan = weighted_kan_left(W, K, F, cap)
    nats = enumerate_nat(lan.diagram, G, cap)
    C = K.src_cat

    def fiber(T):
        A, B = T
        return hom_set(F.fiber(A), G.fiber(K.on_obj(B)), cap)

    def act(us):
        u, v = us
        pre = F.act(u)
        post = G.act(K.on_mor(v))
        src_fib = F.fiber(C.tgt[u])
        dom = F.fiber(C.src[u])

        def apply(lab):
            return tuple(post(lab[src_fib.position(pre(x))]) for x in dom)

        return apply

    H = functor_from_rule(C, (1, 1), fiber, act,
                          f"fn({F.name},{G.name}K)", cap)
    return len(nats) == len(weighted_end(W, H, cap).carrier)


def weighted_kan_right_nat_count_check(W: SetFunctorPQ, K: Functor,
                                       F: SetDiagram, G: SetDiagram,
                                       cap: int | None = None) -> bool:
    """Maps into the weighted right extension = weighted end of Fn(GK, F).

    The defining adjunction of the weighted right extension, checked by
    counting natural transformations against the weighted end of the
    integrand A, B |-> Fn(G(K A), F B).
    """
    ran = weighted_kan_right(W, K, F, cap)
    nats = enumerate_nat(G, ran.diagram, cap)
    C = K.src_cat

    def fiber(T):
        A, B = T
        return hom_set(G.fiber(K.on_obj(A)), F.fiber(B), cap)

    def act(us):
        u, v = us
        pre = G.act(K.on_mor(u))
        post = F.act(v)
        src_fib = G.fiber(K.on_obj(C.tgt[u]))
        dom = G.fiber(K.on_obj(C.src[u]))

        def apply(lab):
            return tuple(post(lab[src_fib.position(pre(x))]) for x in dom)

        return apply

    H = functor_from_rule(C, (1, 1), fiber, act,
                          f"fn({G.name}K,{F.name})", cap)
    return len(nats) == len(weighted_end(W, H, cap).carrier)


# ---------------------------------------------------------------------------
# two-variable (diagonal) Kan extensions
# ---------------------------------------------------------------------------

@dataclass
class DiagonalKan:
    """Fibers of a two-variable extension, with the induced diagram."""

    K: Functor
    source: SetFunctorPQ
    fibers: dict = field(repr=False)
    diagram: SetDiagram | None = None
    variance: str = "standard"
    direction: str = "left"


def diagonal_kan(K: Functor, F: SetFunctorPQ, cap: int | None = None,
                 variance: str = "standard") -> DiagonalKan:
    """Left extension of F along a two-variable K, one target at a time.

    Standard variance: the fiber at d is the (2,2)-coend of
    hom(K(B1,A1), d) x F(A2;B2), and d varies covariantly.  The toggled
    variant hom(d, K(A1,B1)) x F(A2;B2) is built on request but carries no
    endorsed laws (d then varies contravariantly; no diagram is attached).
    """
    if variance not in ("standard", "toggled"):
        raise ShapeMismatch(f"unknown variance {variance!r}")
    C = F.base
    E = K.tgt_cat
    results = {}
    for d in E.objects:
        if variance == "standard":
            def fiber(T, d=d):
                A1, A2, B1, B2 = T
                return setops.product([finset(E.hom(K.on_obj((B1, A1)), d)),
                                       F.fiber((A2, B2))], cap)

            def act(us, d=d):
                u1, u2, v1, v2 = us
                kmor = K.on_mor((v1, u1))
                fmap = F.act((u2, v2))
                return lambda t: (E.compose(t[0], kmor), fmap(t[1]))
        else:
            def fiber(T, d=d):
                A1, A2, B1, B2 = T
                return setops.product([finset(E.hom(d, K.on_obj((A1, B1)))),
                                       F.fiber((A2, B2))], cap)

            def act(us, d=d):
                u1, u2, v1, v2 = us
                kmor = K.on_mor((u1, v1))
                fmap = F.act((u2, v2))
                return lambda t: (E.compose(kmor, t[0]), fmap(t[1]))

        T = functor_from_rule(C, (2, 2), fiber, act, f"dilan@{d}", cap)
        results[d] = coend_pq(T, cap=cap)
    diagram = None
    if variance == "standard":
        def dfiber(d):
            return results[d].carrier

        def dact(w):
            d, d2 = E.src[w], E.tgt[w]

            def move(cls):
                A, t = _class_rep(results[d], cls)
                phi, x = t
                return results[d2].legs[A]((E.compose(w, phi), x))

            return setops.fn_from_map(results[d].carrier, results[d2].carrier, move)

        diagram = SetDiagram(E, dfiber, dact, name=f"dilan({F.name})")
    return DiagonalKan(K, F, results, diagram, variance)


def _class_rep(co: CoendResult, cls):
    for label, members in zip(co.carrier, co.classes):
        if label == cls:
            return members[0]
    raise HaceError(f"no class {cls!r}")


def diagonal_kan_right(K: Functor, F: SetFunctorPQ,
                       cap: int | None = None) -> DiagonalKan:
    """Right extension of F along a two-variable K, one target at a time.

    The fiber at e is the (2,2)-end of Fn(hom(e, K(B1,A1)), F(A2;B2)), and
    e varies covariantly by precomposition on the hom coordinate.
    """
    C = F.base
    E = K.tgt_cat
    results = {}
    for e in E.objects:
        def src_hom(B1, A1, e=e):
            return finset(E.hom(e, K.on_obj((B1, A1))))

        def fiber(T, e=e):
            A1, A2, B1, B2 = T
            return hom_set(src_hom(B1, A1), F.fiber((A2, B2)), cap)

        def act(us, e=e):
            u1, u2, v1, v2 = us
            kmor = K.on_mor((v1, u1))
            fmap = F.act((u2, v2))
            src_fib = src_hom(C.src[v1], C.tgt[u1])

            def apply(lab):
                dom = src_hom(C.tgt[v1], C.src[u1])
                return tuple(fmap(lab[src_fib.position(E.compose(kmor, phi))])
                             for phi in dom)

            return apply

        T = functor_from_rule(C, (2, 2), fiber, act, f"diran@{e}", cap)
        results[e] = end_pq(T, cap=cap)

    def dfiber(e):
        return results[e].carrier

    def dact(m):
        e, e2 = E.src[m], E.tgt[m]

        def move(fam):
            new = []
            for k, A in enumerate(C.objects):
                dom_old = finset(E.hom(e, K.on_obj((A, A))))
                dom_new = finset(E.hom(e2, K.on_obj((A, A))))
                lab = fam[k]
                new.append(tuple(lab[dom_old.position(E.compose(phi, m))]
                                 for phi in dom_new))
            return tuple(new)

        return setops.fn_from_map(results[e].carrier, results[e2].carrier, move)

    diagram = SetDiagram(E, dfiber, dact, name=f"diran({F.name})")
    return DiagonalKan(K, F, results, diagram, "standard", "right")


def diagonal_kan_nat_count_check(K: Functor, F: SetFunctorPQ, G: SetDiagram,
                                 cap: int | None = None) -> bool:
    """Maps out of the two-variable extension = dinaturals into the pullback."""
    lan = diagonal_kan(K, F, cap)
    nats = enumerate_nat(lan.diagram, G, cap)
    GK = functor_from_rule(F.base, (1, 1),
                           lambda T: G.fiber(K.on_obj(T)),
                           lambda us: lambda x: G.act(K.on_mor(us))(x),
                           name=f"{G.name}oK", cap=cap)
    dinats = enumerate_dinat(F, GK, cap)
    return len(nats) == len(dinats)


def diagonal_kan_right_nat_count_check(K: Functor, F: SetFunctorPQ,
                                       G: SetDiagram,
                                       cap: int | None = None) -> bool:
    """Maps into the two-variable right extension = dinaturals from the pullback."""
    ran = diagonal_kan_right(K, F, cap)
    nats = enumerate_nat(G, ran.diagram, cap)
    GK = functor_from_rule(F.base, (1, 1),
                           lambda T: G.fiber(K.on_obj(T)),
                           lambda us: lambda x: G.act(K.on_mor(us))(x),
                           name=f"{G.name}oK", cap=cap)
    dinats = enumerate_dinat(GK, F, cap)
    return len(nats) == len(dinats)


def diagonal_kan_left_hom_weighted_check(K: Functor, F: SetFunctorPQ,
                                         cap: int | None = None) -> bool:
    """Per target, the two-variable left extension is the hom-weighted colimit.

    The colimit runs over the one-step power category with the weight
    (A,B) |-> hom(B,A) in opposite variance, paired with the integrand
    (A,B) |-> hom(K(B,A), e) x F(A;B); sizes are compared per target.
    This generalizes "a coend is the hom-weighted colimit".
    """
    C = F.base
    E = K.tgt_cat
    P = power_pq(C, (1, 1))
    lan = diagonal_kan(K, F, cap)
    for e in E.objects:
        def fiber(T, e=e):
            (A1, B1), (A2, B2) = T
            return setops.product(
                [finset(C.hom(B1, A1)),
                 finset(E.hom(K.on_obj((B2, A2)), e)),
                 F.fiber((A2, B2))], cap)

        def act(us, e=e):
            (u1, v1), (u2, v2) = us
            kmor = K.on_mor((v2, u2))
            fmap = F.act((u2, v2))
            return lambda t: (C.compose(u1, C.compose(t[0], v1)),
                              E.compose(t[1], kmor), fmap(t[2]))

        T = functor_from_rule(P, (1, 1), fiber, act, f"wcolim@{e}", cap)
        if len(coend_pq(T, cap=cap).carrier) != len(lan.fibers[e].carrier):
            return False
    return True


def diagonal_kan_right_hom_weighted_check(K: Functor, F: SetFunctorPQ,
                                          cap: int | None = None) -> bool:
    """Per target, the two-variable right extension is the hom-weighted limit.

    The limit runs over the one-step power category: natural families from
    the straight hom weight (A,B) |-> hom(A,B) into the integrand
    (A,B) |-> Fn(hom(e, K(B,A)), F(A;B)); sizes are compared per target.
    This generalizes "an end is the hom-weighted limit".
    """
    C = F.base
    E = K.tgt_cat
    P = power_pq(C, (1, 1))
    ran = diagonal_kan_right(K, F, cap)
    V = SetDiagram(P, lambda j: finset(C.hom(j[0], j[1])),
                   lambda us: (lambda w: C.compose(us[1], C.compose(w, us[0]))),
                   name="homP")
    for e in E.objects:
        def hfiber(j, e=e):
            A, B = j
            return hom_set(finset(E.hom(e, K.on_obj((B, A)))),
                           F.fiber((A, B)), cap)

        def hact(us, e=e):
            u, v = us
            kmor = K.on_mor((v, u))
            fmap = F.act((u, v))
            src_dom = finset(E.hom(e, K.on_obj((C.src[v], C.tgt[u]))))
            new_dom = finset(E.hom(e, K.on_obj((C.tgt[v], C.src[u]))))

            def apply(lab):
                return tuple(fmap(lab[src_dom.position(E.compose(kmor, phi))])
                             for phi in new_dom)

            return apply

        H = SetDiagram(P, hfiber, hact, name=f"homsrc@{e}")
        if len(enumerate_nat(V, H, cap)) != len(ran.fibers[e].carrier):
            return False
    return True


def collapse_functor(C: FinCat, cap: int | None = None) -> Functor:
    """The unique functor from the one-step power category to the point."""
    P = power_pq(C, (1, 1))
    pt = point_category()
    return Functor(P, pt, {T: "*" for T in P.objects},
                   {us: "id_*" for us in P.morphisms}, name="collapse")


def diagonal_kan_point_is_coend(F: SetFunctorPQ, cap: int | None = None) -> bool:
    """Extending along the collapse functor computes the coend."""
    lan = diagonal_kan(collapse_functor(F.base), F, cap)
    res = lan.fibers["*"]
    want = coend_pq(F, cap=cap)
    assign = {}
    for cls, members in zip(res.carrier, res.classes):
        vals = {want.legs[A](t[1]) for A, t in members}
        if len(vals) != 1:
            return False
        assign[cls] = vals.pop()
    return len(set(assign.values())) == len(assign) and \
        set(assign.values()) == set(want.carrier.elements)


def diagonal_kan_identity_is_chained(F: SetFunctorPQ, cap: int | None = None) -> bool:
    """Extending along the identity rebuilds the chained functor's fibers."""
    P = power_pq(F.base, (1, 1))
    ident = Functor(P, P, {T: T for T in P.objects},
                    {us: us for us in P.morphisms}, name="id")
    lan = diagonal_kan(ident, F, cap)
    J = cokusarigama(F, cap)
    for T in P.objects:
        res = lan.fibers[T]
        assign = {}
        for cls, members in zip(res.carrier, res.classes):
            vals = set()
            for A, t in members:
                (xi1, xi2), x = t
                vals.add(J.class_of(T, A, (xi1,), (xi2,), x))
            if len(vals) != 1:
                return False
            assign[cls] = vals.pop()
        if len(set(assign.values())) != len(assign) or \
                set(assign.values()) != set(J.functor.fiber(T).elements):
            return False
    return True


def weighted_diagonal_kan(W: SetFunctorPQ, K: Functor, F: SetFunctorPQ,
                          cap: int | None = None,
                          direction: str = "left") -> dict:
    """The W-weighted two-variable extension, one (4,4) integral per target.

    W has signature (2,2).  Leftward the fiber at d is the (4,4)-coend of
    W(A1,A2;B1,B2) x hom(K(B3,A3), d) x F(A4;B4); rightward it is the
    (4,4)-end of Fn(W(B1,B2;A1,A2) x hom(e, K(B3,A3)), F(A4;B4)).
    """
    if direction not in ("left", "right"):
        raise ShapeMismatch(f"unknown direction {direction!r}")
    C = F.base
    E = K.tgt_cat
    out = {}
    for d in E.objects:
        if direction == "left":
            def fiber(T, d=d):
                A1, A2, A3, A4, B1, B2, B3, B4 = T
                return setops.product([W.fiber((A1, A2, B1, B2)),
                                       finset(E.hom(K.on_obj((B3, A3)), d)),
                                       F.fiber((A4, B4))], cap)

            def act(us, d=d):
                u1, u2, u3, u4, v1, v2, v3, v4 = us
                wmap = W.act((u1, u2, v1, v2))
                kmor = K.on_mor((v3, u3))
                fmap = F.act((u4, v4))
                return lambda t: (wmap(t[0]), E.compose(t[1], kmor), fmap(t[2]))

            T = functor_from_rule(C, (4, 4), fiber, act, f"wdilan@{d}", cap)
            out[d] = coend_pq(T, cap=cap)
        else:
            def src_prod(T, d=d):
                A1, A2, A3, A4, B1, B2, B3, B4 = T
                return setops.product([W.fiber((B1, B2, A1, A2)),
                                       finset(E.hom(d, K.on_obj((B3, A3))))],
                                      cap)

            def fiber(T, d=d):
                return hom_set(src_prod(T), F.fiber((T[3], T[7])), cap)

            def act(us, d=d):
                u1, u2, u3, u4, v1, v2, v3, v4 = us
                pre_w = W.act((v1, v2, u1, u2))
                kmor = K.on_mor((v3, u3))
                fmap = F.act((u4, v4))
                src_key = (C.tgt[u1], C.tgt[u2], C.tgt[u3], C.tgt[u4],
                           C.src[v1], C.src[v2], C.src[v3], C.src[v4])
                tgt_key = (C.src[u1], C.src[u2], C.src[u3], C.src[u4],
                           C.tgt[v1], C.tgt[v2], C.tgt[v3], C.tgt[v4])
                src_fib = src_prod(src_key)

                def apply(lab):
                    dom = src_prod(tgt_key)
                    return tuple(
                        fmap(lab[src_fib.position(
                            (pre_w(w), E.compose(kmor, phi)))])
                        for (w, phi) in dom)

                return apply

            T = functor_from_rule(C, (4, 4), fiber, act, f"wdiran@{d}", cap)
            out[d] = end_pq(T, cap=cap)
    return out


def weighted_diagonal_kan_point_reduction(K: Functor, F: SetFunctorPQ,
                                          cap: int | None = None) -> bool:
    """With the point weight the (4,4)-coend form matches the (2,2) form."""
    W = point_functor(F.base, (2, 2))
    got = weighted_diagonal_kan(W, K, F, cap)
    want = diagonal_kan(K, F, cap)
    for d in K.tgt_cat.objects:
        res, ref = got[d], want.fibers[d]
        assign = {}
        for cls, members in zip(res.carrier, res.classes):
            vals = {ref.legs[A]((t[1], t[2])) for A, t in members}
            if len(vals) != 1:
                return False
            assign[cls] = vals.pop()
        if len(set(assign.values())) != len(assign) or \
                set(assign.values()) != set(ref.carrier.elements):
            return False
    return True


def weighted_diagonal_kan_right_point_reduction(K: Functor, F: SetFunctorPQ,
                                                cap: int | None = None) -> bool:
    """With the point weight the (4,4)-end form matches the (2,2)-end form.

    Dropping the constant point coordinate leaves the family labels
    unchanged, so the carriers must agree element for element.
    """
    W = point_functor(F.base, (2, 2))
    got = weighted_diagonal_kan(W, K, F, cap, direction="right")
    want = diagonal_kan_right(K, F, cap)
    for d in K.tgt_cat.objects:
        if set(got[d].carrier.elements) != set(want.fibers[d].carrier.elements):
            return False
    return True


def weighted_diagonal_kan_terminal_check(V: SetFunctorPQ, F: SetFunctorPQ,
                                         cap: int | None = None) -> bool:
    """Against the one-object target, the (4,4) form is the weighted coend.

    The weight is V padded with a mute pair of slots, the two-variable
    functor collapses to the point, and the comparison sends a class
    through (A, (w, phi, y)) |-> [A, (w, y)]; it must be constant on
    classes and bijective.
    """
    W = mute_extend(V, 1, 1)
    K = collapse_functor(F.base, cap)
    got = weighted_diagonal_kan(W, K, F, cap)
    ref = weighted_coend(V, F, cap)
    res = got["*"]
    assign = {}
    for cls, members in zip(res.carrier, res.classes):
        vals = {ref.legs[A]((t[0], t[2])) for A, t in members}
        if len(vals) != 1:
            return False
        assign[cls] = vals.pop()
    return len(set(assign.values())) == len(assign) and \
        set(assign.values()) == set(ref.carrier.elements)


# ---------------------------------------------------------------------------
# Day convolution over a strict monoidal base
# ---------------------------------------------------------------------------

@dataclass
class MonoidalFinCat:
    """A strictly associative, strictly unital tensor on a FinCat."""

    cat: FinCat
    unit: object
    tensor_obj: dict
    tensor_mor: dict

    def tobj(self, a, b):
        return self.tensor_obj[(a, b)]

    def tmor(self, u, v):
        return self.tensor_mor[(u, v)]

    def tensor_objs(self, objs):
        out = self.unit
        for a in objs:
            out = self.tobj(out, a)
        return out

    def tensor_mors(self, mors):
        out = self.cat.ident[self.unit]
        for u in mors:
            out = self.tmor(out, u)
        return out


def validate_strict_monoidal(M: MonoidalFinCat, cap: int | None = None) -> None:
    C = M.cat
    for a in C.objects:
        if M.tobj(a, M.unit) != a or M.tobj(M.unit, a) != a:
            raise NotStrictMonoidal(f"unit not strict at {a!r}")
    for u in C.morphisms:
        e = C.ident[M.unit]
        if M.tmor(u, e) != u or M.tmor(e, u) != u:
            raise NotStrictMonoidal(f"unit not strict on morphism {u!r}")
    for a in C.objects:
        for b in C.objects:
            t = M.tobj(a, b)
            if C.src[M.tmor(C.ident[a], C.ident[b])] != t:
                raise NotStrictMonoidal(f"tensor of identities ill-typed at ({a!r},{b!r})")
            if M.tmor(C.ident[a], C.ident[b]) != C.ident[t]:
                raise NotStrictMonoidal(f"identities not preserved at ({a!r},{b!r})")
    triples = len(C.objects) ** 3
    setops.check_cap("monoidal associativity triples", triples, cap)
    for a in C.objects:
        for b in C.objects:
            for c in C.objects:
                if M.tobj(M.tobj(a, b), c) != M.tobj(a, M.tobj(b, c)):
                    raise NotStrictMonoidal(f"objects not associative at ({a!r},{b!r},{c!r})")
    for u in C.morphisms:
        for v in C.morphisms:
            w = M.tmor(u, v)
            if C.src[w] != M.tobj(C.src[u], C.src[v]) or \
                    C.tgt[w] != M.tobj(C.tgt[u], C.tgt[v]):
                raise NotStrictMonoidal(f"tensor ill-typed on ({u!r},{v!r})")
    for u in C.morphisms:
        for v in C.morphisms:
            for w in C.morphisms:
                if M.tmor(M.tmor(u, v), w) != M.tmor(u, M.tmor(v, w)):
                    raise NotStrictMonoidal(f"morphisms not associative at ({u!r},{v!r},{w!r})")
    comp = [(g, f) for f in C.morphisms for g in C.morphisms
            if C.tgt[f] == C.src[g]]
    setops.check_cap("monoidal interchange pairs", len(comp) ** 2, cap)
    for g, f in comp:
        for g2, f2 in comp:
            left = M.tmor(C.compose(g, f), C.compose(g2, f2))
            right = C.compose(M.tmor(g, g2), M.tmor(f, f2))
            if left != right:
                raise NotStrictMonoidal(f"interchange fails at ({g!r},{f!r},{g2!r},{f2!r})")


def cyclic_monoidal(n: int) -> MonoidalFinCat:
    """The discrete cyclic-addition base on residues 0..n-1."""
    objects = list(range(n))
    ident = {k: f"id_{k}" for k in objects}
    morphisms = [ident[k] for k in objects]
    src = {ident[k]: k for k in objects}
    tgt = dict(src)
    compose = {(ident[k], ident[k]): ident[k] for k in objects}
    C = FinCat(f"Z{n}", objects, morphisms, src, tgt, ident, compose)
    tensor_obj = {(a, b): (a + b) % n for a in objects for b in objects}
    tensor_mor = {(ident[a], ident[b]): ident[(a + b) % n]
                  for a in objects for b in objects}
    return MonoidalFinCat(C, 0, tensor_obj, tensor_mor)


def meet_monoidal(C: FinCat) -> MonoidalFinCat:
    """A lattice poset under meet, with the top element as unit."""
    top = lattice_meet(C, ())
    tensor_obj, tensor_mor = {}, {}
    for a in C.objects:
        for b in C.objects:
            tensor_obj[(a, b)] = lattice_meet(C, (a, b))
    for u in C.morphisms:
        for v in C.morphisms:
            s = tensor_obj[(C.src[u], C.src[v])]
            t = tensor_obj[(C.tgt[u], C.tgt[v])]
            tensor_mor[(u, v)] = C.hom(s, t)[0]
    return MonoidalFinCat(C, top, tensor_obj, tensor_mor)


def abelian_monoid_monoidal(C: FinCat) -> MonoidalFinCat:
    """A one-object commutative monoid as a strict monoidal base.

    The tensor multiplies endomorphisms; interchange needs commutativity.
    """
    if len(C.objects) != 1:
        raise NotStrictMonoidal("monoid tensor needs a one-object base")
    obj = C.objects[0]
    tensor_obj = {(obj, obj): obj}
    tensor_mor = {(u, v): C.compose(u, v)
                  for u in C.morphisms for v in C.morphisms}
    return MonoidalFinCat(C, obj, tensor_obj, tensor_mor)


def day_tensor(M: MonoidalFinCat, Fs, cap: int | None = None) -> SetFunctorPQ:
    """n-fold convolution of presheaves on a strict monoidal base.

    The factors have signature (1,0); at c the fiber is the (n,n)-coend of
    prod_k F_k(A_k) x C(c, B_1 x..x B_n), contravariant in c by
    precomposition on the hom coordinate.  The result is again a presheaf,
    with the per-object coends attached as day_results.
    """
    C = M.cat
    n = len(Fs)
    for F in Fs:
        if (F.sig.p, F.sig.q) != (1, 0):
            raise ShapeMismatch("convolution factors must have signature (1,0)")
    results = {}
    for c in C.objects:
        def fiber(T, c=c):
            As, Bs = T[:n], T[n:]
            return setops.product(
                [Fs[k].fiber((As[k],)) for k in range(n)]
                + [finset(C.hom(c, M.tensor_objs(Bs)))], cap)

        def act(us, c=c):
            xis, vs = us[:n], us[n:]
            fmaps = [Fs[k].act((xis[k],)) for k in range(n)]
            tv = M.tensor_mors(vs)

            def apply(t):
                return tuple(fmaps[k](t[k]) for k in range(n)) + \
                    (C.compose(tv, t[n]),)

            return apply

        T = functor_from_rule(C, (n, n), fiber, act, f"day@{c}", cap)
        results[c] = coend_pq(T, cap=cap)

    def move_along(u):
        c, c2 = C.tgt[u], C.src[u]

        def move(cls):
            A, t = _class_rep(results[c], cls)
            return results[c2].legs[A](t[:n] + (C.compose(t[n], u),))

        return setops.fn_from_map(results[c].carrier, results[c2].carrier, move)

    name = "day(" + ",".join(F.name for F in Fs) + ")"
    out = SetFunctorPQ(C, (1, 0),
                       {(c,): results[c].carrier for c in C.objects},
                       {(u,): move_along(u) for u in C.morphisms},
                       name=name)
    validate_functor_pq(out, cap)
    out.day_results = results
    return out


def day_singleton_is_identity(M: MonoidalFinCat, F: SetFunctorPQ,
                              cap: int | None = None) -> bool:
    """One-fold convolution returns the presheaf itself (density).

    The comparison sends a class through (A, (x, phi)) |-> F(phi)(x) and
    must be constant on classes and bijective onto the fiber.
    """
    C = M.cat
    day = day_tensor(M, [F], cap)
    for c in C.objects:
        res = day.day_results[c]
        assign = {}
        for cls, members in zip(res.carrier, res.classes):
            vals = {F.act((t[1],))(t[0]) for _A, t in members}
            if len(vals) != 1:
                return False
            assign[cls] = vals.pop()
        if len(set(assign.values())) != len(assign) or \
                set(assign.values()) != set(F.fiber((c,)).elements):
            return False
    return True


def day_via_kan(M: MonoidalFinCat, F: SetFunctorPQ, G: SetFunctorPQ,
                cap: int | None = None) -> dict:
    """Binary convolution as a pointwise left extension along the tensor.

    Computed over the opposite base, where presheaves become plain diagrams.
    Recorded as an alternative presentation; carriers use unrelated labels,
    so no identification with day_tensor is asserted.
    """
    C = M.cat
    Cop = opposite(C)
    prod = product_category(Cop, Cop)
    K = Functor(prod, Cop,
                {(a, b): M.tobj(a, b) for (a, b) in prod.objects},
                {(u, v): M.tmor(u, v) for (u, v) in prod.morphisms},
                name="tensor")
    FG = SetDiagram(prod,
                    lambda ab: setops.product([F.fiber((ab[0],)),
                                               G.fiber((ab[1],))], cap),
                    lambda uv: (lambda t: (F.act((uv[0],))(t[0]),
                                           G.act((uv[1],))(t[1]))),
                    name="FxG")
    return left_kan(FG, K, cap)


# ---------------------------------------------------------------------------
# product interchange
# ---------------------------------------------------------------------------

@dataclass
class FubiniReport:
    ok: bool
    n_joint: int
    n_outer_first: int
    n_outer_second: int
    detail: str = ""


def _outer_end(F: SetFunctorPQ, G: SetFunctorPQ, cap: int | None = None):
    """Iterated end: freeze an outer key of F, end the slice over G's base,
    then end the induced outer functor.  Slice elements are (x, y) pairs in
    F-fiber x G-fiber, matching the external product's labels.

    Returns (outer end result, dict of inner end results per outer key).
    """
    C, Dc = F.base, G.base
    PF = power_pq(C, F.sig)
    inner = {}
    for tc in PF.objects:
        def sfiber(td, tc=tc):
            return setops.product([F.fiber(tc), G.fiber(td)], cap)

        def sact(vd, tc=tc):
            gmap = G.act(vd)
            return lambda t: (t[0], gmap(t[1]))

        S = functor_from_rule(Dc, G.sig, sfiber, sact, f"slice@{tc}", cap)
        inner[tc] = end_pq(S, cap=cap)

    objs_d = list(Dc.objects)
    p = F.sig.p

    def ofiber(tc):
        return inner[tc].carrier

    def oact(uc):
        tc_tgt = tuple(C.src[u] if k < p else C.tgt[u] for k, u in enumerate(uc))
        fmap = F.act(uc)

        def apply(fam):
            moved = tuple((fmap(x), y) for x, y in fam)
            if moved not in inner[tc_tgt].carrier:
                raise HaceError("induced family escapes the inner end")
            return moved

        return apply

    K1 = functor_from_rule(C, F.sig, ofiber, oact, "outer", cap)
    validate_functor_pq(K1, cap)
    return end_pq(K1, cap=cap), inner


def _paired_slot_muteness(H: SetFunctorPQ, F: SetFunctorPQ, G: SetFunctorPQ) -> bool:
    """Acting on F-slots alone must fix the G-component of every element."""
    C, Dc = F.base, G.base
    p, q = F.sig.p, F.sig.q
    r, s = G.sig.p, G.sig.q
    idc = C.ident[C.objects[0]]
    PF = power_pq(C, F.sig)
    for uc in PF.morphisms:
        for d in Dc.objects:
            idd = Dc.ident[d]
            us = tuple((uc[k], idd) for k in range(p)) \
                + tuple((idc, idd) for _ in range(r)) \
                + tuple((uc[p + k], idd) for k in range(q)) \
                + tuple((idc, idd) for _ in range(s))
            fn = H.act(us)
            fmap = F.act(uc)
            for x, y in fn.src:
                if fn((x, y)) != (fmap(x), y):
                    return False
    return True


def fubini_check(F: SetFunctorPQ, G: SetFunctorPQ,
                 cap: int | None = None) -> FubiniReport:
    """Joint end of the external product against both iterated orders.

    The flattening map must biject the outer-first families with the joint
    ones, in both orders and entry by entry, and the two joint ends must
    match under the slot swap.
    """
    H = external_product(F, G, cap=cap)
    joint = end_pq(H, cap=cap)
    prod = H.base
    pos = {o: k for k, o in enumerate(prod.objects)}
    objs_c, objs_d = list(F.base.objects), list(G.base.objects)
    if not _paired_slot_muteness(H, F, G):
        return FubiniReport(False, len(joint.carrier), 0, 0,
                            "paired slots are not mute")

    outer_c, _ = _outer_end(F, G, cap)
    flat_c = set()
    for fam in outer_c.carrier:
        joint_fam = [None] * len(prod.objects)
        for i, c in enumerate(objs_c):
            for j, d in enumerate(objs_d):
                joint_fam[pos[(c, d)]] = fam[i][j]
        flat_c.add(tuple(joint_fam))

    Hsw = external_product(G, F, cap=cap)
    joint_sw = end_pq(Hsw, cap=cap)
    prod_sw = Hsw.base
    pos_sw = {o: k for k, o in enumerate(prod_sw.objects)}
    outer_d, _ = _outer_end(G, F, cap)
    flat_d = set()
    for fam in outer_d.carrier:
        joint_fam = [None] * len(prod_sw.objects)
        for j, d in enumerate(objs_d):
            for i, c in enumerate(objs_c):
                joint_fam[pos_sw[(d, c)]] = fam[j][i]
        flat_d.add(tuple(joint_fam))

    want = set(joint.carrier.elements)
    want_sw = set(joint_sw.carrier.elements)
    swapped = set()
    for fam in want:
        entries = []
        for d, c in prod_sw.objects:
            x, y = fam[pos[(c, d)]]
            entries.append((y, x))
        swapped.add(tuple(entries))
    ok = flat_c == want and flat_d == want_sw and swapped == want_sw and \
        len(outer_c.carrier) == len(joint.carrier) == len(outer_d.carrier)
    detail = "" if ok else "iterated families do not flatten onto the joint end"
    return FubiniReport(ok, len(joint.carrier), len(outer_c.carrier),
                        len(outer_d.carrier), detail)


def pairwise_end(H: SetFunctorPQ, cap: int | None = None) -> EndResult:
    """Treat a (2,2)-functor as (1,1) over the product base and take its end.

    Built to witness that this differs from the genuine (2,2)-end, which
    identifies the two variable pairs along the diagonal.
    """
    if H.sig.arity != 4:
        raise ShapeMismatch("pairwise reading needs a (2,2) functor")
    C = H.base
    prod = product_category(C, C)

    def fiber(T):
        (a1, a2), (b1, b2) = T
        return H.fiber((a1, a2, b1, b2))

    def act(us):
        (u1, u2), (v1, v2) = us
        fn = H.act((u1, u2, v1, v2))
        return lambda x: fn(x)

    H2 = functor_from_rule(prod, (1, 1), fiber, act, f"pairs({H.name})", cap)
    return end_pq(H2, cap=cap)


# ---------------------------------------------------------------------------
# copower counting law
# ---------------------------------------------------------------------------

def copower_grid_nat_count_check(D: SetFunctorPQ, S: FinSet,
                                 cap: int | None = None) -> bool:
    """|Nat(S-copies of the grid functor, D)| = |end D| ^ |S|.

    Sound at the signatures where the grid functor carries the span classes
    (some variance block of width one).
    """
    from .twisted import hom_pi
    Hg = hom_pi(D.base, D.sig)

    def fiber(T):
        return setops.copower(S, Hg.fiber(T), cap)

    def act(us):
        fn = Hg.act(us)
        return lambda t: (t[0], fn(t[1]))

    V = functor_from_rule(D.base, D.sig, fiber, act, f"{len(S)}*grid", cap)
    nats = enumerate_nat(V.as_diagram(), D.as_diagram(), cap)
    n_end = len(end_pq(D, cap=cap).carrier)
    return len(nats) == n_end ** len(S)
