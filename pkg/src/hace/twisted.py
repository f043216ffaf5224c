"""Grid weights, element categories, and twisted-arrow-style indexes.

The grid functor assigns to (A_1..A_p; B_1..B_q) the set of all p-by-q grids
of morphisms A_i -> B_j (row-major labels).  The span weight assigns classes
of midpoint spans (m; a_i: A_i -> m; b_j: m -> B_j) under sliding the
midpoint; its collapse onto grids (composing each span) is a bijection
whenever some variance block has exactly one slot, but not in general, which
is why weighted computations downstream use the span weight.

Element categories are built covariantly (objects (j, x), morphisms pushed
forward) or contravariantly for presheaf weights (morphisms pulled back);
both project to the index category.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import setops
from .errors import AnchorNotUnique, ShapeMismatch
from .fincat import (
    FinCat,
    Functor,
    SetDiagram,
    SetFunctorPQ,
    as_sig,
    functor_from_rule,
    opposite,
    power_pq,
)
from .setops import FinFn, FinSet, check_cap, finset, fn_from_map


def hom_pi(C: FinCat, sig, name: str | None = None) -> SetFunctorPQ:
    """The grid functor: all tuples (k_ij: A_i -> B_j), row-major."""
    sig = as_sig(sig)
    p, q = sig.p, sig.q

    def fiber(T):
        homs = [C.hom(T[i], T[p + j]) for i in range(p) for j in range(q)]
        return setops.product([finset(h) for h in homs])

    def act(us):
        phis, psis = us[:p], us[p:]

        def apply(grid):
            return tuple(C.compose(psis[j], C.compose(grid[i * q + j], phis[i]))
                         for i in range(p) for j in range(q))

        return apply

    return functor_from_rule(C, sig, fiber, act, name or f"grid({p},{q})")


@dataclass
class SpanWeight:
    """The midpoint-span weight, with access to class representatives."""

    functor: SetFunctorPQ
    quots: dict
    generators: dict

    def fiber(self, T) -> FinSet:
        return self.functor.fiber(T)

    def class_of(self, T, gen):
        return self.quots[tuple(T)].projection(gen)

    def rep(self, T, label):
        return self.quots[tuple(T)].section(label)

    def id_class(self, A):
        D = self.functor
        sig = D.sig
        T = D.diag_key(A)
        e = D.base.ident[A]
        return self.class_of(T, (A, (e,) * sig.p, (e,) * sig.q))


def span_weight(C: FinCat, sig, cap: int | None = None) -> SpanWeight:
    """Classes of spans (m; a_i: A_i -> m; b_j: m -> B_j), sliding m forward.

    The generating relation identifies (m; a; (b'_j u)_j) with
    (m'; (u a_i)_i; b') for every u: m -> m'.  Covariant action by pre- and
    post-composition on the legs.
    """
    sig = as_sig(sig)
    p, q = sig.p, sig.q
    P = power_pq(C, sig)
    quots, gens, fibers = {}, {}, {}
    for T in P.objects:
        raw = []
        for m in C.objects:
            ins = [C.hom(T[i], m) for i in range(p)]
            outs = [C.hom(m, T[p + j]) for j in range(q)]
            for a in itertools.product(*ins):
                for b in itertools.product(*outs):
                    raw.append((m, a, b))
        check_cap("span_weight generators", len(raw), cap)
        ambient = finset(raw)
        pairs = []
        for u in C.morphisms:
            if C.is_identity(u):
                continue
            m, m2 = C.src[u], C.tgt[u]
            ins = [C.hom(T[i], m) for i in range(p)]
            outs2 = [C.hom(m2, T[p + j]) for j in range(q)]
            for a in itertools.product(*ins):
                for b2 in itertools.product(*outs2):
                    left = (m, a, tuple(C.compose(b2[j], u) for j in range(q)))
                    right = (m2, tuple(C.compose(u, a[i]) for i in range(p)), b2)
                    pairs.append((left, right))
        quots[T] = setops.quotient_by_pairs(ambient, pairs, cap)
        gens[T] = raw
        fibers[T] = quots[T].carrier

    action = {}
    for us in P.morphisms:
        Ts, Tt = P.src[us], P.tgt[us]
        phis, psis = us[:p], us[p:]

        def apply(label, Ts=Ts, Tt=Tt, phis=phis, psis=psis):
            m, a, b = quots[Ts].section(label)
            moved = (m,
                     tuple(C.compose(a[i], phis[i]) for i in range(p)),
                     tuple(C.compose(psis[j], b[j]) for j in range(q)))
            return quots[Tt].projection(moved)

        action[us] = fn_from_map(fibers[Ts], fibers[Tt], apply)
    F = SetFunctorPQ(C, sig, fibers, action, name=f"span({p},{q})")
    return SpanWeight(F, quots, gens)


@dataclass
class CospanWeight:
    """Presheaf of midpoint cospans (m; b_j: B_j -> m; a_i: m -> A_i)."""

    base: FinCat
    sig: object
    diagram: SetDiagram  # over the opposite of the power category
    base_power: FinCat
    quots: dict
    generators: dict

    def fiber(self, T) -> FinSet:
        return self.diagram.fiber(tuple(T))

    def class_of(self, T, gen):
        return self.quots[tuple(T)].projection(gen)

    def rep(self, T, label):
        return self.quots[tuple(T)].section(label)

    def id_class(self, A):
        sig = as_sig(self.sig)
        T = (A,) * sig.arity
        e = self.base.ident[A]
        return self.class_of(T, (A, (e,) * sig.q, (e,) * sig.p))


def cospan_weight(C: FinCat, sig, cap: int | None = None) -> CospanWeight:
    """Dual of span_weight: spans out of the covariant block into the other.

    Generators at (A..; B..) are (m; b_j: B_j -> m; a_i: m -> A_i) with the
    relation (m; b; (a'_i u)_i) ~ (m'; (u b_j)_j; a') for u: m -> m'; the
    action pulls back along morphism tuples, making this a presheaf (stored
    as a covariant diagram on the opposite power category).
    """
    sig = as_sig(sig)
    p, q = sig.p, sig.q
    P = power_pq(C, sig)
    quots, gens, fibers = {}, {}, {}
    for T in P.objects:
        raw = []
        for m in C.objects:
            ins = [C.hom(T[p + j], m) for j in range(q)]
            outs = [C.hom(m, T[i]) for i in range(p)]
            for b in itertools.product(*ins):
                for a in itertools.product(*outs):
                    raw.append((m, b, a))
        check_cap("cospan_weight generators", len(raw), cap)
        ambient = finset(raw)
        pairs = []
        for u in C.morphisms:
            if C.is_identity(u):
                continue
            m, m2 = C.src[u], C.tgt[u]
            ins = [C.hom(T[p + j], m) for j in range(q)]
            outs2 = [C.hom(m2, T[i]) for i in range(p)]
            for b in itertools.product(*ins):
                for a2 in itertools.product(*outs2):
                    left = (m, b, tuple(C.compose(a2[i], u) for i in range(p)))
                    right = (m2, tuple(C.compose(u, b[j]) for j in range(q)), a2)
                    pairs.append((left, right))
        quots[T] = setops.quotient_by_pairs(ambient, pairs, cap)
        gens[T] = raw
        fibers[T] = quots[T].carrier

    Pop = opposite(P)
    action = {}
    for us in P.morphisms:
        Ts, Tt = P.src[us], P.tgt[us]
        phis, psis = us[:p], us[p:]

        def apply(label, Ts=Ts, Tt=Tt, phis=phis, psis=psis):
            m, b, a = quots[Tt].section(label)
            moved = (m,
                     tuple(C.compose(b[j], psis[j]) for j in range(q)),
                     tuple(C.compose(phis[i], a[i]) for i in range(p)))
            return quots[Ts].projection(moved)

        action[us] = fn_from_map(fibers[Tt], fibers[Ts], apply)
    diagram = SetDiagram(Pop, fibers, action, name=f"cospan({p},{q})")
    return CospanWeight(C, sig, diagram, P, quots, gens)


def hom_pi_cowedge(C: FinCat, sig, name: str | None = None) -> SetDiagram:
    """Presheaf of reversed grids (w_ji: B_j -> A_i), over the power category."""
    sig = as_sig(sig)
    p, q = sig.p, sig.q
    P = power_pq(C, sig)
    fibers = {}
    for T in P.objects:
        homs = [C.hom(T[p + j], T[i]) for j in range(q) for i in range(p)]
        fibers[T] = setops.product([finset(h) for h in homs])
    action = {}
    for us in P.morphisms:
        Ts, Tt = P.src[us], P.tgt[us]
        phis, psis = us[:p], us[p:]

        def apply(grid, phis=phis, psis=psis):
            return tuple(C.compose(phis[i], C.compose(grid[j * p + i], psis[j]))
                         for j in range(q) for i in range(p))

        action[us] = fn_from_map(fibers[Tt], fibers[Ts], apply)
    return SetDiagram(opposite(P), fibers, action, name or f"cogrid({p},{q})")


# ---------------------------------------------------------------------------
# element categories
# ---------------------------------------------------------------------------

@dataclass
class ElementsCat:
    """Total category of elements with its projection to the index."""

    total: FinCat
    projection: Functor
    diagram: SetDiagram
    contravariant: bool = False


def category_of_elements(diagram: SetDiagram, contravariant: bool = False,
                         project_to: FinCat | None = None,
                         cap: int | None = None) -> ElementsCat:
    """Objects are (index object, element); morphisms follow the index.

    Covariantly, (u, x): (src u, x) -> (tgt u, u.x).  For a presheaf (given
    as a covariant diagram on the opposite index), (u, x): (src u, u.x) ->
    (tgt u, x), where src/tgt refer to the projection target.
    """
    K = diagram.cat
    if contravariant:
        base = project_to if project_to is not None else opposite(K)
        j_src, j_tgt = K.tgt, K.src  # K is the opposite of the true index
    else:
        base = project_to if project_to is not None else K
        j_src, j_tgt = K.src, K.tgt
    objects = [(A, x) for A in base.objects for x in diagram.fiber(A)]
    check_cap("elements objects", len(objects), cap)
    morphisms, src, tgt = [], {}, {}
    for u in base.morphisms:
        if contravariant:
            for x in diagram.fiber(j_tgt[u]):
                m = (u, x)
                morphisms.append(m)
                src[m] = (j_src[u], diagram.act(u)(x))
                tgt[m] = (j_tgt[u], x)
        else:
            for x in diagram.fiber(j_src[u]):
                m = (u, x)
                morphisms.append(m)
                src[m] = (j_src[u], x)
                tgt[m] = (j_tgt[u], diagram.act(u)(x))
    check_cap("elements morphisms", len(morphisms), cap)
    ident = {}
    for A, x in objects:
        ident[(A, x)] = (base.ident[A], x)

    if contravariant:
        def compose(m2, m1):
            return (base.compose(m2[0], m1[0]), m2[1])
    else:
        def compose(m2, m1):
            return (base.compose(m2[0], m1[0]), m1[1])

    total = FinCat(f"el({diagram.name})", objects, morphisms, src, tgt, ident, compose)
    proj = Functor(total, base, {o: o[0] for o in objects},
                   {m: m[0] for m in morphisms}, name=f"pi({diagram.name})")
    return ElementsCat(total, proj, diagram, contravariant)


def tw_pq(C: FinCat, sig, cap: int | None = None) -> ElementsCat:
    """The higher twisted-arrow category: elements of the grid functor."""
    return category_of_elements(hom_pi(C, sig).as_diagram(), cap=cap)


def classical_tw(C: FinCat) -> FinCat:
    """The ordinary twisted-arrow category, built directly.

    Objects are morphisms f; a morphism f -> f' is (phi, psi, f) with
    f' = psi . f . phi.  Kept separate from tw_pq so the two constructions
    can be compared as independent artifacts.
    """
    objects = list(C.morphisms)
    morphisms, src, tgt, ident = [], {}, {}, {}
    for f in C.morphisms:
        A, B = C.src[f], C.tgt[f]
        for phi in C.morphisms:
            if C.tgt[phi] != A:
                continue
            for psi in C.morphisms:
                if C.src[psi] != B:
                    continue
                m = (phi, psi, f)
                morphisms.append(m)
                src[m] = f
                tgt[m] = C.compose(psi, C.compose(f, phi))
        ident[f] = (C.ident[A], C.ident[B], f)

    def compose(m2, m1):
        phi1, psi1, f = m1
        phi2, psi2, _ = m2
        return (C.compose(phi1, phi2), C.compose(psi2, psi1), f)

    return FinCat(f"tw({C.name})", objects, morphisms, src, tgt, ident, compose)


def tw_iso_functors(C: FinCat) -> tuple[Functor, Functor]:
    """The mutually inverse functors between classical_tw and tw_pq(1,1)."""
    T1 = classical_tw(C)
    E = tw_pq(C, (1, 1))
    T2 = E.total
    fwd = Functor(T1, T2,
                  {f: ((C.src[f], C.tgt[f]), (f,)) for f in T1.objects},
                  {(phi, psi, f): (((phi, psi)), (f,)) for (phi, psi, f) in T1.morphisms},
                  name="tw_fwd")
    bwd = Functor(T2, T1,
                  {o: o[1][0] for o in T2.objects},
                  {m: (m[0][0], m[0][1], m[1][0]) for m in T2.morphisms},
                  name="tw_bwd")
    return fwd, bwd


def sigma_pq(C: FinCat, sig) -> Functor:
    """Tw(C) -> C^(p,q), repeating source and target across the slots."""
    sig = as_sig(sig)
    E = tw_pq(C, (1, 1))
    P = power_pq(C, sig)
    obj_map = {}
    for (T, grid) in E.total.objects:
        A, B = T
        obj_map[(T, grid)] = (A,) * sig.p + (B,) * sig.q
    mor_map = {}
    for (us, grid) in E.total.morphisms:
        phi, psi = us
        mor_map[(us, grid)] = (phi,) * sig.p + (psi,) * sig.q
    return Functor(E.total, P, obj_map, mor_map, name=f"sigma({sig.p},{sig.q})")


def grid_collapse(C: FinCat, sig, cap: int | None = None):
    """The span-to-grid comparison: compose each span into its grid.

    Returns (ok, per-fiber detail): ok means the collapse is well defined
    and bijective on every fiber, which holds when some variance block has
    exactly one slot but can fail otherwise.
    """
    sig = as_sig(sig)
    p, q = sig.p, sig.q
    W = span_weight(C, sig, cap)
    H = hom_pi(C, sig)
    P = power_pq(C, sig)
    detail = {}
    ok = True
    for T in P.objects:
        images = {}
        well = True
        for gen in W.generators[T]:
            m, a, b = gen
            grid = tuple(C.compose(b[j], a[i]) for i in range(p) for j in range(q))
            lab = W.class_of(T, gen)
            if lab in images and images[lab] != grid:
                well = False
            images[lab] = grid
        bij = well and len(set(images.values())) == len(images) and \
            len(images) == len(H.fiber(T))
        detail[T] = (well, bij)
        ok = ok and bij
    return ok, detail


# ---------------------------------------------------------------------------
# the square category over a fixed anchor pair
# ---------------------------------------------------------------------------

def square_functor(C: FinCat, A, B, name: str | None = None) -> SetFunctorPQ:
    """(X, Y) |-> C(A,B) x C(A,Y) x C(X,B) x C(X,Y), signature (1,1)."""
    def fiber(T):
        X, Y = T
        cells = [finset(C.hom(A, B)), finset(C.hom(A, Y)),
                 finset(C.hom(X, B)), finset(C.hom(X, Y))]
        return setops.product(cells)

    def act(us):
        xi1, xi2 = us

        def apply(sq):
            gamma, psi, phi, f = sq
            return (gamma, C.compose(xi2, psi), C.compose(phi, xi1),
                    C.compose(xi2, C.compose(f, xi1)))

        return apply

    return functor_from_rule(C, (1, 1), fiber, act, name or f"square({A},{B})")


def tw_j(C: FinCat, A, B, cap: int | None = None) -> ElementsCat:
    """Elements of the square functor anchored at (A, B)."""
    return category_of_elements(square_functor(C, A, B).as_diagram(), cap=cap)


def tw_j_embedding(C: FinCat, A, B) -> Functor:
    """Embed the twisted-arrow category into the anchored square category.

    Sends f: X -> Y to the square whose legs are the unique morphisms
    A -> B, A -> Y, X -> B; requires all three hom-sets to be singletons
    (e.g. A the bottom and B the top of a bounded poset).
    """
    gammas = C.hom(A, B)
    if len(gammas) != 1:
        raise AnchorNotUnique(f"need exactly one morphism {A!r} -> {B!r}")
    gamma = gammas[0]
    for Y in C.objects:
        if len(C.hom(A, Y)) != 1 or len(C.hom(Y, B)) != 1:
            raise AnchorNotUnique(
                f"need singleton hom-sets from {A!r} and into {B!r}; "
                f"object {Y!r} breaks this")
    T1 = classical_tw(C)
    E = tw_j(C, A, B)

    def square_of(f):
        X, Y = C.src[f], C.tgt[f]
        return ((X, Y), (gamma, C.hom(A, Y)[0], C.hom(X, B)[0], f))

    obj_map = {f: square_of(f) for f in T1.objects}
    mor_map = {}
    for (phi, psi, f) in T1.morphisms:
        mor_map[(phi, psi, f)] = ((phi, psi), square_of(f)[1])
    return Functor(T1, E.total, obj_map, mor_map, name=f"tw_into_square({A},{B})")
