"""Dinatural transformations, wedges, and cowedges.

A dinatural transformation between F of signature (p, q) and G of signature
(q, p) on the same base has one component per base object, from the diagonal
fiber of F to the diagonal fiber of G, subject to a hexagon for every base
morphism u: A -> B:

    G(id_A; u..u) . theta_A . F(u..u; id_A) = G(u..u; id_B) . theta_B . F(id_B; u..u)

both sides read as maps F(B..B; A..A) -> G(A..A; B..B).  Wedges and cowedges
are the constant-source and constant-target cases, stated over one functor.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import setops
from .errors import ShapeMismatch
from .fincat import SetFunctorPQ
from .setops import FinFn, FinSet, hom_set, identity_fn


def _pair_guard(F: SetFunctorPQ, G: SetFunctorPQ) -> None:
    if F.base is not G.base:
        raise ShapeMismatch("dinaturality needs a shared base category")
    if (G.sig.p, G.sig.q) != (F.sig.q, F.sig.p):
        raise ShapeMismatch(
            f"signature ({F.sig.p},{F.sig.q}) pairs with ({F.sig.q},{F.sig.p}), "
            f"got ({G.sig.p},{G.sig.q})")


@dataclass
class DinatPQ:
    """Components theta_A: F(A..A;A..A) -> G(A..A;A..A), one per object."""

    src: SetFunctorPQ
    tgt: SetFunctorPQ
    components: dict

    def component(self, A) -> FinFn:
        return self.components[A]

    def label(self) -> tuple:
        return tuple(self.components[A].images for A in self.src.base.objects)


def mixed_keys(F: SetFunctorPQ, u):
    """Source/target data of the two hexagon legs of F for u: A -> B.

    Returns (contra_leg, cov_leg): contra_leg = F(u..u; id_A) from the mixed
    fiber F(B..B; A..A) to the diagonal at A; cov_leg = F(id_B; u..u) from
    the mixed fiber to the diagonal at B.  Degenerate slots just vanish.
    """
    C = F.base
    A, B = C.src[u], C.tgt[u]
    p, q = F.sig.p, F.sig.q
    contra_leg = F.act((u,) * p + (C.ident[A],) * q)
    cov_leg = F.act((C.ident[B],) * p + (u,) * q)
    return contra_leg, cov_leg


def check_dinatural(theta: DinatPQ) -> list:
    """Hexagon witnesses (u, x) that fail; empty means dinatural."""
    F, G = theta.src, theta.tgt
    _pair_guard(F, G)
    C = F.base
    bad = []
    for u in C.morphisms:
        if C.is_identity(u):
            continue
        A, B = C.src[u], C.tgt[u]
        f_contra, f_cov = mixed_keys(F, u)
        # for G the variance blocks are swapped, so the legs point outward
        g_cov = G.act((C.ident[A],) * G.sig.p + (u,) * G.sig.q)
        g_contra = G.act((u,) * G.sig.p + (C.ident[B],) * G.sig.q)
        tA, tB = theta.components[A], theta.components[B]
        for x in f_contra.src:
            if g_cov(tA(f_contra(x))) != g_contra(tB(f_cov(x))):
                bad.append((u, x))
    return bad


def identity_dinat(F: SetFunctorPQ) -> DinatPQ:
    """The identity, which only typechecks when p = q."""
    if F.sig.p != F.sig.q:
        raise ShapeMismatch("identity dinatural needs p = q")
    comps = {A: identity_fn(F.diagonal_fiber(A)) for A in F.base.objects}
    return DinatPQ(F, F, comps)


def enumerate_dinat(F: SetFunctorPQ, G: SetFunctorPQ, cap: int | None = None) -> list[DinatPQ]:
    """All dinatural transformations F => G, by family search."""
    _pair_guard(F, G)
    C = F.base
    objs = list(C.objects)
    domains = {A: list(hom_set(F.diagonal_fiber(A), G.diagonal_fiber(A), cap))
               for A in objs}
    constraints = []
    for u in C.morphisms:
        if C.is_identity(u):
            continue
        A, B = C.src[u], C.tgt[u]
        f_contra, f_cov = mixed_keys(F, u)
        g_cov = G.act((C.ident[A],) * G.sig.p + (u,) * G.sig.q)
        g_contra = G.act((u,) * G.sig.p + (C.ident[B],) * G.sig.q)
        FA, FB = F.diagonal_fiber(A), F.diagonal_fiber(B)

        def ok(ta, tb, f_contra=f_contra, f_cov=f_cov, g_cov=g_cov,
               g_contra=g_contra, FA=FA, FB=FB):
            return all(g_cov(ta[FA.position(f_contra(x))]) ==
                       g_contra(tb[FB.position(f_cov(x))])
                       for x in f_contra.src)

        constraints.append((A, B, ok))
    sols = setops.search_families(objs, domains, constraints, cap)
    out = []
    for s in sols:
        comps = {A: FinFn(F.diagonal_fiber(A), G.diagonal_fiber(A), s[A]) for A in objs}
        out.append(DinatPQ(F, G, comps))
    return out


@dataclass
class Wedge:
    """Legs apex -> D(A..A;A..A) commuting with both hexagon legs of D."""

    apex: FinSet
    functor: SetFunctorPQ
    legs: dict

    def leg(self, A) -> FinFn:
        return self.legs[A]

    def label(self) -> tuple:
        return tuple(self.legs[A].images for A in self.functor.base.objects)


@dataclass
class Cowedge:
    """Legs D(A..A;A..A) -> apex, dual to Wedge."""

    functor: SetFunctorPQ
    apex: FinSet
    legs: dict

    def leg(self, A) -> FinFn:
        return self.legs[A]


def check_wedge(w: Wedge) -> list:
    """Witnesses (u, s) where the wedge square fails."""
    D = w.functor
    C = D.base
    bad = []
    for u in C.morphisms:
        if C.is_identity(u):
            continue
        A, B = C.src[u], C.tgt[u]
        to_mixed_from_A = D.act((C.ident[A],) * D.sig.p + (u,) * D.sig.q)
        to_mixed_from_B = D.act((u,) * D.sig.p + (C.ident[B],) * D.sig.q)
        for s in w.apex:
            if to_mixed_from_A(w.legs[A](s)) != to_mixed_from_B(w.legs[B](s)):
                bad.append((u, s))
    return bad


def check_cowedge(w: Cowedge) -> list:
    D = w.functor
    C = D.base
    bad = []
    for u in C.morphisms:
        if C.is_identity(u):
            continue
        A, B = C.src[u], C.tgt[u]
        from_mixed_to_A = D.act((u,) * D.sig.p + (C.ident[A],) * D.sig.q)
        from_mixed_to_B = D.act((C.ident[B],) * D.sig.p + (u,) * D.sig.q)
        for x in from_mixed_to_A.src:
            if w.legs[A](from_mixed_to_A(x)) != w.legs[B](from_mixed_to_B(x)):
                bad.append((u, x))
    return bad


def enumerate_wedges(apex: FinSet, D: SetFunctorPQ, cap: int | None = None) -> list[Wedge]:
    """All wedges from a fixed apex into D."""
    C = D.base
    objs = list(C.objects)
    domains = {A: list(hom_set(apex, D.diagonal_fiber(A), cap)) for A in objs}
    constraints = []
    for u in C.morphisms:
        if C.is_identity(u):
            continue
        A, B = C.src[u], C.tgt[u]
        fA = D.act((C.ident[A],) * D.sig.p + (u,) * D.sig.q)
        fB = D.act((u,) * D.sig.p + (C.ident[B],) * D.sig.q)

        def ok(la, lb, fA=fA, fB=fB, apex=apex):
            return all(fA(la[k]) == fB(lb[k]) for k in range(len(apex)))

        constraints.append((A, B, ok))
    sols = setops.search_families(objs, domains, constraints, cap)
    out = []
    for s in sols:
        legs = {A: FinFn(apex, D.diagonal_fiber(A), s[A]) for A in objs}
        out.append(Wedge(apex, D, legs))
    return out


def enumerate_cowedges(D: SetFunctorPQ, apex: FinSet, cap: int | None = None) -> list[Cowedge]:
    """All cowedges from D into a fixed apex."""
    C = D.base
    objs = list(C.objects)
    domains = {A: list(hom_set(D.diagonal_fiber(A), apex, cap)) for A in objs}
    constraints = []
    for u in C.morphisms:
        if C.is_identity(u):
            continue
        A, B = C.src[u], C.tgt[u]
        gA = D.act((u,) * D.sig.p + (C.ident[A],) * D.sig.q)
        gB = D.act((C.ident[B],) * D.sig.p + (u,) * D.sig.q)
        DA = D.diagonal_fiber(A)
        DB = D.diagonal_fiber(B)

        def ok(la, lb, gA=gA, gB=gB, DA=DA, DB=DB):
            return all(la[DA.position(gA(x))] == lb[DB.position(gB(x))]
                       for x in gA.src)

        constraints.append((A, B, ok))
    sols = setops.search_families(objs, domains, constraints, cap)
    out = []
    for s in sols:
        legs = {A: FinFn(D.diagonal_fiber(A), apex, s[A]) for A in objs}
        out.append(Cowedge(D, apex, legs))
    return out
