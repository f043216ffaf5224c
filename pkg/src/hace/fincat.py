"""Finite categories, variance signatures, and Set-valued functors.

A mixed-variance functor with signature (p, q) takes p contravariant and q
covariant arguments; it is stored as a full table over the (p+q)-fold power
category (contravariant slots first).  Composition in derived categories
(opposites, products, powers, element categories) is rule-based and memoized,
never materialized as a table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import setops
from .errors import (
    CyclicGraph,
    DanglingId,
    IllTypedComposite,
    InterchangeFailure,
    MissingIdentity,
    NonAssociative,
    NonFunctorialSlot,
    NotAMonoid,
    NotAPoset,
    ShapeMismatch,
)
from .setops import FinFn, FinSet, check_cap, finset, fn_from_map, identity_fn

ObjId = object
MorId = object


@dataclass(frozen=True)
class VarianceSig:
    """p contravariant slots followed by q covariant slots."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ShapeMismatch("negative arity")

    @property
    def arity(self) -> int:
        return self.p + self.q

    def flip(self) -> "VarianceSig":
        return VarianceSig(self.q, self.p)


def as_sig(sig) -> VarianceSig:
    if isinstance(sig, VarianceSig):
        return sig
    p, q = sig
    return VarianceSig(p, q)


class FinCat:
    """A finite category with identity-carrying composition.

    `compose` may be a mapping {(g, f): g_after_f} or a rule; rule results
    are memoized.  Object and morphism order is the declaration order and is
    the canonical order used everywhere downstream.
    """

    def __init__(self, name: str, objects: Sequence[ObjId], morphisms: Sequence[MorId],
                 src: Mapping[MorId, ObjId], tgt: Mapping[MorId, ObjId],
                 ident: Mapping[ObjId, MorId],
                 compose: Mapping[tuple[MorId, MorId], MorId] | Callable[[MorId, MorId], MorId]):
        self.name = name
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        if len(set(self.objects)) != len(self.objects):
            raise ShapeMismatch(f"{name}: duplicate object ids")
        if len(set(self.morphisms)) != len(self.morphisms):
            raise ShapeMismatch(f"{name}: duplicate morphism ids")
        self.src = dict(src)
        self.tgt = dict(tgt)
        self.ident = dict(ident)
        self._identities = set(self.ident.values())
        self._compose = compose
        self._memo: dict[tuple[MorId, MorId], MorId] = {}
        self._hom: dict[tuple[ObjId, ObjId], tuple[MorId, ...]] | None = None
        self._obj_index = {A: i for i, A in enumerate(self.objects)}
        self._mor_index = {u: i for i, u in enumerate(self.morphisms)}
        for A in self.objects:
            if A not in self.ident:
                raise MissingIdentity(f"{name}: no identity for object {A!r}")

    def __repr__(self):
        return f"FinCat({self.name}: {len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    def is_identity(self, u: MorId) -> bool:
        return u in self._identities

    def compose(self, g: MorId, f: MorId) -> MorId:
        """The composite g after f."""
        if self.tgt[f] != self.src[g]:
            raise IllTypedComposite(f"{self.name}: {g!r} after {f!r} not composable")
        if self.is_identity(g):
            return f
        if self.is_identity(f):
            return g
        key = (g, f)
        if key in self._memo:
            return self._memo[key]
        if isinstance(self._compose, Mapping):
            try:
                h = self._compose[key]
            except KeyError:
                raise IllTypedComposite(f"{self.name}: missing composite {g!r} after {f!r}")
        else:
            h = self._compose(g, f)
        self._memo[key] = h
        return h

    def hom(self, a: ObjId, b: ObjId) -> tuple[MorId, ...]:
        if self._hom is None:
            table: dict[tuple[ObjId, ObjId], list[MorId]] = {}
            for u in self.morphisms:
                table.setdefault((self.src[u], self.tgt[u]), []).append(u)
            self._hom = {k: tuple(v) for k, v in table.items()}
        return self._hom.get((a, b), ())

    def obj_position(self, A: ObjId) -> int:
        return self._obj_index[A]

    def mor_position(self, u: MorId) -> int:
        return self._mor_index[u]


def validate_category(C: FinCat, assoc: bool = True, cap: int | None = None) -> None:
    """Exhaustively check identity typing, unit laws, closure, associativity."""
    for A, e in C.ident.items():
        if C.src[e] != A or C.tgt[e] != A:
            raise MissingIdentity(f"{C.name}: identity of {A!r} is ill-typed")
    for u in C.morphisms:
        if u not in C.src or u not in C.tgt:
            raise DanglingId(f"{C.name}: morphism {u!r} lacks endpoints")
        if C.compose(u, C.ident[C.src[u]]) != u or C.compose(C.ident[C.tgt[u]], u) != u:
            raise MissingIdentity(f"{C.name}: unit law fails at {u!r}")
    pairs = [(g, f) for f in C.morphisms for g in C.morphisms if C.tgt[f] == C.src[g]]
    check_cap("validate_category pairs", len(pairs), cap)
    for g, f in pairs:
        h = C.compose(g, f)
        if C.src[h] != C.src[f] or C.tgt[h] != C.tgt[g]:
            raise IllTypedComposite(f"{C.name}: composite {g!r} after {f!r} ill-typed")
    if not assoc:
        return
    triples = 0
    for g, f in pairs:
        for h in C.morphisms:
            if C.tgt[g] != C.src[h]:
                continue
            triples += 1
            check_cap("validate_category triples", triples, cap)
            if C.compose(h, C.compose(g, f)) != C.compose(C.compose(h, g), f):
                raise NonAssociative(f"{C.name}: ({h!r}, {g!r}, {f!r})")


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def category_from_table(name: str, objects: Sequence[ObjId], morphisms: Sequence[MorId],
                        src: Mapping, tgt: Mapping, ident: Mapping,
                        compose: Mapping, validate: bool = True, assoc: bool = True) -> FinCat:
    for u in morphisms:
        if src.get(u) not in objects or tgt.get(u) not in objects:
            raise DanglingId(f"{name}: morphism {u!r} has undeclared endpoints")
    C = FinCat(name, objects, morphisms, src, tgt, ident, dict(compose))
    if validate:
        validate_category(C, assoc=assoc)
    return C


def poset_category(name: str, objects: Sequence[ObjId],
                   relation: Iterable[tuple[ObjId, ObjId]]) -> FinCat:
    """The category of a poset, from any generating relation.

    Takes the reflexive-transitive closure; a nontrivial cycle means the
    input was not antisymmetric.
    """
    objs = tuple(objects)
    le = {(a, a) for a in objs}
    le.update((a, b) for a, b in relation)
    for a, b in le:
        if a not in objs or b not in objs:
            raise DanglingId(f"{name}: relation mentions undeclared {a!r} or {b!r}")
    changed = True
    while changed:
        changed = False
        for a, b in list(le):
            for c in objs:
                if (b, c) in le and (a, c) not in le:
                    le.add((a, c))
                    changed = True
    for a, b in le:
        if a != b and (b, a) in le:
            raise NotAPoset(f"{name}: {a!r} <= {b!r} <= {a!r}")
    morphisms, src, tgt, ident = [], {}, {}, {}
    for a in objs:
        for b in objs:
            if (a, b) in le:
                u = f"le_{a}_{b}"
                morphisms.append(u)
                src[u], tgt[u] = a, b
                if a == b:
                    ident[a] = u
    compose = {}
    for g in morphisms:
        for f in morphisms:
            if tgt[f] == src[g]:
                compose[(g, f)] = f"le_{src[f]}_{tgt[g]}"
    return FinCat(name, objs, morphisms, src, tgt, ident, compose)


def monoid_category(name: str, elements: Sequence[MorId], unit: MorId,
                    mul: Mapping[tuple[MorId, MorId], MorId]) -> FinCat:
    """One-object category whose endomorphisms form the given monoid.

    compose(g, f) is mul[(g, f)], a left action reading "g after f".
    """
    elts = tuple(elements)
    if unit not in elts:
        raise NotAMonoid(f"{name}: unit {unit!r} not among elements")
    for g in elts:
        for f in elts:
            if (g, f) not in mul:
                raise NotAMonoid(f"{name}: product of {g!r} and {f!r} undeclared")
            if mul[(g, f)] not in elts:
                raise DanglingId(f"{name}: product {mul[(g, f)]!r} undeclared")
    for f in elts:
        if mul[(unit, f)] != f or mul[(f, unit)] != f:
            raise NotAMonoid(f"{name}: unit law fails at {f!r}")
    for a in elts:
        for b in elts:
            for c in elts:
                if mul[(mul[(a, b)], c)] != mul[(a, mul[(b, c)])]:
                    raise NotAMonoid(f"{name}: associativity fails at ({a!r},{b!r},{c!r})")
    obj = "*"
    return FinCat(name, (obj,), elts, {f: obj for f in elts}, {f: obj for f in elts},
                  {obj: unit}, dict(mul))


def free_category(name: str, objects: Sequence[ObjId],
                  edges: Sequence[tuple[MorId, ObjId, ObjId]],
                  cap: int | None = None) -> FinCat:
    """Free category on a finite acyclic multigraph; morphisms are paths.

    A path is labeled by its edge ids joined with '>' in traversal order;
    identities are labeled id_<object>.
    """
    objs = tuple(objects)
    for eid, a, b in edges:
        if a not in objs or b not in objs:
            raise DanglingId(f"{name}: edge {eid!r} has undeclared endpoints")
    out_edges: dict[ObjId, list[tuple[MorId, ObjId]]] = {a: [] for a in objs}
    for eid, a, b in edges:
        out_edges[a].append((eid, b))
    state: dict[ObjId, int] = {}

    def visit(v):
        state[v] = 1
        for _, w in out_edges[v]:
            if state.get(w) == 1:
                raise CyclicGraph(f"{name}: directed cycle through {w!r}")
            if w not in state:
                visit(w)
        state[v] = 2

    for v in objs:
        if v not in state:
            visit(v)
    morphisms, src, tgt, ident = [], {}, {}, {}
    for a in objs:
        u = f"id_{a}"
        morphisms.append(u)
        src[u], tgt[u], ident[a] = a, a, u
    frontier: list[tuple[tuple, ObjId, ObjId]] = [((), a, a) for a in objs]
    while frontier:
        grown = []
        for path, a, b in frontier:
            for eid, c in out_edges[b]:
                newp = path + (eid,)
                u = ">".join(newp)
                morphisms.append(u)
                check_cap("free_category paths", len(morphisms), cap)
                src[u], tgt[u] = a, c
                grown.append((newp, a, c))
        frontier = grown

    def compose(g, f):
        return ">".join(f.split(">") + g.split(">"))

    return FinCat(name, objs, morphisms, src, tgt, ident, compose)


def point_category(name: str = "pt") -> FinCat:
    return FinCat(name, ("*",), ("id_*",), {"id_*": "*"}, {"id_*": "*"}, {"*": "id_*"},
                  lambda g, f: "id_*")


def walking_arrow(name: str = "arrow") -> FinCat:
    return poset_category(name, ("0", "1"), [("0", "1")])


def opposite(C: FinCat) -> FinCat:
    """Same objects and morphism ids, reversed direction."""
    return FinCat(C.name + "_op", C.objects, C.morphisms, C.tgt, C.src, C.ident,
                  lambda g, f: C.compose(f, g))


def product_category(A: FinCat, B: FinCat, name: str | None = None,
                     cap: int | None = None) -> FinCat:
    check_cap("product_category", len(A.morphisms) * len(B.morphisms), cap)
    objects = tuple(itertools.product(A.objects, B.objects))
    morphisms = tuple(itertools.product(A.morphisms, B.morphisms))
    src = {(f, g): (A.src[f], B.src[g]) for f, g in morphisms}
    tgt = {(f, g): (A.tgt[f], B.tgt[g]) for f, g in morphisms}
    ident = {(a, b): (A.ident[a], B.ident[b]) for a, b in objects}
    return FinCat(name or f"{A.name}x{B.name}", objects, morphisms, src, tgt, ident,
                  lambda gh, fk: (A.compose(gh[0], fk[0]), B.compose(gh[1], fk[1])))


def power_pq(C: FinCat, sig) -> FinCat:
    """The (p+q)-fold power of C, first p factors reversed.

    Objects and morphisms are flat tuples of C-ids; composition is
    componentwise, with the order of the first p components flipped.
    """
    sig = as_sig(sig)
    cache = getattr(C, "_power_cache", None)
    if cache is None:
        cache = {}
        C._power_cache = cache
    if sig in cache:
        return cache[sig]
    n, p = sig.arity, sig.p
    check_cap("power category", len(C.morphisms) ** n if n else 1)
    objects = tuple(itertools.product(C.objects, repeat=n))
    morphisms = tuple(itertools.product(C.morphisms, repeat=n))

    def tup_src(us):
        return tuple(C.tgt[u] if k < p else C.src[u] for k, u in enumerate(us))

    def tup_tgt(us):
        return tuple(C.src[u] if k < p else C.tgt[u] for k, u in enumerate(us))

    src = {us: tup_src(us) for us in morphisms}
    tgt = {us: tup_tgt(us) for us in morphisms}
    ident = {T: tuple(C.ident[a] for a in T) for T in objects}

    def compose(gs, fs):
        return tuple(C.compose(fs[k], gs[k]) if k < p else C.compose(gs[k], fs[k])
                     for k in range(n))

    P = FinCat(f"{C.name}^({sig.p},{sig.q})", objects, morphisms, src, tgt, ident, compose)
    cache[sig] = P
    return P


def components_of(C: FinCat) -> list[tuple[ObjId, ...]]:
    """Connected components (morphisms read as undirected edges)."""
    uf = setops.UnionFind(len(C.objects))
    for u in C.morphisms:
        uf.union(C.obj_position(C.src[u]), C.obj_position(C.tgt[u]))
    groups: dict[int, list[ObjId]] = {}
    for i, A in enumerate(C.objects):
        groups.setdefault(uf.find(i), []).append(A)
    return [tuple(groups[r])
            for r in sorted(groups, key=lambda r: C.obj_position(groups[r][0]))]


# ---------------------------------------------------------------------------
# functors between categories
# ---------------------------------------------------------------------------

@dataclass
class Functor:
    """A functor presented by explicit object and morphism maps."""

    src_cat: FinCat
    tgt_cat: FinCat
    obj_map: dict
    mor_map: dict
    name: str = ""

    def on_obj(self, A):
        return self.obj_map[A]

    def on_mor(self, u):
        return self.mor_map[u]


def validate_functor(K: Functor, cap: int | None = None) -> None:
    C, D = K.src_cat, K.tgt_cat
    for A in C.objects:
        if K.on_mor(C.ident[A]) != D.ident[K.on_obj(A)]:
            raise NonFunctorialSlot(f"{K.name}: identity at {A!r} not preserved")
    for u in C.morphisms:
        v = K.on_mor(u)
        if D.src[v] != K.on_obj(C.src[u]) or D.tgt[v] != K.on_obj(C.tgt[u]):
            raise ShapeMismatch(f"{K.name}: image of {u!r} ill-typed")
    pairs = [(g, f) for f in C.morphisms for g in C.morphisms if C.tgt[f] == C.src[g]]
    check_cap("validate_functor pairs", len(pairs), cap)
    for g, f in pairs:
        if K.on_mor(C.compose(g, f)) != D.compose(K.on_mor(g), K.on_mor(f)):
            raise NonFunctorialSlot(f"{K.name}: composition fails at ({g!r}, {f!r})")


def is_isomorphism_functor(K: Functor) -> bool:
    return (len(set(K.obj_map.values())) == len(K.src_cat.objects) == len(K.tgt_cat.objects)
            and len(set(K.mor_map.values())) == len(K.src_cat.morphisms) == len(K.tgt_cat.morphisms))


def diagonal_functor(C: FinCat, sig) -> Functor:
    """C^op x C -> C^(p,q), repeating the two arguments across the slots."""
    sig = as_sig(sig)
    if sig.p < 1 or sig.q < 1:
        raise ShapeMismatch("diagonal functor needs at least one slot of each variance")
    src = power_pq(C, (1, 1))
    tgt = power_pq(C, sig)
    obj_map = {T: (T[0],) * sig.p + (T[1],) * sig.q for T in src.objects}
    mor_map = {us: (us[0],) * sig.p + (us[1],) * sig.q for us in src.morphisms}
    return Functor(src, tgt, obj_map, mor_map, name=f"diag_{sig.p}_{sig.q}")


# ---------------------------------------------------------------------------
# Set-valued diagrams
# ---------------------------------------------------------------------------

class SetDiagram:
    """A covariant Set-valued functor on a FinCat, dict- or rule-backed."""

    def __init__(self, cat: FinCat, fiber, act, name: str = ""):
        self.cat = cat
        self.name = name
        self._fiber = fiber
        self._act = act
        self._fiber_memo: dict = {}
        self._act_memo: dict = {}

    def fiber(self, A) -> FinSet:
        if A in self._fiber_memo:
            return self._fiber_memo[A]
        X = self._fiber[A] if isinstance(self._fiber, Mapping) else self._fiber(A)
        self._fiber_memo[A] = X
        return X

    def act(self, u) -> FinFn:
        if u in self._act_memo:
            return self._act_memo[u]
        f = self._act[u] if isinstance(self._act, Mapping) else self._act(u)
        self._act_memo[u] = f
        return f


def constant_diagram(cat: FinCat, S: FinSet, name: str = "const") -> SetDiagram:
    return SetDiagram(cat, lambda A: S, lambda u: identity_fn(S), name)


def pullback_diagram(diagram: SetDiagram, K: Functor, name: str = "") -> SetDiagram:
    """Precompose a diagram with a functor into its index category."""
    return SetDiagram(K.src_cat, lambda A: diagram.fiber(K.on_obj(A)),
                      lambda u: diagram.act(K.on_mor(u)), name or f"{diagram.name}o{K.name}")


def validate_diagram(D: SetDiagram, cap: int | None = None) -> None:
    C = D.cat
    for A in C.objects:
        f = D.act(C.ident[A])
        if f.src != D.fiber(A) or f.images != D.fiber(A).elements:
            raise NonFunctorialSlot(f"{D.name}: identity at {A!r} not sent to identity")
    for u in C.morphisms:
        f = D.act(u)
        if f.src != D.fiber(C.src[u]) or f.tgt != D.fiber(C.tgt[u]):
            raise ShapeMismatch(f"{D.name}: action of {u!r} ill-typed")
    pairs = [(g, f) for f in C.morphisms for g in C.morphisms if C.tgt[f] == C.src[g]]
    check_cap("validate_diagram pairs", len(pairs), cap)
    for g, f in pairs:
        left = D.act(C.compose(g, f))
        right = setops.compose_fn(D.act(g), D.act(f))
        if left.images != right.images:
            raise NonFunctorialSlot(f"{D.name}: composition fails at ({g!r}, {f!r})")


# ---------------------------------------------------------------------------
# mixed-variance Set-valued functors (full tables over the power category)
# ---------------------------------------------------------------------------

class SetFunctorPQ:
    """A Set-valued functor on C^(p,q), stored as a full table.

    fibers are keyed by object tuples of the power category, actions by
    morphism tuples.  For a morphism tuple the source fiber key lists targets
    in the contravariant slots and sources in the covariant slots.
    """

    def __init__(self, base: FinCat, sig, fibers: Mapping[tuple, FinSet],
                 action: Mapping[tuple, FinFn], name: str = "F"):
        self.base = base
        self.sig = as_sig(sig)
        self.name = name
        self._fibers = dict(fibers)
        self._action = dict(action)
        n = self.sig.arity
        if len(self._fibers) != len(base.objects) ** n:
            raise ShapeMismatch(f"{name}: fiber table incomplete")
        if len(self._action) != len(base.morphisms) ** n:
            raise ShapeMismatch(f"{name}: action table incomplete")

    def __repr__(self):
        return f"SetFunctorPQ({self.name}: sig ({self.sig.p},{self.sig.q}) on {self.base.name})"

    @property
    def power_cat(self) -> FinCat:
        return power_pq(self.base, self.sig)

    def fiber(self, key: tuple) -> FinSet:
        return self._fibers[tuple(key)]

    def act(self, key: tuple) -> FinFn:
        return self._action[tuple(key)]

    def diag_key(self, A) -> tuple:
        return (A,) * self.sig.arity

    def diagonal_fiber(self, A) -> FinSet:
        return self.fiber(self.diag_key(A))

    def as_diagram(self) -> SetDiagram:
        return SetDiagram(self.power_cat, self._fibers, self._action, self.name)


def functor_from_rule(base: FinCat, sig, fiber_rule: Callable[[tuple], FinSet],
                      act_rule: Callable[[tuple], Callable], name: str = "F",
                      cap: int | None = None) -> SetFunctorPQ:
    """Materialize a functor table from fiber and action rules.

    act_rule(mor_tuple) returns a callable on element labels; correctness of
    functoriality is the caller's burden (use functor_from_slots for data
    that needs checking).
    """
    sig = as_sig(sig)
    n = sig.arity
    check_cap("functor fiber table", len(base.objects) ** n if n else 1, cap)
    check_cap("functor action table", len(base.morphisms) ** n if n else 1, cap)
    P = power_pq(base, sig)
    fibers = {T: fiber_rule(T) for T in P.objects}
    action = {}
    for us in P.morphisms:
        fn = act_rule(us)
        action[us] = fn_from_map(fibers[P.src[us]], fibers[P.tgt[us]], fn)
    return SetFunctorPQ(base, sig, fibers, action, name)


def functor_from_slots(base: FinCat, sig, fibers: Mapping[tuple, FinSet],
                       slot_act: Callable[[int, MorId, tuple], Callable],
                       name: str = "F", cap: int | None = None) -> SetFunctorPQ:
    """Assemble a functor from per-slot actions, verifying they interlock.

    slot_act(k, u, T) gives the action of morphism u in slot k with the other
    slots held at the objects of T; T is the source fiber key (so T[k] is
    tgt(u) for contravariant k, src(u) otherwise).  Checks each slot is
    functorial and that distinct slots commute, then assembles full tuples.
    """
    sig = as_sig(sig)
    n, p = sig.arity, sig.p
    C = base
    P = power_pq(base, sig)

    def slot_fn(k: int, u: MorId, T: tuple) -> FinFn:
        T2 = list(T)
        T2[k] = C.src[u] if k < p else C.tgt[u]
        raw = slot_act(k, u, T)
        return fn_from_map(fibers[tuple(T)], fibers[tuple(T2)], raw)

    def anchored(k: int, u: MorId, rest: tuple) -> tuple:
        T = list(rest[:k]) + [C.tgt[u] if k < p else C.src[u]] + list(rest[k:])
        return tuple(T)

    other_objs = list(itertools.product(C.objects, repeat=n - 1)) if n else []
    for k in range(n):
        for rest in other_objs:
            for A in C.objects:
                e = C.ident[A]
                T = anchored(k, e, rest)
                f = slot_fn(k, e, T)
                if f.images != fibers[T].elements:
                    raise NonFunctorialSlot(f"{name}: slot {k} breaks identity at {A!r}")
            for f1 in C.morphisms:
                for f2 in C.morphisms:
                    if C.tgt[f1] != C.src[f2]:
                        continue
                    comp = C.compose(f2, f1)
                    if k < p:
                        first, second = f2, f1
                    else:
                        first, second = f1, f2
                    T0 = anchored(k, first, rest)
                    step1 = slot_fn(k, first, T0)
                    T1 = anchored(k, second, rest)
                    step2 = slot_fn(k, second, T1)
                    whole = slot_fn(k, comp, T0)
                    if setops.compose_fn(step2, step1).images != whole.images:
                        raise NonFunctorialSlot(
                            f"{name}: slot {k} breaks composition at ({f2!r},{f1!r})")
    if n >= 2:
        rest2 = list(itertools.product(C.objects, repeat=n - 2))
        for k in range(n):
            for l in range(k + 1, n):
                for u in C.morphisms:
                    for v in C.morphisms:
                        for rest in rest2:
                            T = list(rest[:k]) + [C.tgt[u] if k < p else C.src[u]]
                            T += list(rest[k:l - 1]) + [C.tgt[v] if l < p else C.src[v]]
                            T += list(rest[l - 1:])
                            T = tuple(T)
                            fu = slot_fn(k, u, T)
                            Tu = list(T)
                            Tu[k] = C.src[u] if k < p else C.tgt[u]
                            fv_after = slot_fn(l, v, tuple(Tu))
                            fv = slot_fn(l, v, T)
                            Tv = list(T)
                            Tv[l] = C.src[v] if l < p else C.tgt[v]
                            fu_after = slot_fn(k, u, tuple(Tv))
                            if setops.compose_fn(fv_after, fu).images != \
                               setops.compose_fn(fu_after, fv).images:
                                raise InterchangeFailure(
                                    f"{name}: slots {k},{l} disagree on ({u!r},{v!r})")

    def act_rule(us: tuple):
        def apply(x):
            T = list(P.src[us])
            for k in range(n):
                f = slot_fn(k, us[k], tuple(T))
                x = f(x)
                T[k] = C.src[us[k]] if k < p else C.tgt[us[k]]
            return x
        return apply

    return functor_from_rule(base, sig, lambda T: fibers[T], act_rule, name, cap)


def validate_functor_pq(F: SetFunctorPQ, cap: int | None = None) -> None:
    """Spot-check identities and single-slot composition of a built table."""
    P = F.power_cat
    for T in P.objects:
        f = F.act(P.ident[T])
        if f.images != F.fiber(T).elements:
            raise NonFunctorialSlot(f"{F.name}: identity at {T!r} not identity")
    C, n, p = F.base, F.sig.arity, F.sig.p
    pairs = [(g, f) for f in C.morphisms for g in C.morphisms if C.tgt[f] == C.src[g]]
    check_cap("validate_functor_pq", len(pairs) * n * len(C.objects) ** max(n - 1, 0), cap)
    for k in range(n):
        for g, f in pairs:
            comp = C.compose(g, f)
            for rest in itertools.product(C.objects, repeat=n - 1):
                def tup(u):
                    ids = [C.ident[a] for a in rest]
                    return tuple(ids[:k] + [u] + ids[k:])
                first, second = (g, f) if k < p else (f, g)
                one = F.act(tup(first))
                two = F.act(tup(second))
                if setops.compose_fn(two, one).images != F.act(tup(comp)).images:
                    raise NonFunctorialSlot(f"{F.name}: slot {k} at ({g!r},{f!r})")


def const_functor_pq(base: FinCat, sig, S: FinSet, name: str | None = None) -> SetFunctorPQ:
    sig = as_sig(sig)
    return functor_from_rule(base, sig, lambda T: S, lambda us: (lambda x: x),
                             name or f"const{len(S)}")


def point_functor(base: FinCat, sig) -> SetFunctorPQ:
    """The terminal functor: every fiber is the same one-point set."""
    return const_functor_pq(base, sig, setops.POINT, name="pt")


def hom_functor(C: FinCat, name: str = "hom") -> SetFunctorPQ:
    """C(-, -) with signature (1, 1); fibers are morphism-id sets."""
    def fiber(T):
        return finset(C.hom(T[0], T[1]))

    def act(us):
        u, v = us
        return lambda w: C.compose(v, C.compose(w, u))

    return functor_from_rule(C, (1, 1), fiber, act, name)


def representable(C: FinCat, A, name: str | None = None) -> SetFunctorPQ:
    """C(-, A) with signature (1, 0)."""
    return functor_from_rule(C, (1, 0), lambda T: finset(C.hom(T[0], A)),
                             lambda us: (lambda w: C.compose(w, us[0])),
                             name or f"hom(-,{A})")


def corepresentable(C: FinCat, B, name: str | None = None) -> SetFunctorPQ:
    """C(B, -) with signature (0, 1)."""
    return functor_from_rule(C, (0, 1), lambda T: finset(C.hom(B, T[0])),
                             lambda us: (lambda w: C.compose(us[0], w)),
                             name or f"hom({B},-)")


def restrict_diagonal(F: SetFunctorPQ, name: str | None = None) -> SetFunctorPQ:
    """Pull back along the diagonal, collapsing each variance block to one slot."""
    p1 = 1 if F.sig.p else 0
    q1 = 1 if F.sig.q else 0

    def expand(T):
        out = ()
        if p1:
            out += (T[0],) * F.sig.p
        if q1:
            out += (T[p1],) * F.sig.q
        return out

    return functor_from_rule(F.base, (p1, q1), lambda T: F.fiber(expand(T)),
                             lambda us: F.act(expand(us)),
                             name or f"diag*{F.name}")


def mute_extend(F: SetFunctorPQ, extra_p: int, extra_q: int,
                name: str | None = None) -> SetFunctorPQ:
    """Append slots the functor ignores (at the end of each variance block)."""
    p, q = F.sig.p, F.sig.q
    sig2 = VarianceSig(p + extra_p, q + extra_q)

    def core(T):
        return T[:p] + T[p + extra_p: p + extra_p + q]

    return functor_from_rule(F.base, sig2, lambda T: F.fiber(core(T)),
                             lambda us: F.act(core(us)),
                             name or f"{F.name}+mute")


def external_product(F: SetFunctorPQ, G: SetFunctorPQ, name: str | None = None,
                     cap: int | None = None) -> SetFunctorPQ:
    """Pair two functors over the product of their bases.

    Slots are F's contravariant, then G's contravariant, then F's covariant,
    then G's covariant; each slot of the product base is an object pair, and
    the slot blocks coming from F ignore the second component (and dually).
    """
    A, B = F.base, G.base
    base = product_category(A, B, cap=cap)
    p, q, r, s = F.sig.p, F.sig.q, G.sig.p, G.sig.q
    sig = VarianceSig(p + r, q + s)

    def split_obj(T):
        fkey = tuple(T[k][0] for k in range(p)) + tuple(T[p + r + k][0] for k in range(q))
        gkey = tuple(T[p + k][1] for k in range(r)) + tuple(T[p + r + q + k][1] for k in range(s))
        return fkey, gkey

    def fiber(T):
        fkey, gkey = split_obj(T)
        return setops.product([F.fiber(fkey), G.fiber(gkey)], cap)

    def act(us):
        fkey = tuple(us[k][0] for k in range(p)) + tuple(us[p + r + k][0] for k in range(q))
        gkey = tuple(us[p + k][1] for k in range(r)) + tuple(us[p + r + q + k][1] for k in range(s))
        ff, gg = F.act(fkey), G.act(gkey)
        return lambda xy: (ff(xy[0]), gg(xy[1]))

    return functor_from_rule(base, sig, fiber, act, name or f"{F.name}(x){G.name}", cap)


# ---------------------------------------------------------------------------
# natural transformations
# ---------------------------------------------------------------------------

@dataclass
class NatTransf:
    """A natural transformation between diagrams on one index category."""

    src: SetDiagram
    tgt: SetDiagram
    components: dict

    def component(self, A) -> FinFn:
        return self.components[A]

    def label(self) -> tuple:
        return tuple(self.components[A].images for A in self.src.cat.objects)


def check_natural(t: NatTransf) -> list:
    """Return witnesses (u, x) where the naturality square fails."""
    bad = []
    cat = t.src.cat
    for u in cat.morphisms:
        if cat.is_identity(u):
            continue
        a, b = cat.src[u], cat.tgt[u]
        fu, gu = t.src.act(u), t.tgt.act(u)
        ta, tb = t.components[a], t.components[b]
        for x in t.src.fiber(a):
            if tb(fu(x)) != gu(ta(x)):
                bad.append((u, x))
    return bad


def enumerate_nat(F: SetDiagram, G: SetDiagram, cap: int | None = None) -> list[NatTransf]:
    """All natural transformations F => G, by family search over components."""
    cat = F.cat
    objs = list(cat.objects)
    domains = {}
    for A in objs:
        FA, GA = F.fiber(A), G.fiber(A)
        domains[A] = list(setops.hom_set(FA, GA, cap))
    constraints = []
    for u in cat.morphisms:
        if cat.is_identity(u):
            continue
        a, b = cat.src[u], cat.tgt[u]
        fu, gu = F.act(u), G.act(u)
        Fa, Fb = F.fiber(a), F.fiber(b)

        def ok(ta, tb, fu=fu, gu=gu, Fa=Fa, Fb=Fb):
            return all(tb[Fb.position(fu(x))] == gu(ta[Fa.position(x)]) for x in Fa)

        constraints.append((a, b, ok))
    sols = setops.search_families(objs, domains, constraints, cap)
    out = []
    for s in sols:
        comps = {A: FinFn(F.fiber(A), G.fiber(A), s[A]) for A in objs}
        out.append(NatTransf(F, G, comps))
    return out
