"""Finite sets, functions, quotients, and the family-search core.

Everything downstream (ends, coends, transformation enumeration, weighted
co/limits) reduces to the handful of constructions in this module.  Elements
are hashable labels: strings, or tuples of labels.  All orders are canonical
(declaration order, then lexicographic tuple order) so that every computation
in the package is deterministic.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import ShapeMismatch, SizeCapExceeded

Label = Hashable

DEFAULT_CAP = 10**6


def active_cap(cap: int | None = None) -> int:
    """Resolve the size cap: explicit argument, HACE_CAP env var, or default."""
    if cap is not None:
        return cap
    env = os.environ.get("HACE_CAP")
    if env is not None:
        return int(env)
    return DEFAULT_CAP


def check_cap(operation: str, size: int, cap: int | None = None) -> None:
    limit = active_cap(cap)
    if size > limit:
        raise SizeCapExceeded(operation, size, limit)


def render_label(lab: Label) -> str:
    """Human-readable, deterministic rendering of a (possibly nested) label."""
    if isinstance(lab, tuple):
        return "(" + ",".join(render_label(x) for x in lab) + ")"
    return str(lab)


def class_label(rep: Label) -> str:
    return "⟦" + render_label(rep) + "⟧"


@dataclass(frozen=True)
class FinSet:
    """An ordered finite set of distinct hashable labels."""

    elements: tuple[Label, ...]

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ShapeMismatch("FinSet elements must be distinct")

    @cached_property
    def index(self) -> dict[Label, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x: Label) -> bool:
        return x in self.index

    def position(self, x: Label) -> int:
        return self.index[x]


def finset(elements: Iterable[Label]) -> FinSet:
    return FinSet(tuple(elements))


EMPTY = FinSet(())
POINT = FinSet(("*",))


@dataclass(frozen=True)
class FinFn:
    """A function between FinSets, stored as the image tuple in source order."""

    src: FinSet
    tgt: FinSet
    images: tuple[Label, ...]

    def __post_init__(self):
        if len(self.images) != len(self.src):
            raise ShapeMismatch("image tuple length != source size")
        for y in self.images:
            if y not in self.tgt:
                raise ShapeMismatch(f"image {y!r} not in target")

    def __call__(self, x: Label) -> Label:
        return self.images[self.src.position(x)]

    def graph(self) -> tuple[tuple[Label, Label], ...]:
        return tuple(zip(self.src.elements, self.images))

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_surjective(self) -> bool:
        return set(self.images) == set(self.tgt.elements)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()


def fn_from_map(src: FinSet, tgt: FinSet, mapping: Mapping[Label, Label] | Callable[[Label], Label]) -> FinFn:
    get = mapping.__getitem__ if isinstance(mapping, Mapping) else mapping
    return FinFn(src, tgt, tuple(get(x) for x in src))


def identity_fn(X: FinSet) -> FinFn:
    return FinFn(X, X, X.elements)


def compose_fn(g: FinFn, f: FinFn) -> FinFn:
    """g after f."""
    if f.tgt != g.src:
        raise ShapeMismatch("compose_fn: middle sets differ")
    return FinFn(f.src, g.tgt, tuple(g(y) for y in f.images))


def product(factors: Sequence[FinSet], cap: int | None = None) -> FinSet:
    """Cartesian product; elements are tuples. Empty product is a singleton."""
    size = 1
    for X in factors:
        size *= len(X)
    check_cap("product", size, cap)
    return FinSet(tuple(itertools.product(*[X.elements for X in factors])))


def coproduct(factors: Sequence[FinSet], tags: Sequence[Label] | None = None,
              cap: int | None = None) -> FinSet:
    """Disjoint union; elements are (tag, x) pairs."""
    if tags is None:
        tags = tuple(range(len(factors)))
    size = sum(len(X) for X in factors)
    check_cap("coproduct", size, cap)
    out = []
    for tag, X in zip(tags, factors):
        out.extend((tag, x) for x in X)
    return FinSet(tuple(out))


def hom_set(A: FinSet, B: FinSet, cap: int | None = None) -> FinSet:
    """All functions A -> B, each labeled by its image tuple in A-order."""
    check_cap("hom_set", len(B) ** len(A) if len(A) else 1, cap)
    return FinSet(tuple(itertools.product(B.elements, repeat=len(A))))


def apply_hom_label(A: FinSet, lab: tuple[Label, ...], x: Label) -> Label:
    return lab[A.position(x)]


def hom_label_of(f: FinFn) -> tuple[Label, ...]:
    return f.images


def power(S: FinSet, X: FinSet, cap: int | None = None) -> FinSet:
    """X^S, the S-fold power: functions S -> X."""
    return hom_set(S, X, cap)


def copower(S: FinSet, X: FinSet, cap: int | None = None) -> FinSet:
    """S . X, the S-fold copower: pairs (s, x)."""
    check_cap("copower", len(S) * len(X), cap)
    return FinSet(tuple((s, x) for s in S for x in X))


@dataclass(frozen=True)
class SubResult:
    """A subset presented with its inclusion.

    ambient/inclusion are None when the ambient set was too large to
    materialize under the cap; the carrier is still exact.
    """

    carrier: FinSet
    ambient: FinSet | None = None
    inclusion: FinFn | None = None

    def __post_init__(self):
        if self.inclusion is not None and not self.inclusion.is_injective():
            raise ShapeMismatch("SubResult inclusion must be injective")


@dataclass(frozen=True)
class QuotResult:
    """A quotient set with projection and a least-representative section."""

    ambient: FinSet
    carrier: FinSet
    projection: FinFn
    section: FinFn
    classes: tuple[tuple[Label, ...], ...] = field(default=())

    def class_of(self, x: Label) -> Label:
        return self.projection(x)


class UnionFind:
    """Union-find over indices 0..n-1 with path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]


def quotient_by_pairs(ambient: FinSet, pairs: Iterable[tuple[Label, Label]],
                      cap: int | None = None) -> QuotResult:
    """Quotient of `ambient` by the equivalence generated by `pairs`.

    Classes are ordered by their least member's position; each class is
    labeled by its least member, rendered inside corner brackets.
    """
    check_cap("quotient", len(ambient), cap)
    uf = UnionFind(len(ambient))
    for a, b in pairs:
        uf.union(ambient.position(a), ambient.position(b))
    members: dict[int, list[int]] = {}
    for i in range(len(ambient)):
        members.setdefault(uf.find(i), []).append(i)
    roots = sorted(members, key=lambda r: members[r][0])
    classes = tuple(tuple(ambient.elements[i] for i in members[r]) for r in roots)
    labels = tuple(class_label(cls[0]) for cls in classes)
    if len(set(labels)) != len(labels):  # representative rendering collided
        labels = tuple(class_label((k, cls[0])) for k, cls in enumerate(classes))
    carrier = FinSet(labels)
    proj_images = [None] * len(ambient)
    sect_images = []
    for k, cls in enumerate(classes):
        sect_images.append(cls[0])
        for x in cls:
            proj_images[ambient.position(x)] = labels[k]
    projection = FinFn(ambient, carrier, tuple(proj_images))
    section = FinFn(carrier, ambient, tuple(sect_images))
    return QuotResult(ambient, carrier, projection, section, classes)


def equalizer(f: FinFn, g: FinFn, cap: int | None = None) -> SubResult:
    """The subset of the common source where f and g agree."""
    if f.src != g.src or f.tgt != g.tgt:
        raise ShapeMismatch("equalizer needs a parallel pair")
    kept = tuple(x for x in f.src if f(x) == g(x))
    check_cap("equalizer", len(kept), cap)
    carrier = FinSet(kept)
    return SubResult(carrier, f.src, FinFn(carrier, f.src, kept))


def coequalizer(f: FinFn, g: FinFn, cap: int | None = None) -> QuotResult:
    """Quotient of the common target by f(x) ~ g(x)."""
    if f.src != g.src or f.tgt != g.tgt:
        raise ShapeMismatch("coequalizer needs a parallel pair")
    return quotient_by_pairs(f.tgt, ((f(x), g(x)) for x in f.src), cap)


# ---------------------------------------------------------------------------
# family search
# ---------------------------------------------------------------------------

Constraint = tuple[Hashable, Hashable, Callable[[Label, Label], bool]]


def search_families(variables: Sequence[Hashable],
                    domains: Mapping[Hashable, Sequence[Label]],
                    constraints: Sequence[Constraint],
                    cap: int | None = None) -> list[dict]:
    """Enumerate assignments satisfying binary constraints, deterministically.

    Depth-first in the given variable order with forward filtering: after each
    assignment, neighbor domains are pruned.  This walks the product of the
    domains implicitly, so only the solutions are ever materialized.
    """
    limit = active_cap(cap)
    vs = list(variables)
    order = {v: k for k, v in enumerate(vs)}
    by_pair: dict[tuple[int, int], list] = {}
    for a, b, ok in constraints:
        ia, ib = order[a], order[b]
        if ia == ib:
            # unary loop constraint: filter the domain up front
            dom = [x for x in domains[a] if ok(x, x)]
            domains = dict(domains)
            domains[a] = dom
            continue
        if ia < ib:
            by_pair.setdefault((ia, ib), []).append((ok, False))
        else:
            by_pair.setdefault((ib, ia), []).append((ok, True))

    doms = [list(domains[v]) for v in vs]
    out: list[dict] = []
    assignment: list[Label] = [None] * len(vs)

    def extend(k: int, current: list[list[Label]]):
        if k == len(vs):
            out.append({v: assignment[i] for i, v in enumerate(vs)})
            if len(out) > limit:
                raise SizeCapExceeded("search_families solutions", len(out), limit)
            return
        for x in current[k]:
            assignment[k] = x
            pruned = current
            dead = False
            for j in range(k + 1, len(vs)):
                checks = by_pair.get((k, j))
                if not checks:
                    continue
                keep = [y for y in pruned[j]
                        if all(ok(y, x) if flipped else ok(x, y)
                               for ok, flipped in checks)]
                if not keep:
                    dead = True
                    break
                if len(keep) != len(pruned[j]):
                    if pruned is current:
                        pruned = list(current)
                    pruned[j] = keep
            if not dead:
                extend(k + 1, pruned)

    extend(0, doms)
    return out


# ---------------------------------------------------------------------------
# co/limits of Set-valued diagrams (duck-typed: see fincat.SetDiagram)
# ---------------------------------------------------------------------------

def limit(diagram, cap: int | None = None) -> SubResult:
    """Compatible families of a Set-valued diagram.

    Realizes the equalizer of the two canonical maps out of the product of
    the fibers; the product is traversed implicitly (see search_families) so
    the ambient is only materialized when it fits under the cap.
    """
    cat = diagram.cat
    objs = list(cat.objects)
    domains = {A: list(diagram.fiber(A)) for A in objs}
    constraints = []
    for u in cat.morphisms:
        if cat.is_identity(u):
            continue
        act = diagram.act(u)
        constraints.append((cat.src[u], cat.tgt[u],
                            lambda x, y, act=act: act(x) == y))
    sols = search_families(objs, domains, constraints, cap)
    carrier = FinSet(tuple(tuple(s[A] for A in objs) for s in sols))
    ambient_size = 1
    for A in objs:
        ambient_size *= len(domains[A])
    if ambient_size <= active_cap(cap):
        ambient = product([diagram.fiber(A) for A in objs], cap)
        incl = FinFn(carrier, ambient, carrier.elements)
        return SubResult(carrier, ambient, incl)
    return SubResult(carrier)


def limit_leg(result: SubResult, diagram, A) -> FinFn:
    """Projection from a limit carrier to the fiber at A."""
    objs = list(diagram.cat.objects)
    k = objs.index(A)
    return FinFn(result.carrier, diagram.fiber(A),
                 tuple(fam[k] for fam in result.carrier))


def colimit(diagram, cap: int | None = None) -> QuotResult:
    """Classes of the disjoint union of fibers under the action relation."""
    cat = diagram.cat
    ambient = coproduct([diagram.fiber(A) for A in cat.objects],
                        tags=list(cat.objects), cap=cap)
    pairs = []
    for u in cat.morphisms:
        if cat.is_identity(u):
            continue
        act = diagram.act(u)
        a, b = cat.src[u], cat.tgt[u]
        for x in diagram.fiber(a):
            pairs.append(((a, x), (b, act(x))))
    return quotient_by_pairs(ambient, pairs, cap)


def colimit_leg(result: QuotResult, diagram, A) -> FinFn:
    """Insertion from the fiber at A into a colimit carrier."""
    return FinFn(diagram.fiber(A), result.carrier,
                 tuple(result.projection((A, x)) for x in diagram.fiber(A)))


def weighted_limit(weight, diagram, cap: int | None = None) -> SubResult:
    """Families t_j: W(j) -> D(j) natural in j, for covariant W and D.

    Elements are tuples (in object order) of image tuples (in W(j) order).
    """
    cat = diagram.cat
    objs = list(cat.objects)
    domains = {}
    for A in objs:
        WA, DA = weight.fiber(A), diagram.fiber(A)
        domains[A] = list(hom_set(WA, DA, cap))
    constraints = []
    for u in cat.morphisms:
        if cat.is_identity(u):
            continue
        a, b = cat.src[u], cat.tgt[u]
        wu, du = weight.act(u), diagram.act(u)
        Wa = weight.fiber(a)

        def ok(ta, tb, wu=wu, du=du, Wa=Wa, weight=weight, b=b):
            Wb = weight.fiber(b)
            return all(tb[Wb.position(wu(w))] == du(ta[Wa.position(w)]) for w in Wa)

        constraints.append((a, b, ok))
    sols = search_families(objs, domains, constraints, cap)
    carrier = FinSet(tuple(tuple(s[A] for A in objs) for s in sols))
    return SubResult(carrier)


def weighted_colimit(weight, diagram, cap: int | None = None) -> QuotResult:
    """Quotient of the pairing of a presheaf weight with a covariant diagram.

    weight is contravariant (weight.act(u): W(tgt u) -> W(src u)); classes of
    pairs (j, (w, x)) are generated by (j, (W(u)w', x)) ~ (j', (w', D(u)x)).
    """
    cat = diagram.cat
    fibers = []
    for A in cat.objects:
        fibers.append(copower(weight.fiber(A), diagram.fiber(A), cap))
    ambient = coproduct(fibers, tags=list(cat.objects), cap=cap)
    pairs = []
    for u in cat.morphisms:
        if cat.is_identity(u):
            continue
        a, b = cat.src[u], cat.tgt[u]
        wu, du = weight.act(u), diagram.act(u)
        for w2 in weight.fiber(b):
            for x in diagram.fiber(a):
                pairs.append(((a, (wu(w2), x)), (b, (w2, du(x)))))
    return quotient_by_pairs(ambient, pairs, cap)
