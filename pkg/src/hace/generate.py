"""Seeded random instances for the law and acceptance suites.

Every instance is a pure function of (seed, profile): bases are small posets,
free categories on acyclic graphs, or familiar monoids; functors are built
from slot blocks (constants, representables, their tagged sums and copowers)
so that functoriality holds by construction.  Profiles bound the sizes so
each downstream computation stays well under a second.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import setops
from .apps import MonoidalFinCat, cyclic_monoidal, meet_monoidal
from .errors import GenerationExhausted
from .fincat import (
    FinCat,
    SetFunctorPQ,
    components_of,
    const_functor_pq,
    free_category,
    functor_from_rule,
    monoid_category,
    poset_category,
)
from .setops import finset
from .twisted import hom_pi

PROFILES = ("standard", "kusarigama", "fubini", "day")

_SIGS = ((1, 1), (1, 1), (1, 1), (1, 1), (2, 1), (1, 2), (1, 0), (0, 1))


@dataclass
class Instance:
    """One generated test case; which fields are set depends on the profile."""

    seed: int
    profile: str
    base: FinCat
    functor: SetFunctorPQ | None = None
    partner: SetFunctorPQ | None = None
    monoidal: MonoidalFinCat | None = None
    factors: tuple = field(default=())

    def describe(self) -> str:
        bits = [f"seed={self.seed}", self.profile, self.base.name,
                f"{len(self.base.objects)} objects",
                f"{len(self.base.morphisms)} morphisms"]
        if self.functor is not None:
            s = self.functor.sig
            bits.append(f"{self.functor.name} sig ({s.p},{s.q})")
        if self.partner is not None:
            s = self.partner.sig
            bits.append(f"{self.partner.name} sig ({s.p},{s.q})")
        if self.monoidal is not None:
            bits.append(f"{len(self.factors)} day factors")
        return ", ".join(bits)


# ---------------------------------------------------------------------------
# base categories
# ---------------------------------------------------------------------------

def _poset_base(rng: random.Random, max_objects: int, max_morphisms: int) -> FinCat:
    for _ in range(60):
        n = rng.randint(2, max_objects)
        objs = [f"c{i}" for i in range(n)]
        rel = [(objs[i], objs[j]) for i in range(n) for j in range(i + 1, n)
               if rng.random() < 0.55]
        C = poset_category(f"poset{n}", objs, rel)
        if len(C.morphisms) <= max_morphisms and len(components_of(C)) == 1:
            return C
    raise GenerationExhausted("no connected poset base within bounds")


def _free_base(rng: random.Random, max_morphisms: int) -> FinCat:
    for _ in range(60):
        n = rng.randint(2, 3)
        objs = [f"v{i}" for i in range(n)]
        edges = []
        for e in range(rng.randint(1, 3)):
            i, j = rng.randrange(n), rng.randrange(n)
            if i == j:
                continue
            lo, hi = min(i, j), max(i, j)
            edges.append((f"e{e}", objs[lo], objs[hi]))
        if not edges:
            continue
        C = free_category(f"free{n}", objs, edges)
        if len(C.morphisms) <= max_morphisms and len(components_of(C)) == 1:
            return C
    raise GenerationExhausted("no connected free base within bounds")


def _z_table(n: int) -> FinCat:
    elts = [f"g{k}" if k else "e" for k in range(n)]
    mul = {(elts[a], elts[b]): elts[(a + b) % n] for a in range(n) for b in range(n)}
    return monoid_category(f"Z{n}", elts, "e", mul)


def _idempotent_monoid() -> FinCat:
    mul = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "s"}
    return monoid_category("idem", ("e", "s"), "e", mul)


def base_category(rng: random.Random, profile: str = "standard") -> FinCat:
    small = profile == "kusarigama"
    roll = rng.random()
    if roll < 0.5:
        return _poset_base(rng, 3 if small else 4, 6 if small else 12)
    if roll < 0.75:
        return _free_base(rng, 6 if small else 12)
    monoids = [_z_table(2), _idempotent_monoid()]
    if not small:
        monoids.append(_z_table(3))
    return monoids[rng.randrange(len(monoids))]


# ---------------------------------------------------------------------------
# functors from slot blocks
# ---------------------------------------------------------------------------

def _slot_block(rng: random.Random, C: FinCat, contra: bool, max_fiber: int):
    """(fiber, act) data for one slot; act(u) respects the slot's variance."""
    roll = rng.random()
    if roll < 0.28:
        size = 0 if rng.random() < 0.12 else rng.randint(1, max_fiber)
        S = finset([f"s{i}" for i in range(size)])
        return (lambda A: S), (lambda u: (lambda x: x))
    X = rng.choice(C.objects)
    if contra:
        def one(X):
            return (lambda A, X=X: finset(C.hom(A, X)),
                    lambda u, X=X: (lambda w: C.compose(w, u)))
    else:
        def one(X):
            return (lambda A, X=X: finset(C.hom(X, A)),
                    lambda u, X=X: (lambda w: C.compose(u, w)))
    fib1, act1 = one(X)
    if roll < 0.72:
        return fib1, act1
    if roll < 0.88:
        Y = rng.choice(C.objects)
        fib2, act2 = one(Y)

        def fiber(A):
            return setops.coproduct([fib1(A), fib2(A)])

        def act(u):
            m1, m2 = act1(u), act2(u)
            return lambda t: (t[0], m1(t[1]) if t[0] == 0 else m2(t[1]))

        return fiber, act
    S = finset([f"s{i}" for i in range(rng.randint(2, max_fiber))])

    def fiber(A):
        return setops.copower(S, fib1(A))

    def act(u):
        m1 = act1(u)
        return lambda t: (t[0], m1(t[1]))

    return fiber, act


def _assemble(C: FinCat, sig, blocks, name: str) -> SetFunctorPQ:
    p, q = sig

    def fiber(T):
        return setops.product([blocks[k][0](T[k]) for k in range(p + q)])

    def act(us):
        maps = [blocks[k][1](us[k]) for k in range(p + q)]
        return lambda t: tuple(maps[k](t[k]) for k in range(p + q))

    return functor_from_rule(C, sig, fiber, act, name)


def _max_fiber(F: SetFunctorPQ) -> int:
    return max(len(F.fiber(T)) for T in F.power_cat.objects)


def _diag_scan(F: SetFunctorPQ) -> int:
    total = 1
    for A in F.base.objects:
        total *= len(F.diagonal_fiber(A))
    return total


def random_functor(rng: random.Random, C: FinCat, sig,
                   max_fiber: int = 4, max_scan: int = 700) -> SetFunctorPQ:
    """A random (p,q)-functor on C with all fibers and scan costs bounded."""
    p, q = sig
    per_slot = max_fiber if p + q <= 1 else 2
    for attempt in range(60):
        roll = rng.random()
        if roll < 0.1 and p + q >= 1:
            F = hom_pi(C, sig)
        elif roll < 0.18:
            size = 0 if rng.random() < 0.1 else rng.randint(1, max_fiber)
            F = const_functor_pq(C, sig, finset([f"s{i}" for i in range(size)]))
        else:
            blocks = [_slot_block(rng, C, k < p, per_slot) for k in range(p + q)]
            F = _assemble(C, sig, blocks, f"F{attempt}")
        if _max_fiber(F) <= max_fiber and _diag_scan(F) <= max_scan:
            return F
    raise GenerationExhausted(f"no functor of sig {sig} within bounds on {C.name}")


def _random_partner(rng: random.Random, F: SetFunctorPQ) -> SetFunctorPQ:
    """A target for dinaturality checks: flipped signature, tiny fibers."""
    C = F.base
    flipped = (F.sig.q, F.sig.p)
    for _ in range(60):
        G = random_functor(rng, C, flipped, max_fiber=2, max_scan=256)
        search = 1
        for A in C.objects:
            nf, ng = len(F.diagonal_fiber(A)), max(1, len(G.diagonal_fiber(A)))
            if nf and ng ** nf > 64:
                break
            search *= ng ** nf if nf else 1
            if search > 4096:
                break
        else:
            return G
    raise GenerationExhausted(f"no dinat partner within bounds on {C.name}")


def _pick_sig(rng: random.Random, C: FinCat, profile: str) -> tuple:
    while True:
        sig = _SIGS[rng.randrange(len(_SIGS))]
        if profile == "kusarigama" and sum(sig) > 2 and len(C.morphisms) > 8:
            continue
        return sig


def _presheaf_from_block(rng: random.Random, C: FinCat, name: str) -> SetFunctorPQ:
    """A random (1,0)-functor, the shape convolution factors need."""
    fib, act = _slot_block(rng, C, contra=True, max_fiber=2)
    return functor_from_rule(C, (1, 0), lambda T: fib(T[0]),
                             lambda us: act(us[0]), name=name)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def _standard(rng: random.Random, seed: int, profile: str) -> Instance:
    for _ in range(40):
        C = base_category(rng, profile)
        sig = _pick_sig(rng, C, profile)
        fiber_cap = 2 if profile == "kusarigama" else 3
        try:
            F = random_functor(rng, C, sig, max_fiber=fiber_cap,
                               max_scan=400 if profile == "kusarigama" else 700)
            G = _random_partner(rng, F)
        except GenerationExhausted:
            continue
        return Instance(seed, profile, C, F, G)
    raise GenerationExhausted(f"profile {profile} exhausted at seed {seed}")


def _fubini(rng: random.Random, seed: int) -> Instance:
    sig_pool = ((1, 1), (1, 1), (1, 0), (0, 1))
    for _ in range(40):
        C = base_category(rng, "kusarigama")
        D = base_category(rng, "kusarigama")
        sc = sig_pool[rng.randrange(len(sig_pool))]
        sd = sig_pool[rng.randrange(len(sig_pool))]
        n_pairs = len(C.morphisms) * len(D.morphisms)
        if n_pairs ** (sum(sc) + sum(sd)) > 40000:
            continue
        try:
            F = random_functor(rng, C, sc, max_fiber=2, max_scan=64)
            G = random_functor(rng, D, sd, max_fiber=2, max_scan=64)
        except GenerationExhausted:
            continue
        return Instance(seed, "fubini", C, F, G)
    raise GenerationExhausted(f"profile fubini exhausted at seed {seed}")


def _day(rng: random.Random, seed: int) -> Instance:
    roll = rng.random()
    if roll < 0.4:
        M = cyclic_monoidal(2)
    elif roll < 0.6:
        M = cyclic_monoidal(3)
    else:
        chain = poset_category("chain2", ("lo", "hi"), [("lo", "hi")])
        M = meet_monoidal(chain)
    n_mor = len(M.cat.morphisms)
    n = rng.randint(1, 3 if n_mor <= 3 else 2)
    factors = tuple(_presheaf_from_block(rng, M.cat, f"D{k}") for k in range(n))
    return Instance(seed, "day", M.cat, None, None, M, factors)


def instance(seed: int, profile: str = "standard") -> Instance:
    """The deterministic instance for a seed and profile."""
    if profile not in PROFILES:
        raise GenerationExhausted(f"unknown profile {profile!r}")
    rng = random.Random(seed * 131 + PROFILES.index(profile))
    if profile in ("standard", "kusarigama"):
        return _standard(rng, seed, profile)
    if profile == "fubini":
        return _fubini(rng, seed)
    return _day(rng, seed)


def generate_text(seed: int, profile: str = "standard") -> str:
    """Render the instance as parseable .cat text."""
    from .catspec import render_instance
    return render_instance(instance(seed, profile))
