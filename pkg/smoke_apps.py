"""Smoke the rewritten apps module on thin AND non-thin bases."""
from hace import apps, ends
from hace.fincat import (Functor, SetDiagram, hom_functor, monoid_category,
                         point_functor, poset_category, power_pq,
                         validate_functor, walking_arrow)
from hace.setops import finset
from hace.dinat import enumerate_dinat

z2 = monoid_category("Z2", ("e", "s"), "e",
                     {("e", "e"): "e", ("e", "s"): "s",
                      ("s", "e"): "s", ("s", "s"): "e"})
arrow = walking_arrow()
chain3 = poset_category("chain3", ("q0", "q1", "q2"),
                        [("q0", "q1"), ("q1", "q2")])

print("== weighted ends/coends ==")
for C in (z2, arrow, chain3):
    h = hom_functor(C)
    assert apps.weighted_end_matches_dinat(h, h), f"wend dinat {C.name}"
    assert apps.weighted_end_point_reduction(h), f"wend point {C.name}"
    assert apps.weighted_coend_point_reduction(h), f"wcoend point {C.name}"
    assert apps.weighted_coend_maps_out_check(h, h, 2), f"maps-out {C.name}"
    assert apps.multi_weighted_end_point_reduction(h, 2), f"multi point {C.name}"
    pt = point_functor(C, (1, 1))
    assert apps.multi_weighted_end_matches_iterated(pt, h, h), f"iter {C.name}"
    assert apps.multi_weighted_end_matches_iterated(h, pt, h), f"iter2 {C.name}"
    print(f"  {C.name}: end={len(ends.end_pq(h).carrier)}",
          f"wend(hom,hom)={len(apps.weighted_end(h, h).carrier)}",
          f"dinat={len(enumerate_dinat(h, h))}")

print("== weighted Kan ==")
K = Functor(arrow, chain3, {"0": "q0", "1": "q2"},
            {"le_0_0": "le_q0_q0", "le_1_1": "le_q2_q2",
             "le_0_1": "le_q0_q2"}, name="K")
validate_functor(K)
F = SetDiagram(arrow, lambda A: finset(["a", "b"] if A == "0" else ["c"]),
               lambda u: (lambda x: x if arrow.src[u] == arrow.tgt[u] else "c"),
               name="F")
G = SetDiagram(chain3, lambda A: finset(["g0"] if A == "q0" else ["g0", "g1"]),
               lambda u: (lambda x: "g0" if chain3.tgt[u] == "q1" else
                          (x if chain3.src[u] != "q1" else x)),
               name="G")
assert apps.weighted_kan_left_point_reduction(K, F), "wkan left point"
assert apps.weighted_kan_right_point_reduction(K, F), "wkan right point"
W = hom_functor(arrow)
assert apps.weighted_kan_left_nat_count_check(W, K, F, G), "wkan left nat"
assert apps.weighted_kan_right_nat_count_check(W, K, F, G), "wkan right nat"
ptw = point_functor(arrow, (1, 1))
assert apps.weighted_kan_left_nat_count_check(ptw, K, F, G), "wkan left nat pt"
assert apps.weighted_kan_right_nat_count_check(ptw, K, F, G), "wkan right nat pt"
KZ = Functor(z2, z2, {"*": "*"}, {"e": "e", "s": "s"}, name="KZ")
validate_functor(KZ)
FZ = SetDiagram(z2, lambda A: finset(["x", "y"]),
                lambda u: (lambda t: t if u == "e" else ("y" if t == "x" else "x")),
                name="FZ")
GZ = SetDiagram(z2, lambda A: finset(["p", "q"]),
                lambda u: (lambda t: t if u == "e" else ("q" if t == "p" else "p")),
                name="GZ")
assert apps.weighted_kan_left_point_reduction(KZ, FZ), "wkan left point Z2"
assert apps.weighted_kan_right_point_reduction(KZ, FZ), "wkan right point Z2"
WZ = hom_functor(z2)
assert apps.weighted_kan_left_nat_count_check(WZ, KZ, FZ, GZ), "wkan left nat Z2"
assert apps.weighted_kan_right_nat_count_check(WZ, KZ, FZ, GZ), "wkan right nat Z2"
print("  weighted Kan ok (arrow->chain3, Z2->Z2)")

print("== diagonal Kan ==")
PC = power_pq(arrow, (1, 1))
kobj = {T: ("q1" if (T[0] == "0" or T[1] == "1") else "q0") for T in PC.objects}
kmor = {us: chain3.hom(kobj[PC.src[us]], kobj[PC.tgt[us]])[0]
        for us in PC.morphisms}
KD = Functor(PC, chain3, kobj, kmor, name="KD")
validate_functor(KD)
for C, KK, FF, GG in ((arrow, KD, hom_functor(arrow), G),
                      (z2, Functor(power_pq(z2, (1, 1)), z2,
                                   {T: "*" for T in power_pq(z2, (1, 1)).objects},
                                   {us: z2.compose(us[1], us[0])
                                    for us in power_pq(z2, (1, 1)).morphisms},
                                   name="KZ2"),
                       hom_functor(z2), GZ)):
    validate_functor(KK)
    lan = apps.diagonal_kan(KK, FF)
    ran = apps.diagonal_kan_right(KK, FF)
    print(f"  {C.name}: lan fibers=", {d: len(r.carrier) for d, r in lan.fibers.items()},
          " ran fibers=", {d: len(r.carrier) for d, r in ran.fibers.items()})
    assert apps.diagonal_kan_nat_count_check(KK, FF, GG), f"dilan nat {C.name}"
    assert apps.diagonal_kan_right_nat_count_check(KK, FF, GG), f"diran nat {C.name}"
    assert apps.diagonal_kan_left_hom_weighted_check(KK, FF), f"dilan fn7 {C.name}"
    assert apps.diagonal_kan_right_hom_weighted_check(KK, FF), f"diran fn7 {C.name}"
    assert apps.diagonal_kan_point_is_coend(FF), f"point coend {C.name}"
    assert apps.diagonal_kan_identity_is_chained(FF), f"ident chain {C.name}"
print("  diagonal Kan ok")

print("== weighted diagonal Kan ==")
for C, KK, FF in ((arrow, KD, hom_functor(arrow)),
                  (z2, Functor(power_pq(z2, (1, 1)), z2,
                               {T: "*" for T in power_pq(z2, (1, 1)).objects},
                               {us: z2.compose(us[1], us[0])
                                for us in power_pq(z2, (1, 1)).morphisms},
                               name="KZ2"), hom_functor(z2))):
    assert apps.weighted_diagonal_kan_point_reduction(KK, FF), f"wdk L pt {C.name}"
    assert apps.weighted_diagonal_kan_right_point_reduction(KK, FF), f"wdk R pt {C.name}"
    assert apps.weighted_diagonal_kan_terminal_check(hom_functor(C), FF), \
        f"wdk terminal {C.name}"
print("  weighted diagonal ok")

print("== Day ==")
from hace.fincat import functor_from_rule
M2 = apps.cyclic_monoidal(2)
apps.validate_strict_monoidal(M2)
P0 = functor_from_rule(M2.cat, (1, 0),
                       lambda T: finset(["a", "b"] if T[0] == 0 else ["c"]),
                       lambda us: (lambda x: x), name="P0")
P1 = functor_from_rule(M2.cat, (1, 0),
                       lambda T: finset(["u"] if T[0] == 0 else ["v", "w"]),
                       lambda us: (lambda x: x), name="P1")
assert apps.day_singleton_is_identity(M2, P0), "day single M2"
day2 = apps.day_tensor(M2, [P0, P1])
print("  M2 day2 fibers:", {c: len(day2.fiber((c,))) for c in M2.cat.objects})
# discrete base, diagonal coend: (F*G)(c) = sum over A with A+A=c of F(A)xG(A)
assert len(day2.fiber((0,))) == 2 * 1 + 1 * 2, "day2 at 0"
assert len(day2.fiber((1,))) == 0, "day2 at 1"
MZ = apps.abelian_monoid_monoidal(z2)
apps.validate_strict_monoidal(MZ)
hz = functor_from_rule(z2, (1, 0), lambda T: finset(["e", "s"]),
                       lambda us: (lambda x: z2.compose(x, us[0])), name="R")
assert apps.day_singleton_is_identity(MZ, hz), "day single Z2"
dayzz = apps.day_tensor(MZ, [hz, hz])
print("  Z2 day(R,R) fiber:", len(dayzz.fiber(("*",))))
chain = poset_category("chain2", ("lo", "hi"), [("lo", "hi")])
MM = apps.meet_monoidal(chain)
apps.validate_strict_monoidal(MM)
Q = functor_from_rule(chain, (1, 0),
                      lambda T: finset(["m", "n"] if T[0] == "hi" else ["m"]),
                      lambda us: (lambda x: x
                                  if chain.src[us[0]] == chain.tgt[us[0]]
                                  else "m"),
                      name="Q")
assert apps.day_singleton_is_identity(MM, Q), "day single meet"
kan = apps.day_via_kan(MM, Q, Q)
print("  meet day_via_kan sizes:", {b: len(r.carrier) for b, r in kan.items()})
day3 = apps.day_tensor(MM, [Q, Q])
print("  meet day fibers:", {c: len(day3.fiber((c,))) for c in chain.objects})
print("ALL SMOKE PASSED")
