"""Shared fixtures: small categories, corpus loading, and the seeded battery."""

from __future__ import annotations

from importlib import resources

import pytest

from hace import ends, generate
from hace.fincat import monoid_category, poset_category, walking_arrow

N_STANDARD_SEEDS = 100


def corpus_text(name: str) -> str:
    return (resources.files("hace") / "corpus" / name).read_text(encoding="utf-8")


CORPUS_FILES = (
    "degenerate_object.cat",
    "limits_as_ends.cat",
    "classical_end_hom.cat",
    "diagonal_limits.cat",
    "wedge_census_cartesian.cat",
    "dinat_counts.cat",
    "lattice_kusarigama.cat",
    "identity_kusarigama.cat",
    "day_cyclic2.cat",
)


@pytest.fixture(scope="session")
def arrow():
    return walking_arrow()


@pytest.fixture(scope="session")
def z2():
    return monoid_category("Z2", ("e", "s"), "e",
                           {("e", "e"): "e", ("e", "s"): "s",
                            ("s", "e"): "s", ("s", "s"): "e"})


@pytest.fixture(scope="session")
def chain3():
    return poset_category("chain3", ("c0", "c1", "c2"),
                          [("c0", "c1"), ("c1", "c2")])


@pytest.fixture(scope="session")
def diamond():
    return poset_category("diamond", ("bot", "x", "y", "top"),
                          [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")])


@pytest.fixture(scope="session")
def cospan():
    return poset_category("cospan", ("a", "b", "c"), [("a", "c"), ("b", "c")])


@pytest.fixture(scope="session")
def standard_battery():
    """The 100 standard instances with their end and coend computations."""
    rows = []
    for seed in range(N_STANDARD_SEEDS):
        inst = generate.instance(seed, "standard")
        end_results, end_agree = ends.end_all(inst.functor)
        co_results, co_agree = ends.coend_all(inst.functor)
        rows.append({"inst": inst,
                     "end": end_results[ends.END_METHODS[0]],
                     "end_agree": end_agree,
                     "coend": co_results[ends.COEND_METHODS[0]],
                     "coend_agree": co_agree})
    return rows
