"""Ends, coends, and dinaturality for finite mixed-variance functors.

The package computes (p,q)-ends and coends of Set-valued functors on finite
categories by four independent routes, enumerates dinatural transformations
and presents them as ends, builds the chained and hooked functors with their
adjunction to dinaturals, and checks the product-interchange, twisted-arrow,
weighted, and Day-convolution laws on concrete instances.
"""

from __future__ import annotations

from .dinat import (
    DinatPQ,
    check_dinatural,
    enumerate_cowedges,
    enumerate_dinat,
    enumerate_wedges,
)
from .ends import (
    COEND_METHODS,
    END_METHODS,
    CoendResult,
    EndResult,
    coend_all,
    coend_pq,
    dinat_as_end,
    end_all,
    end_pq,
    verify_universal_property,
)
from .errors import HaceError, ParseError, SizeCapExceeded
from .fincat import (
    FinCat,
    Functor,
    SetDiagram,
    SetFunctorPQ,
    free_category,
    functor_from_rule,
    functor_from_slots,
    hom_functor,
    monoid_category,
    opposite,
    poset_category,
    power_pq,
    product_category,
    walking_arrow,
)
from .kusarigama import adjunction_check, cokusarigama
from .setops import FinFn, FinSet, finset

__all__ = [
    "COEND_METHODS",
    "CoendResult",
    "DinatPQ",
    "END_METHODS",
    "EndResult",
    "FinCat",
    "FinFn",
    "FinSet",
    "Functor",
    "HaceError",
    "ParseError",
    "SetDiagram",
    "SetFunctorPQ",
    "SizeCapExceeded",
    "adjunction_check",
    "check_dinatural",
    "coend_all",
    "coend_pq",
    "cokusarigama",
    "dinat_as_end",
    "end_all",
    "end_pq",
    "enumerate_cowedges",
    "enumerate_dinat",
    "enumerate_wedges",
    "finset",
    "free_category",
    "functor_from_rule",
    "functor_from_slots",
    "hom_functor",
    "monoid_category",
    "opposite",
    "poset_category",
    "power_pq",
    "product_category",
    "verify_universal_property",
    "walking_arrow",
]

__version__ = "0.1.0"
