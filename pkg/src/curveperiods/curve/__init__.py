"""Plane curves, places, divisors, differentials, and exact divisor math."""

from .fpoly import RatFunc
from .model import (
    INF,
    CurveComponent,
    Differential,
    Divisor,
    FFElem,
    Place,
    PlaneCurve,
    exact_place_field,
    is_infinite,
    place_y_ball,
    places_over,
)
from .riemannroch import (
    LinearSystem,
    branch_locus,
    divisor_of,
    pole_divisor,
    dx_divisor,
    evaluate_at_place,
    genus,
    linear_system,
    poles_of,
    residual_divisor,
    residue_at,
)
from .series import Series

__all__ = [
    "INF",
    "CurveComponent",
    "Differential",
    "Divisor",
    "FFElem",
    "LinearSystem",
    "Place",
    "PlaneCurve",
    "RatFunc",
    "Series",
    "branch_locus",
    "divisor_of",
    "pole_divisor",
    "dx_divisor",
    "evaluate_at_place",
    "exact_place_field",
    "genus",
    "is_infinite",
    "linear_system",
    "place_y_ball",
    "places_over",
    "poles_of",
    "residual_divisor",
    "residue_at",
]
