"""Certified homology of punctured marked curves.

The pipeline is planar first, analytic second: a rectilinear graph in
the x-line with one cell per special value, lifted to every component
by certified root continuation, then integer lattice work on the lifted
complex. See base, lift and homology for the three stages.
"""

from .base import BaseGraph, SiteSet, base_graph_for, build_base_graph, sites_of
from .lift import CurveLift, genus_from_monodromy, lift_curve
from .homology import (
    HomologyRepresentation,
    RectilinearChain,
    boundary,
    homology_representation,
    representation_from_lift,
)

__all__ = [
    "BaseGraph",
    "CurveLift",
    "HomologyRepresentation",
    "RectilinearChain",
    "SiteSet",
    "base_graph_for",
    "boundary",
    "build_base_graph",
    "genus_from_monodromy",
    "homology_representation",
    "lift_curve",
    "representation_from_lift",
    "sites_of",
]
