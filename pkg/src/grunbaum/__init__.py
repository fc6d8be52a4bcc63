"""Convex bodies, γ-concave functions, and numerical checks of sharp
Grünbaum-type inequalities for sections, projections and functions."""

from .extremal import (
    closed_form_centroid,
    corollary_equality_function,
    functional_bound,
    grunbaum_bound,
    projections_equality_body,
    sections_equality_body,
    theorem_bound,
    theorem_equality_function,
)
from .gammafn import ConeAffineFunction, GammaFunction, halfspace_mass_ratio, halfspace_mass_ratios, marginal
from .geomcore import Subspace, orthonormalize, random_subspace
from .polytope import (
    DegenerateError,
    Halfspace,
    VPolytope,
    clip,
    hull,
    project,
    projection_ratio,
    section,
    section_ratio,
    steiner_symmetrize,
)
from .transforms import affinize, coneify, ratio_from, transform_chain

__version__ = "0.1.0"

__all__ = [
    "ConeAffineFunction", "DegenerateError", "GammaFunction", "Halfspace", "Subspace", "VPolytope",
    "affinize", "clip", "closed_form_centroid", "coneify", "corollary_equality_function",
    "functional_bound", "grunbaum_bound", "halfspace_mass_ratio", "halfspace_mass_ratios", "hull", "marginal", "orthonormalize",
    "project", "projection_ratio", "projections_equality_body", "random_subspace", "ratio_from",
    "section", "section_ratio", "sections_equality_body", "steiner_symmetrize", "theorem_bound",
    "theorem_equality_function", "transform_chain",
]
