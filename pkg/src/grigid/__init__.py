"""Similitude systems, graph self-similarity certificates and rigidity checks."""

__version__ = "0.1.0"

from .affine import (AffineCertificate, CantorStage, SlopeWitness, cantor_refine, certify_affine,
                     converse_ifs, find_slope_subinterval)
from .attractor import (PointSet, chaos_game, hausdorff_brute_force, hausdorff_distance,
                        hutchinson_step, iterate_attractor)
from .cover import (CoverCertificate, certify_lipschitz, cover_bounds, generate_intervals,
                    minimal_subcover)
from .directions import (DirectionSet, admissible_rotations, contains_arc, phi_image,
                         rotation_orbit_cover)
from .fitting import (FitResult, RigidityReport, VerdictConfig, fit_similitudes, rigidity_verdict,
                      self_similarity_residual)
from .graph import (UNIT, Affine, CantorLebesgue, Custom, Interval, Rectangle, SampledGraph, Takagi,
                    Weierstrass, framing_rectangle, oscillation, sample)
from .ifsfile import parse_ifs, read_ifs, serialize_ifs
from .similitude import (IFS, RotationClass, Similitude, classify_rotation, compose, compose_word,
                         fixed_point, make_ifs, moran_dimension)
from .svg import render_svg

__all__ = [
    "Affine",
    "AffineCertificate",
    "CantorLebesgue",
    "CantorStage",
    "CoverCertificate",
    "Custom",
    "DirectionSet",
    "FitResult",
    "IFS",
    "Interval",
    "PointSet",
    "Rectangle",
    "RigidityReport",
    "RotationClass",
    "SampledGraph",
    "Similitude",
    "SlopeWitness",
    "Takagi",
    "UNIT",
    "VerdictConfig",
    "Weierstrass",
    "admissible_rotations",
    "cantor_refine",
    "certify_affine",
    "certify_lipschitz",
    "chaos_game",
    "classify_rotation",
    "compose",
    "compose_word",
    "contains_arc",
    "converse_ifs",
    "cover_bounds",
    "find_slope_subinterval",
    "fit_similitudes",
    "fixed_point",
    "framing_rectangle",
    "generate_intervals",
    "hausdorff_brute_force",
    "hausdorff_distance",
    "hutchinson_step",
    "iterate_attractor",
    "make_ifs",
    "minimal_subcover",
    "moran_dimension",
    "oscillation",
    "parse_ifs",
    "phi_image",
    "read_ifs",
    "render_svg",
    "rigidity_verdict",
    "rotation_orbit_cover",
    "sample",
    "self_similarity_residual",
    "serialize_ifs",
]
