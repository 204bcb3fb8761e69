"""Rational proper maps between balls and the rigidity pipeline."""

from .detector import DetectorSetup, MembershipReport, detector_h, h0, make_detector, z_x_membership
from .ftag import Branch, FtagFit, ftag_fit
from .polynomial import Polynomial
from .rational import (
    HolderEstimate,
    MapReport,
    RationalProperMap,
    SchwarzReport,
    compose,
    holder_estimate,
    normalize_at_origin,
    quadratic_map,
    quadratic_symmetry,
    schwarz_check,
    trivial_embedding,
    validate_map,
)
from .rigidity import RigidityResult, Verdict, rigidity_verify
from .symmetry import (
    LoxoPairReport,
    SymmetryPair,
    block_extension,
    check_loxo_pair,
    find_psi,
    verify_symmetry_pair,
)

__all__ = [
    "Branch", "DetectorSetup", "FtagFit", "HolderEstimate", "LoxoPairReport", "MapReport",
    "MembershipReport", "Polynomial", "RationalProperMap", "RigidityResult", "SchwarzReport",
    "SymmetryPair", "Verdict", "block_extension", "check_loxo_pair", "compose", "detector_h",
    "find_psi", "ftag_fit", "h0", "holder_estimate", "make_detector", "normalize_at_origin",
    "quadratic_map", "quadratic_symmetry", "rigidity_verify", "schwarz_check", "trivial_embedding",
    "validate_map", "verify_symmetry_pair", "z_x_membership",
]
