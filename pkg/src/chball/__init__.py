"""Numerical toolkit for the complex hyperbolic ball: automorphisms of B^m,
their dynamics, discrete subgroups, and rigidity of symmetric proper maps."""

from .config import DEFAULT, Config, load_config
from .core import AffineLine, GroupElement, act, boundary_point, line_through, point_on_line
from .dynamics import contraction_rate, iterate, verify_north_south
from .errors import ChballError
from .normal_forms import kak, loxodromic_normal_form, make_a, make_k, make_m
from .spectral import Kind, classify, lambda1, sigma1
from .subgroups import GeneratorSet, limit_set, loxodromic_fixed_points, zariski_test

__version__ = "0.1.0"

__all__ = [
    "DEFAULT", "AffineLine", "ChballError", "Config", "GeneratorSet", "GroupElement", "Kind",
    "act", "boundary_point", "classify", "contraction_rate", "iterate", "kak", "lambda1",
    "limit_set", "line_through", "load_config", "loxodromic_fixed_points", "loxodromic_normal_form",
    "make_a", "make_k", "make_m", "point_on_line", "sigma1", "verify_north_south", "zariski_test",
]
