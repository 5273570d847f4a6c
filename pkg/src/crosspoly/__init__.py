"""Ehrhart polynomials of cross-polytopes: exact roots and saddle-point asymptotics."""
from .critline import RootSet, all_roots, critical_line_polynomial, isolate_roots, refine_root
from .exactpoly import ExactPolynomial, build_ehrhart, eval_exact, gen_series_coeffs, lattice_count_oracle
from .saddle import asymptotic_F, evaluate_L, integral_I, saddle_point
from .counting import build_counting_curve, count_roots_asymptotic, count_roots_exact, largest_root_estimate

__all__ = [
    "ExactPolynomial", "build_ehrhart", "eval_exact", "gen_series_coeffs", "lattice_count_oracle",
    "RootSet", "all_roots", "critical_line_polynomial", "isolate_roots", "refine_root",
    "asymptotic_F", "evaluate_L", "integral_I", "saddle_point",
    "build_counting_curve", "count_roots_asymptotic", "count_roots_exact", "largest_root_estimate",
]
__version__ = "0.1.0"
