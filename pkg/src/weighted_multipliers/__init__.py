"""Weighted estimates for singular Fourier multipliers: a numerical workbench.

Discrete multipliers on periodic grids, fractional maximal operators over
approach and escape regions, the lattice Littlewood-Paley machinery, and the
verification checks that measure weighted constants, sharp exponent lines
and atom bounds.
"""
__version__ = "0.1.0"

from .fields import (GridSpec, SampledField, SpectralField, apply_spectral_symbol,
                     forward_transform, halfline_projection, hilbert_transform,
                     inverse_transform, lp_norm, make_grid)
from .lattice import (BumpSuite, LatticeSpec, apply_arr, apply_sk, build_lattice,
                      forward_square_check, representation_residual, reverse_square_check,
                      weight_chain)
from .maximal import (HL, Fractional, MaximalChainSpec, Region, Region2D, RegionSpec,
                      Regularized, Strong2D, eval_chain, eval_fractional, eval_hl, eval_region,
                      eval_region_2d, eval_regularized, eval_strong_2d, parse_chain)
from .multipliers import (KabSpec, MultiplierSpec, build_multiplier, check_membership,
                          make_fractional, make_kab_multiplier, make_miyachi, make_schrodinger,
                          make_tensor_2d, r_variation, restrict_support)
from .verify import (AtomSpec, SweepSpec, VerificationReport, atom_test,
                     estimate_lplq_norm, estimate_weighted_constant, verify_applSj,
                     verify_main3, verify_scaling)

__all__ = [
    "GridSpec", "SampledField", "SpectralField", "make_grid", "forward_transform",
    "inverse_transform", "apply_spectral_symbol", "hilbert_transform", "halfline_projection",
    "lp_norm", "MultiplierSpec", "KabSpec", "make_miyachi", "make_fractional",
    "make_schrodinger", "make_kab_multiplier", "make_tensor_2d", "restrict_support",
    "check_membership", "r_variation", "build_multiplier", "RegionSpec", "HL", "Fractional",
    "Region", "Strong2D", "Region2D", "Regularized", "MaximalChainSpec", "eval_hl",
    "eval_fractional", "eval_region", "eval_region_2d", "eval_strong_2d", "eval_regularized",
    "eval_chain", "parse_chain", "BumpSuite", "LatticeSpec", "build_lattice", "apply_sk",
    "forward_square_check", "reverse_square_check", "weight_chain", "apply_arr",
    "representation_residual", "SweepSpec", "AtomSpec", "VerificationReport",
    "estimate_weighted_constant", "estimate_lplq_norm", "atom_test", "verify_applSj",
    "verify_scaling", "verify_main3",
]
