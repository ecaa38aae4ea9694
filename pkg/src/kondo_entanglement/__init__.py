"""Spin entanglement around a Kondo impurity in the Yosida singlet."""

__version__ = "0.1.0"

from .model import (CutoffMode, DerivedScales, ModelParams, RegimeWarning, derive_scales,
                    kondo_binding_energy, make_params)
from .kernels import (KernelProfile, condition_lhs, corr_zz, f_n, f_over_n, g_fn,
                      max_condition_lhs, profile, werner_p, y_integral)
from .densmat import (Normalization, TwoSpinDensityMatrix, WernerDecomposition, delta_rho,
                      normalize_to_werner, rho2_conduction, rho2_free, rho2_impurity_conduction,
                      werner_state)
from .entanglement import (EntanglementReport, assess, concurrence, negativity,
                           von_neumann_entropy)
from .oracle import LatticeSpec, lattice_f_n, lattice_g, lattice_norm

__all__ = [
    "CutoffMode", "DerivedScales", "ModelParams", "RegimeWarning", "derive_scales",
    "kondo_binding_energy", "make_params",
    "KernelProfile", "condition_lhs", "corr_zz", "f_n", "f_over_n", "g_fn",
    "max_condition_lhs", "profile", "werner_p", "y_integral",
    "Normalization", "TwoSpinDensityMatrix", "WernerDecomposition", "delta_rho",
    "normalize_to_werner", "rho2_conduction", "rho2_free", "rho2_impurity_conduction",
    "werner_state",
    "EntanglementReport", "assess", "concurrence", "negativity", "von_neumann_entropy",
    "LatticeSpec", "lattice_f_n", "lattice_g", "lattice_norm",
]
