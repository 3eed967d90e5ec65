"""Radial numerical laboratory for the focusing quartic Hartree flow on R^5:
ground states, threshold classification, time evolution, and the conservation,
virial, and Morawetz diagnostics that separate dispersion from collapse."""

__version__ = "0.1.0"

from .classifier import ClassificationReport, classify
from .evolution import (
    EvolutionConfig,
    RunOutcome,
    evolve,
    linear_substep,
    nonlinear_substep,
    scaling_transform,
    virial_check,
)
from .functionals import (
    DiagnosticsRow,
    cutoff_chi,
    energy,
    free_energy,
    g_of_f,
    gradv_norm_sq,
    local_mass,
    mass,
    morawetz_p_chi,
    threshold_f,
    virial_k,
)
from .grid import (
    OMEGA4,
    RadialField,
    RadialGrid,
    grad_norm_sq,
    integrate,
    l2_norm_sq,
    laplacian_apply,
    lp_norm,
    make_grid,
    weighted_inner,
)
from .ground_state import GroundStateResult, helmholtz_invert, solve_ground_state
from .newton import hartree_potential, interaction_p
from .oracle import convolution_direct, fd_second_derivative
from .potentials import (
    HypothesisReport,
    PotentialField,
    PotentialSpec,
    build_potential,
    check_hypotheses,
    zero_potential,
)

__all__ = [
    "OMEGA4",
    "ClassificationReport",
    "DiagnosticsRow",
    "EvolutionConfig",
    "GroundStateResult",
    "HypothesisReport",
    "PotentialField",
    "PotentialSpec",
    "RadialField",
    "RadialGrid",
    "RunOutcome",
    "build_potential",
    "check_hypotheses",
    "classify",
    "convolution_direct",
    "cutoff_chi",
    "energy",
    "evolve",
    "fd_second_derivative",
    "free_energy",
    "g_of_f",
    "grad_norm_sq",
    "gradv_norm_sq",
    "hartree_potential",
    "helmholtz_invert",
    "integrate",
    "interaction_p",
    "l2_norm_sq",
    "laplacian_apply",
    "linear_substep",
    "local_mass",
    "lp_norm",
    "make_grid",
    "mass",
    "morawetz_p_chi",
    "nonlinear_substep",
    "scaling_transform",
    "solve_ground_state",
    "threshold_f",
    "virial_check",
    "virial_k",
    "weighted_inner",
    "zero_potential",
]
