"""PT-symmetric spin chains: spectra, phase boundaries and state preparation."""

from ._epchain import (
    ConfigError,
    DefectivePropagation,
    DegenerateFit,
    DimensionCap,
    DimensionMismatch,
    Error,
    IsingBoundary,
    ModelKind,
    ModelSpec,
    NoDominantState,
    NonConvergence,
    NoRoot,
    NoTransition,
    NumericError,
    ValidationMismatch,
    bethe_spectrum,
    broken_pair_kappa,
    dominant_state,
    effective_model,
    eig,
    epts_gamma,
    evolve,
    hamiltonian,
    is_broken,
    max_im_epsilon,
    numeric_boundary,
    optimize_gamma,
    perturbative_boundary,
    scattering_ep,
    site_state,
    sweep,
    target_state,
)

__version__ = "0.1.0"
