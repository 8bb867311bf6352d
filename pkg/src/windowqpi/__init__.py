"""Small-window phase-shifting phase imaging in a simulated 4f system.

Three intensities recorded with the low-frequency part of the object spectrum
phase-shifted by different amounts determine the object amplitude exactly and
its phase approximately in closed form; an alternating reference-wave update
then drives the phase error down linearly.
"""

from .algebraic import (
    KApproximation,
    KMode,
    PhaseShiftTriple,
    RDecomposition,
    SingularShiftsError,
    approximate_K,
    build_modulation_matrix,
    decompose_R,
    k_shape,
    k_squared_candidates,
    recover_amplitude,
    recover_phase_algebraic,
)
from .field import (
    ComplexField,
    Domain,
    WindowSpec,
    crop_center,
    dft2_centered,
    from_amp_phase,
    idft2_centered,
    pad_center,
    window_mask,
)
from .forward import (
    NoiseKind,
    NoiseSpec,
    ObjectSpec,
    intensity,
    predicted_intensity,
    propagate_with_modulation,
    reference_field,
    simulate_triple,
)
from .iterative import IterationConfig, RecoveryResult, recover, refine, update_reference
from .metrics import (
    ConvergenceTrace,
    background_eliminate,
    estimate_convergence,
    phase_rms,
    theoretical_resolution,
    wrap_phase,
)
from .objects import ObjectKind, ObjectRecipe, generate

__version__ = "0.1.0"

__all__ = [
    "KApproximation",
    "KMode",
    "PhaseShiftTriple",
    "RDecomposition",
    "SingularShiftsError",
    "approximate_K",
    "build_modulation_matrix",
    "decompose_R",
    "k_shape",
    "k_squared_candidates",
    "recover_amplitude",
    "recover_phase_algebraic",
    "ComplexField",
    "Domain",
    "WindowSpec",
    "crop_center",
    "dft2_centered",
    "from_amp_phase",
    "idft2_centered",
    "pad_center",
    "window_mask",
    "NoiseKind",
    "NoiseSpec",
    "ObjectSpec",
    "intensity",
    "predicted_intensity",
    "propagate_with_modulation",
    "reference_field",
    "simulate_triple",
    "ConvergenceTrace",
    "background_eliminate",
    "estimate_convergence",
    "phase_rms",
    "theoretical_resolution",
    "wrap_phase",
    "IterationConfig",
    "RecoveryResult",
    "recover",
    "refine",
    "update_reference",
    "ObjectKind",
    "ObjectRecipe",
    "generate",
]
