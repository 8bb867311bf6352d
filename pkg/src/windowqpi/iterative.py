"""Iterative refinement of the algebraic phase estimate.

Each iteration re-derives the reference wave ``K exp(iP)`` by passing the
current object estimate through the window, then re-applies
``E = P + atan2(R3, R2 + K**2)``. Only the phase is updated; the amplitude
stays at ``sqrt(R1)``.

Intensities do not see a global phase offset and neither does the update
(``E -> E + c`` moves ``P`` by the same ``c``), so the iteration converges to
the true phase up to a constant fixed by the starting estimate. Error traces
therefore track the piston-removed RMS alongside the raw one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .algebraic import (
    KApproximation,
    KMode,
    PhaseShiftTriple,
    RDecomposition,
    approximate_K,
    decompose_R,
    half_open_atan2,
    recover_amplitude,
    recover_phase_algebraic,
)
from .field import WindowSpec, as_mask
from .forward import lowpass_through_window, padded_shape
from .metrics import ConvergenceTrace, phase_rms, wrap_phase

__all__ = [
    "IterationConfig",
    "RecoveryResult",
    "NonFiniteIterateError",
    "update_reference",
    "refine",
    "recover",
]

log = logging.getLogger(__name__)

DIVERGENCE_PATIENCE = 5
_JITTER = 1e-12


class NonFiniteIterateError(RuntimeError):
    def __init__(self, iteration: int):
        super().__init__(f"non-finite phase estimate at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class IterationConfig:
    max_iters: int = 25
    self_residual_tol: float = 1e-10
    record_trace: bool = True

    def __post_init__(self) -> None:
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be an integer >= 1, got {self.max_iters!r}")
        if not self.self_residual_tol >= 0:
            raise ValueError(f"self_residual_tol must be >= 0, got {self.self_residual_tol!r}")


@dataclass
class RecoveryResult:
    amplitude: np.ndarray
    phase: np.ndarray
    K_final: np.ndarray
    P_final: np.ndarray
    iterations_run: int
    trace: ConvergenceTrace
    clamp_counts: dict[str, int] = field(default_factory=dict)
    diverged: bool = False


def _reference(Cbar: np.ndarray, E: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ref = lowpass_through_window(Cbar * np.exp(1j * E), mask)
    return np.abs(ref), np.angle(ref)


def update_reference(Cbar, E, window, pad_factor: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Reference amplitude ``K`` and phase ``P`` of the current object estimate.

    ``window`` is a :class:`WindowSpec` or a 0/1 mask on the padded grid.
    """
    Cbar = np.asarray(Cbar, dtype=float)
    E = np.asarray(E, dtype=float)
    if Cbar.shape != E.shape:
        raise ValueError(f"Cbar shape {Cbar.shape} does not match E shape {E.shape}")
    ph, pw = padded_shape(Cbar.shape, pad_factor)
    return _reference(Cbar, E, as_mask(window, pw, ph))


def refine(
    R: RDecomposition,
    window,
    Cbar,
    E_init=None,
    K_init: Optional[KApproximation] = None,
    cfg: IterationConfig = IterationConfig(),
    ground_truth=None,
    pad_factor: int = 6,
) -> RecoveryResult:
    """Alternate reference-wave updates and arctangent phase updates.

    If ``E_init`` is None it is computed from ``K_init`` (``K = 0`` when that
    is None too). Stops after ``cfg.max_iters`` iterations, when the RMS phase
    change drops below ``cfg.self_residual_tol``, or when the change grows for
    ``DIVERGENCE_PATIENCE`` consecutive iterations (flagged as diverged).
    """
    Cbar = np.asarray(Cbar, dtype=float)
    if Cbar.shape != R.shape:
        raise ValueError(f"Cbar shape {Cbar.shape} does not match R shape {R.shape}")
    if E_init is None:
        if K_init is None:
            K_init = KApproximation(KMode.ZERO, np.zeros(R.shape), np.zeros(R.shape))
        E = recover_phase_algebraic(R, K_init.K, K_init.P)
    else:
        E = np.array(E_init, dtype=float)
        if E.shape != R.shape:
            raise ValueError(f"E_init shape {E.shape} does not match R shape {R.shape}")
    truth = None if ground_truth is None else np.asarray(ground_truth, dtype=float)

    ph, pw = padded_shape(R.shape, pad_factor)
    mask = as_mask(window, pw, ph)

    trace = ConvergenceTrace()

    def record(residual: float) -> None:
        trace.self_residual.append(residual)
        if truth is not None and cfg.record_trace:
            trace.rms.append(phase_rms(E, truth, remove_piston=True))
            trace.rms_raw.append(phase_rms(E, truth))

    record(float("nan"))
    K = np.zeros(R.shape) if K_init is None else np.asarray(K_init.K, dtype=float)
    P = np.zeros(R.shape) if K_init is None else np.asarray(K_init.P, dtype=float)
    growth = 0
    diverged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        K, P = _reference(Cbar, E, mask)
        E_new = P + half_open_atan2(R.R3, R.R2 + K**2)
        if not np.isfinite(E_new).all():
            raise NonFiniteIterateError(it)
        residual = float(np.sqrt(np.mean(wrap_phase(E_new - E) ** 2)))
        prev = trace.self_residual[-1]
        E = E_new
        record(residual)
        if residual > prev and residual > _JITTER:
            growth += 1
        else:
            growth = 0
        if growth >= DIVERGENCE_PATIENCE:
            diverged = True
            log.warning("self-residual grew for %d iterations; stopping at %d", growth, it)
            break
        if residual < cfg.self_residual_tol:
            break

    if trace.rms:
        try:
            trace.fit()
        except ValueError as exc:
            log.debug("convergence fit skipped: %s", exc)
    return RecoveryResult(
        amplitude=Cbar.copy(),
        phase=E,
        K_final=K,
        P_final=P,
        iterations_run=it,
        trace=trace,
        clamp_counts={"R1": R.n_clamped},
        diverged=diverged,
    )


def recover(
    I1,
    I2,
    I3,
    shifts: PhaseShiftTriple,
    window: WindowSpec,
    *,
    pad_factor: int = 6,
    kmode: KMode = KMode.COMBINED,
    cfg: IterationConfig = IterationConfig(),
    illumination=None,
    ground_truth=None,
) -> RecoveryResult:
    """Full pipeline: R decomposition, K approximation, algebraic phase, refinement.

    ``cfg.max_iters`` iterations follow the algebraic step; the returned
    ``amplitude`` is the object amplitude ``C`` (``Cbar`` divided by the
    illumination, when given).
    """
    R = decompose_R(I1, I2, I3, shifts)
    ph, pw = padded_shape(R.shape, pad_factor)
    K0 = approximate_K(R, window, pw, ph, KMode(kmode))
    Cbar = np.sqrt(R.R1)
    result = refine(R, window, Cbar, None, K0, cfg, ground_truth, pad_factor)
    amplitude, _, _ = recover_amplitude(R.R1, illumination, return_flags=True)
    counts = dict(result.clamp_counts, K_discriminant=K0.n_clamped)
    return replace(result, amplitude=amplitude, clamp_counts=counts)
