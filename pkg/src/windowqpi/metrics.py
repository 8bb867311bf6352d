"""Phase error metrics, convergence order/rate fitting and background removal."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "RMS_FLOOR",
    "ConvergenceTrace",
    "wrap_phase",
    "phase_rms",
    "estimate_convergence",
    "ratio_statistics",
    "BackgroundCorrected",
    "background_eliminate",
    "theoretical_resolution",
]

RMS_FLOOR = 1e-13


@dataclass
class ConvergenceTrace:
    """Per-iteration error history of a refinement run.

    Index 0 is the algebraic (pre-iteration) estimate. ``rms`` is the
    piston-removed error against ground truth, ``rms_raw`` the plain
    root-mean-square difference; both are empty without ground truth.
    ``self_residual[k]`` is the RMS phase change made by iteration ``k``, so
    ``self_residual[0]`` is NaN.
    """

    rms: list[float] = field(default_factory=list)
    rms_raw: list[float] = field(default_factory=list)
    self_residual: list[float] = field(default_factory=list)
    fitted_p: Optional[float] = None
    fitted_r: Optional[float] = None

    def __len__(self) -> int:
        return len(self.self_residual)

    def ratios(self) -> np.ndarray:
        """``rms[k] / rms[k-1]`` for k >= 1."""
        e = np.asarray(self.rms, dtype=float)
        if e.size < 2:
            return np.empty(0)
        with np.errstate(divide="ignore", invalid="ignore"):
            return e[1:] / e[:-1]

    def fit(self, **kwargs) -> tuple[float, float]:
        p, r = estimate_convergence(self.rms, **kwargs)
        self.fitted_p, self.fitted_r = p, r
        return p, r


def wrap_phase(phase) -> np.ndarray:
    """Wrap angles onto (-pi, pi]."""
    w = np.angle(np.exp(1j * np.asarray(phase, dtype=float)))
    return np.where(w == -np.pi, np.pi, w)


def phase_rms(E_rec, E_true, remove_piston: bool = False) -> float:
    """Root-mean-square phase error.

    Raw mode is the plain ``sqrt(mean((E_rec - E_true)**2))``. With
    ``remove_piston`` the difference is wrapped to (-pi, pi], re-centred on its
    circular mean and the residual mean is subtracted before taking the RMS.
    """
    a = np.asarray(E_rec, dtype=float)
    b = np.asarray(E_true, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("phase maps are empty")
    d = a - b
    if remove_piston:
        d = wrap_phase(d)
        d = wrap_phase(d - np.angle(np.mean(np.exp(1j * d))))
        d = d - d.mean()
    return float(np.sqrt(np.mean(d**2)))


def estimate_convergence(
    rms: Sequence[float],
    *,
    skip: int = 2,
    floor: float = RMS_FLOOR,
    min_points: int = 6,
) -> tuple[float, float]:
    """Fit ``log e[k+1] = p log e[k] + log r`` by least squares.

    Only the leading run of entries above ``floor`` is used, and at least
    ``min_points`` such entries are required. The first ``skip`` entries are
    then dropped from the fit.
    """
    e = np.asarray(rms, dtype=float)
    above = np.isfinite(e) & (e > floor)
    n = int(np.argmin(above)) if not above.all() else e.size
    if n < min_points:
        raise ValueError(
            f"need at least {min_points} error values above {floor:g} to fit convergence, got {n}"
        )
    tail = np.log(e[min(skip, n - 2):n])
    x, y = tail[:-1], tail[1:]
    if np.ptp(x) == 0:
        raise ValueError("error sequence is constant; convergence order is undefined")
    p, log_r = np.polyfit(x, y, 1)
    return float(p), float(math.exp(log_r))


def ratio_statistics(rms: Sequence[float], start: int = 5, stop: int = 25) -> tuple[float, float]:
    """Mean and standard deviation of ``rms[k]/rms[k-1]`` for ``start <= k <= stop``."""
    e = np.asarray(rms, dtype=float)
    stop = min(stop, e.size - 1)
    if stop < start:
        raise ValueError(f"trace of length {e.size} has no ratios in [{start}, {stop}]")
    ratios = e[start:stop + 1] / e[start - 1:stop]
    return float(ratios.mean()), float(ratios.std())


class BackgroundCorrected(NamedTuple):
    amplitude: np.ndarray
    phase: np.ndarray
    low_background: np.ndarray


def background_eliminate(obj, bg, threshold: float = 1e-6) -> BackgroundCorrected:
    """Divide out a calibration frame's amplitude and subtract its phase.

    ``obj`` and ``bg`` need ``amplitude`` and ``phase`` attributes (e.g.
    :class:`~windowqpi.iterative.RecoveryResult`). Pixels whose background
    amplitude is at or below ``threshold`` get amplitude 0 and are flagged;
    more than half such pixels is an error.
    """
    A, Ab = np.asarray(obj.amplitude, dtype=float), np.asarray(bg.amplitude, dtype=float)
    if A.shape != Ab.shape or np.shape(obj.phase) != np.shape(bg.phase) or A.shape != np.shape(obj.phase):
        raise ValueError("object and background recoveries must share one shape")
    low = Ab <= threshold
    if low.mean() > 0.5:
        raise ValueError(
            f"background amplitude is <= {threshold:g} on {low.mean():.0%} of pixels (limit 50%)"
        )
    amplitude = np.where(low, 0.0, A / np.where(low, 1.0, Ab))
    phase = wrap_phase(np.asarray(obj.phase, dtype=float) - np.asarray(bg.phase, dtype=float))
    return BackgroundCorrected(amplitude, phase, low)


def theoretical_resolution(beam_diameter: float, focal_length: float, wavelength: float) -> float:
    """Diffraction-limited resolution ``wavelength * focal_length / beam_diameter`` (SI units)."""
    for name, v in (("beam_diameter", beam_diameter), ("focal_length", focal_length), ("wavelength", wavelength)):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be a positive finite number, got {v!r}")
    return wavelength * focal_length / beam_diameter
