"""Closed-form recovery from three window-modulated intensities.

With three distinct phase shifts the measured intensities are linear in
``R1 = Cbar**2``, ``R2 = Cbar*K*cos(E-P) - K**2`` and
``R3 = Cbar*K*sin(E-P)``; inverting the 3x3 modulation matrix gives the
``R`` maps pixel by pixel. The amplitude follows directly from ``R1`` and the
phase from a two-argument arctangent once a reference amplitude ``K`` is
chosen.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .field import as_mask, centered_idft_array, crop_array

__all__ = [
    "MIN_ABS_DETERMINANT",
    "PhaseShiftTriple",
    "SingularShiftsError",
    "RDecomposition",
    "KMode",
    "KApproximation",
    "QuadraticRoots",
    "build_modulation_matrix",
    "decompose_R",
    "k_squared_candidates",
    "k_shape",
    "approximate_K",
    "recover_phase_algebraic",
    "recover_amplitude",
]

MIN_ABS_DETERMINANT = 1e-6


class SingularShiftsError(ValueError):
    """The phase-shift triple gives a (near-)singular modulation matrix."""


@dataclass(frozen=True)
class PhaseShiftTriple:
    """Three phase-shift values in radians, pairwise distinct modulo 2*pi."""

    t1: float
    t2: float
    t3: float

    def __post_init__(self) -> None:
        vals = self.as_tuple()
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"phase shifts must be finite, got {vals}")

    def check_distinct(self) -> None:
        """Raise :class:`SingularShiftsError` if two shifts coincide modulo 2*pi."""
        vals = self.as_tuple()
        for i in range(3):
            for j in range(i + 1, 3):
                d = math.remainder(vals[i] - vals[j], 2 * math.pi)
                if abs(d) < 1e-12:
                    raise SingularShiftsError(
                        f"phase shifts t{i + 1}={vals[i]} and t{j + 1}={vals[j]} coincide "
                        "modulo 2*pi: singular modulation matrix"
                    )

    @classmethod
    def standard(cls) -> "PhaseShiftTriple":
        """The ``{0, pi/2, pi}`` triple."""
        return cls(0.0, math.pi / 2, math.pi)

    @classmethod
    def parse(cls, text: str) -> "PhaseShiftTriple":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated shifts, got {text!r}")
        return cls(*(float(p) for p in parts))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.t1, self.t2, self.t3)


@dataclass(frozen=True)
class RDecomposition:
    """Per-pixel ``R1, R2, R3`` maps; ``n_clamped`` counts R1 pixels raised to 0."""

    R1: np.ndarray
    R2: np.ndarray
    R3: np.ndarray
    n_clamped: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.R1.shape


class KMode(enum.Enum):
    COMBINED = "combined"
    ZERO = "zero"


@dataclass(frozen=True)
class KApproximation:
    mode: KMode
    K: np.ndarray
    P: np.ndarray
    n_clamped: int = 0


class QuadraticRoots(NamedTuple):
    plus: np.ndarray
    minus: np.ndarray
    n_clamped: int


def build_modulation_matrix(shifts: PhaseShiftTriple) -> np.ndarray:
    """Rows ``[1, 2cos t - 2, 2sin t]`` for each shift."""
    t = np.asarray(shifts.as_tuple(), dtype=float)
    return np.column_stack([np.ones(3), 2 * np.cos(t) - 2, 2 * np.sin(t)])


def decompose_R(I1, I2, I3, shifts: PhaseShiftTriple) -> RDecomposition:
    """Solve ``T @ [R1, R2, R3] = [I1, I2, I3]`` at every pixel.

    Negative ``R1`` values (roundoff or noise) are clamped to zero and counted.
    """
    maps = [np.asarray(I, dtype=float) for I in (I1, I2, I3)]
    if not (maps[0].shape == maps[1].shape == maps[2].shape):
        raise ValueError(f"intensity shapes differ: {[m.shape for m in maps]}")
    shifts.check_distinct()
    T = build_modulation_matrix(shifts)
    det = np.linalg.det(T)
    if abs(det) < MIN_ABS_DETERMINANT:
        raise SingularShiftsError(
            f"singular modulation matrix for shifts {shifts.as_tuple()} (|det T| = {abs(det):.3g})"
        )
    shape = maps[0].shape
    rhs = np.stack([m.ravel() for m in maps])
    R = np.linalg.solve(T, rhs)
    R1 = R[0].reshape(shape)
    neg = R1 < 0
    n_clamped = int(np.count_nonzero(neg))
    if n_clamped:
        R1 = np.where(neg, 0.0, R1)
    return RDecomposition(R1, R[1].reshape(shape), R[2].reshape(shape), n_clamped)


def k_squared_candidates(R: RDecomposition) -> QuadraticRoots:
    """Both roots of ``x**2 - (R1 - 2R2) x + (R2**2 + R3**2) = 0``.

    The roots are ``K**2`` and ``|Cbar e^{iE} - K e^{iP}|**2``; which one is
    the reference cannot be told from ``R`` alone.
    """
    b = R.R1 - 2 * R.R2
    disc = b**2 - 4 * (R.R2**2 + R.R3**2)
    neg = disc < 0
    n_clamped = int(np.count_nonzero(neg))
    root = np.sqrt(np.where(neg, 0.0, disc))
    return QuadraticRoots(0.5 * (b + root), 0.5 * (b - root), n_clamped)


def k_shape(window, grid_w: int, grid_h: int, object_w: int, object_h: int) -> np.ndarray:
    """Modulus of the image-plane transform of the window, cropped to the object."""
    mask = as_mask(window, grid_w, grid_h)
    return np.abs(crop_array(centered_idft_array(mask), object_h, object_w))


def approximate_K(
    R: RDecomposition,
    window,
    grid_w: int,
    grid_h: int,
    mode: KMode = KMode.COMBINED,
) -> KApproximation:
    """Initial reference amplitude; the reference phase is taken as zero.

    ``COMBINED`` scales the window-transform shape so that its peak equals the
    square root of the largest '+' root of :func:`k_squared_candidates`.
    ``ZERO`` returns ``K = 0``.
    """
    mode = KMode(mode)
    P = np.zeros(R.shape)
    if mode is KMode.ZERO:
        return KApproximation(mode, np.zeros(R.shape), P)
    h, w = R.shape
    shape = k_shape(window, grid_w, grid_h, w, h)
    roots = k_squared_candidates(R)
    scale = math.sqrt(max(float(roots.plus.max()), 0.0))
    peak = float(shape.max())
    if peak <= 0:
        raise ValueError("window transform vanishes on the object region")
    return KApproximation(mode, shape * (scale / peak), P, roots.n_clamped)


def half_open_atan2(y, x) -> np.ndarray:
    """``arctan2`` folded onto (-pi, pi]; numpy returns -pi for ``y = -0.0, x < 0``."""
    a = np.arctan2(y, x)
    return np.where(a == -np.pi, np.pi, a)


def recover_phase_algebraic(R: RDecomposition, K, P, *, return_indeterminate: bool = False):
    """``E = P + atan2(R3, R2 + K**2)``.

    Pixels where both arctangent arguments vanish get ``E = P``; pass
    ``return_indeterminate=True`` to also receive the boolean mask of them.
    """
    K = np.asarray(K, dtype=float)
    P = np.asarray(P, dtype=float)
    if not (K.shape == P.shape == R.shape):
        raise ValueError(f"shape mismatch: R {R.shape}, K {K.shape}, P {P.shape}")
    x = R.R2 + K**2
    E = P + half_open_atan2(R.R3, x)
    if return_indeterminate:
        return E, (x == 0) & (R.R3 == 0)
    return E


def recover_amplitude(R1, B=None, *, threshold: float = 1e-12, return_flags: bool = False):
    """``sqrt(max(R1, 0)) / B``.

    Pixels with ``B <= threshold`` are set to 0. With ``return_flags=True`` the
    result is ``(C, low_illumination_mask, n_negative_R1_clamped)``.
    """
    R1 = np.asarray(R1, dtype=float)
    B = np.ones_like(R1) if B is None else np.broadcast_to(np.asarray(B, dtype=float), R1.shape)
    low = B <= threshold
    if low.all():
        raise ValueError(f"illumination is at or below {threshold} everywhere")
    n_clamped = int(np.count_nonzero(R1 < 0))
    C = np.sqrt(np.maximum(R1, 0.0)) / np.where(low, 1.0, B)
    C[low] = 0.0
    if return_flags:
        return C, low, n_clamped
    return C
