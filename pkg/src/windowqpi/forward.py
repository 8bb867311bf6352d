"""Forward model of the 4f system with a phase-shifting Fourier-plane window.

The object field ``Cbar * exp(iE)`` is zero-padded, transformed to the focal
plane, multiplied by ``exp(i t w)`` (``w`` the binary window) and transformed
back with the inverse DFT, so the image is not flipped. The result is cropped
to the object size.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebraic import PhaseShiftTriple
from .field import (
    ComplexField,
    Domain,
    centered_dft_array,
    centered_idft_array,
    crop_array,
    from_amp_phase,
    as_mask,
    pad_array,
)

__all__ = [
    "ObjectSpec",
    "NoiseKind",
    "NoiseSpec",
    "padded_shape",
    "object_spectrum",
    "lowpass_through_window",
    "propagate_with_modulation",
    "reference_field",
    "intensity",
    "simulate_triple",
    "predicted_intensity",
    "window_energy_fraction",
]

QUANT_LEVELS = 65535


@dataclass(frozen=True)
class ObjectSpec:
    """Object amplitude ``C``, phase ``E`` and real illumination ``B``.

    ``cbar = B * C`` is the field amplitude seen by the optics. The pipeline
    requires even grid sizes of at least 4 so the DC bin is unambiguous.
    """

    amplitude: np.ndarray
    phase: np.ndarray
    illumination: Optional[np.ndarray] = None
    pad_factor: int = 6

    def __post_init__(self) -> None:
        C = np.asarray(self.amplitude, dtype=float)
        E = np.asarray(self.phase, dtype=float)
        B = np.ones_like(C) if self.illumination is None else np.asarray(self.illumination, dtype=float)
        if C.ndim != 2 or C.shape != E.shape or C.shape != B.shape:
            raise ValueError(
                f"amplitude {C.shape}, phase {E.shape} and illumination {B.shape} must share one 2D shape"
            )
        h, w = C.shape
        if h < 4 or w < 4 or h % 2 or w % 2:
            raise ValueError(f"object grid must have even sizes >= 4, got {w}x{h}")
        if (C < 0).any() or (B < 0).any():
            raise ValueError("amplitude and illumination must be non-negative")
        if not (np.isfinite(C).all() and np.isfinite(E).all() and np.isfinite(B).all()):
            raise ValueError("object maps must be finite")
        if int(self.pad_factor) != self.pad_factor or self.pad_factor < 1:
            raise ValueError(f"pad_factor must be a positive integer, got {self.pad_factor!r}")
        object.__setattr__(self, "amplitude", C)
        object.__setattr__(self, "phase", E)
        object.__setattr__(self, "illumination", B)
        object.__setattr__(self, "pad_factor", int(self.pad_factor))

    @property
    def shape(self) -> tuple[int, int]:
        return self.amplitude.shape

    @property
    def cbar(self) -> np.ndarray:
        return self.illumination * self.amplitude

    @property
    def padded_shape(self) -> tuple[int, int]:
        return padded_shape(self.shape, self.pad_factor)

    def field(self) -> ComplexField:
        return from_amp_phase(self.cbar, self.phase)


class NoiseKind(enum.Enum):
    NONE = "none"
    ADDITIVE_GAUSSIAN = "additive_gaussian"
    QUANTIZE16 = "quantize16"


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind = NoiseKind.NONE
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not self.sigma >= 0:
            raise ValueError(f"noise sigma must be >= 0, got {self.sigma!r}")

    def apply(self, maps: list[np.ndarray]) -> list[np.ndarray]:
        """Apply the noise model to a list of intensity maps with one seeded generator."""
        if self.kind is NoiseKind.NONE:
            return [np.array(m, dtype=float) for m in maps]
        if self.kind is NoiseKind.ADDITIVE_GAUSSIAN:
            rng = np.random.default_rng(self.seed)
            return [np.maximum(m + self.sigma * rng.standard_normal(m.shape), 0.0) for m in maps]
        out = []
        for m in maps:
            scale = float(m.max())
            if scale <= 0:
                out.append(np.zeros_like(m))
                continue
            q = np.clip(np.rint(m / scale * QUANT_LEVELS), 0, QUANT_LEVELS)
            out.append(q * (scale / QUANT_LEVELS))
        return out


def padded_shape(shape: tuple[int, int], pad_factor: int) -> tuple[int, int]:
    return shape[0] * pad_factor, shape[1] * pad_factor


def object_spectrum(values: np.ndarray, pad_factor: int) -> np.ndarray:
    """Centered focal-plane spectrum of a zero-padded object field."""
    ph, pw = padded_shape(values.shape, pad_factor)
    return centered_dft_array(pad_array(np.asarray(values, dtype=complex), ph, pw))


def _image_plane(spectrum: np.ndarray, modulation: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    return crop_array(centered_idft_array(spectrum * modulation), *shape)


def lowpass_through_window(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Image-plane field when only the windowed part of the spectrum passes.

    ``mask`` is the binary window on the padded grid; the pad factor is read
    off its shape.
    """
    pad_factor = mask.shape[0] // values.shape[0]
    if padded_shape(values.shape, pad_factor) != mask.shape:
        raise ValueError(f"mask shape {mask.shape} is not an integer multiple of object shape {values.shape}")
    return _image_plane(object_spectrum(values, pad_factor), mask, values.shape)


def _modulation(mask: np.ndarray, t: float) -> np.ndarray:
    # exactly 1 outside the window
    return (1.0 - mask) + np.exp(1j * t) * mask


def _mask_for(obj: ObjectSpec, window) -> np.ndarray:
    ph, pw = obj.padded_shape
    return as_mask(window, pw, ph)


def propagate_with_modulation(obj: ObjectSpec, window, t: float) -> ComplexField:
    """Image-plane field with the window spectrum phase-shifted by ``t``.

    ``window`` is a :class:`WindowSpec` or a 0/1 mask on the padded grid.
    """
    mask = _mask_for(obj, window)
    spec = object_spectrum(obj.field().values, obj.pad_factor)
    return ComplexField(_image_plane(spec, _modulation(mask, t), obj.shape), Domain.SPATIAL)


def reference_field(obj: ObjectSpec, window) -> ComplexField:
    """Low-pass reference wave ``K exp(iP)`` passed by the window alone."""
    mask = _mask_for(obj, window)
    return ComplexField(lowpass_through_window(obj.field().values, mask), Domain.SPATIAL)


def intensity(field) -> np.ndarray:
    """Squared modulus, per pixel."""
    v = np.asarray(field)
    return v.real**2 + v.imag**2


def simulate_triple(
    obj: ObjectSpec,
    window,
    shifts: PhaseShiftTriple,
    noise: NoiseSpec = NoiseSpec(),
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Three image-plane intensities, one per phase shift; noise applied last."""
    shifts.check_distinct()
    mask = _mask_for(obj, window)
    spec = object_spectrum(obj.field().values, obj.pad_factor)
    clean = [intensity(_image_plane(spec, _modulation(mask, t), obj.shape)) for t in shifts.as_tuple()]
    I1, I2, I3 = noise.apply(clean)
    return I1, I2, I3


def predicted_intensity(Cbar, K, E, P, t: float) -> np.ndarray:
    """Closed-form intensity ``Cbar^2 + (2cos t - 2)(Cbar K cos(E-P) - K^2) + 2 sin t Cbar K sin(E-P)``."""
    Cbar, K, E, P = (np.asarray(a, dtype=float) for a in (Cbar, K, E, P))
    if not (Cbar.shape == K.shape == E.shape == P.shape):
        raise ValueError("predicted_intensity maps must share one shape")
    d = E - P
    return Cbar**2 + (2 * np.cos(t) - 2) * (Cbar * K * np.cos(d) - K**2) + 2 * np.sin(t) * Cbar * K * np.sin(d)


def window_energy_fraction(obj: ObjectSpec, window) -> float:
    """Share of the object's spectral energy that falls inside the window."""
    spec = object_spectrum(obj.field().values, obj.pad_factor)
    power = spec.real**2 + spec.imag**2
    return float((power * _mask_for(obj, window)).sum() / power.sum())
