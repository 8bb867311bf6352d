"""Complex fields, centered unitary DFTs, padding and Fourier-plane windows.

Array layout follows numpy image convention: ``values[row, col]`` with rows
along y (height) and columns along x (width). The DC bin of a centered
spectrum sits at ``(height // 2, width // 2)``, which is the same pixel that
``numpy.fft.fftshift`` moves the zero frequency to.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Domain",
    "ComplexField",
    "WindowShape",
    "WindowSpec",
    "from_amp_phase",
    "dft2_centered",
    "idft2_centered",
    "pad_center",
    "crop_center",
    "window_mask",
    "as_mask",
    "centered_dft_array",
    "centered_idft_array",
]


class Domain(enum.Enum):
    SPATIAL = "spatial"
    FREQUENCY = "frequency"

    def toggled(self) -> "Domain":
        return Domain.FREQUENCY if self is Domain.SPATIAL else Domain.SPATIAL


@dataclass(frozen=True)
class ComplexField:
    """Immutable 2D complex grid tagged with the plane it lives on.

    The array is copied on construction and marked read-only, so instances
    can be shared freely. ``np.asarray(field)`` returns the underlying array.
    """

    values: np.ndarray
    domain: Domain = Domain.SPATIAL

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.complex128, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"ComplexField needs a 2D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"ComplexField needs at least 1x1 pixels, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("ComplexField values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __array__(self, dtype=None, copy=None):
        arr = self.values if dtype is None else self.values.astype(dtype)
        return arr.copy() if copy else arr

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def energy(self) -> float:
        """Sum of squared moduli."""
        return float(np.sum(self.values.real**2 + self.values.imag**2))


class WindowShape(enum.Enum):
    RECTANGLE = "rectangle"


@dataclass(frozen=True)
class WindowSpec:
    """Rectangular phase-shifting window in the centered Fourier plane.

    ``center_offset`` is ``(dx, dy)`` in pixels relative to the DC bin.
    """

    width_px: int = 7
    height_px: int = 7
    center_offset: tuple[int, int] = (0, 0)
    shape: WindowShape = field(default=WindowShape.RECTANGLE)

    def __post_init__(self) -> None:
        for name in ("width_px", "height_px"):
            v = getattr(self, name)
            if int(v) != v or v < 1 or v % 2 == 0:
                raise ValueError(f"window {name} must be an odd positive integer, got {v!r}")
        dx, dy = self.center_offset
        object.__setattr__(self, "center_offset", (int(dx), int(dy)))
        if not isinstance(self.shape, WindowShape):
            object.__setattr__(self, "shape", WindowShape(self.shape))

    @classmethod
    def square(cls, width: int) -> "WindowSpec":
        return cls(width_px=width, height_px=width)

    def bounds(self, grid_w: int, grid_h: int) -> tuple[slice, slice]:
        """Row and column slices covered by the window on a grid.

        Raises ``ValueError`` if any part of the window falls off the grid.
        """
        dx, dy = self.center_offset
        r0 = grid_h // 2 + dy - self.height_px // 2
        c0 = grid_w // 2 + dx - self.width_px // 2
        r1, c1 = r0 + self.height_px, c0 + self.width_px
        if r0 < 0 or c0 < 0 or r1 > grid_h or c1 > grid_w:
            raise ValueError(
                f"window {self.width_px}x{self.height_px} offset {self.center_offset} "
                f"does not fit in a {grid_w}x{grid_h} grid"
            )
        return slice(r0, r1), slice(c0, c1)


def from_amp_phase(amp, phase) -> ComplexField:
    """Build ``amp * exp(i*phase)`` as a spatial-domain field."""
    amp = np.asarray(amp, dtype=float)
    phase = np.asarray(phase, dtype=float)
    if amp.shape != phase.shape:
        raise ValueError(f"amplitude shape {amp.shape} does not match phase shape {phase.shape}")
    if np.any(amp < 0):
        raise ValueError("amplitude must be non-negative")
    return ComplexField(amp * (np.cos(phase) + 1j * np.sin(phase)), Domain.SPATIAL)


def centered_dft_array(values: np.ndarray) -> np.ndarray:
    """Unitary 2D DFT with DC at the grid center, on a raw array."""
    return sfft.fftshift(sfft.fft2(sfft.ifftshift(values), norm="ortho"))


def centered_idft_array(values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`centered_dft_array`."""
    return sfft.fftshift(sfft.ifft2(sfft.ifftshift(values), norm="ortho"))


def dft2_centered(f: ComplexField) -> ComplexField:
    """Forward unitary centered 2D DFT; toggles the domain tag."""
    return ComplexField(centered_dft_array(f.values), f.domain.toggled())


def idft2_centered(f: ComplexField) -> ComplexField:
    """Inverse unitary centered 2D DFT; toggles the domain tag."""
    return ComplexField(centered_idft_array(f.values), f.domain.toggled())


def _pad_offsets(small: tuple[int, int], big: tuple[int, int]) -> tuple[int, int]:
    return (big[0] - small[0]) // 2, (big[1] - small[1]) // 2


def pad_array(values: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    h, w = values.shape
    if target_h < h or target_w < w:
        raise ValueError(f"cannot pad {w}x{h} down to {target_w}x{target_h}")
    out = np.zeros((target_h, target_w), dtype=values.dtype)
    r0, c0 = _pad_offsets((h, w), (target_h, target_w))
    out[r0:r0 + h, c0:c0 + w] = values
    return out


def crop_array(values: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    h, w = values.shape
    if target_h > h or target_w > w:
        raise ValueError(f"cannot crop {w}x{h} up to {target_w}x{target_h}")
    r0, c0 = _pad_offsets((target_h, target_w), (h, w))
    return values[r0:r0 + target_h, c0:c0 + target_w]


def pad_center(f: ComplexField, target_w: int, target_h: int) -> ComplexField:
    """Embed ``f`` in the middle of a zero field of the target size."""
    return ComplexField(pad_array(f.values, target_h, target_w), f.domain)


def crop_center(f: ComplexField, target_w: int, target_h: int) -> ComplexField:
    """Extract the central block; undoes :func:`pad_center`."""
    return ComplexField(crop_array(f.values, target_h, target_w), f.domain)


def window_mask(spec: WindowSpec, grid_w: int, grid_h: int) -> np.ndarray:
    """Binary float mask, 1 inside the window and 0 elsewhere."""
    rows, cols = spec.bounds(grid_w, grid_h)
    mask = np.zeros((grid_h, grid_w))
    mask[rows, cols] = 1.0
    return mask


def as_mask(window, grid_w: int, grid_h: int) -> np.ndarray:
    """Window as a binary mask on the given grid.

    ``window`` is a :class:`WindowSpec` or an explicit 0/1 array of the grid
    shape (the only way to express e.g. an all-pass window on an even grid).
    """
    if isinstance(window, WindowSpec):
        return window_mask(window, grid_w, grid_h)
    mask = np.asarray(window, dtype=float)
    if mask.shape != (grid_h, grid_w):
        raise ValueError(f"mask shape {mask.shape} does not match grid {grid_w}x{grid_h}")
    if not np.isin(mask, (0.0, 1.0)).all():
        raise ValueError("window mask must contain only 0 and 1")
    return mask
