"""Synthetic test objects.

Smooth random maps are white Gaussian noise blurred with a Gaussian kernel
(``smoothness`` is its standard deviation in pixels) and rescaled so their
extremes land exactly on the requested bounds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import gaussian_filter

from .forward import ObjectSpec

__all__ = ["ObjectKind", "ObjectRecipe", "generate", "winding_number"]


class ObjectKind(enum.Enum):
    COMPLEX_STRUCTURED = "complex_structured"
    PURE_PHASE = "pure_phase"
    BLOBS = "blobs"
    VORTEX = "vortex"
    TILT_BACKGROUND = "tilt_background"


@dataclass(frozen=True)
class ObjectRecipe:
    kind: ObjectKind = ObjectKind.COMPLEX_STRUCTURED
    size: int = 256
    phase_range: float = 4.0
    amplitude_min: float = 0.01
    amplitude_contrast: float = 100.0
    smoothness: float = 8.0
    topological_number: int = 16
    vortex_radius: Optional[float] = None
    blob_count: int = 12
    blob_radius: float = 12.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ObjectKind(self.kind))
        if int(self.size) != self.size or self.size < 4 or self.size % 2:
            raise ValueError(f"size must be an even integer >= 4, got {self.size!r}")
        if not (self.phase_range >= 0 and math.isfinite(self.phase_range)):
            raise ValueError(f"phase_range must be finite and >= 0, got {self.phase_range!r}")
        if not self.amplitude_min > 0:
            raise ValueError(f"amplitude_min must be > 0, got {self.amplitude_min!r}")
        if not self.amplitude_contrast >= 1:
            raise ValueError(f"amplitude_contrast must be >= 1, got {self.amplitude_contrast!r}")
        if not self.smoothness > 0:
            raise ValueError(f"smoothness must be > 0, got {self.smoothness!r}")
        if int(self.topological_number) != self.topological_number:
            raise ValueError(f"topological_number must be an integer, got {self.topological_number!r}")
        if self.vortex_radius is not None and not self.vortex_radius > 0:
            raise ValueError(f"vortex_radius must be > 0 or None, got {self.vortex_radius!r}")
        if self.blob_count < 0 or not self.blob_radius > 0:
            raise ValueError("blob_count must be >= 0 and blob_radius > 0")


def _unit_smooth(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    a = gaussian_filter(rng.standard_normal((n, n)), sigma, mode="reflect")
    return _rescale(a)


def _rescale(a: np.ndarray) -> np.ndarray:
    lo, hi = a.min(), a.max()
    if hi == lo:
        return np.zeros_like(a)
    return (a - lo) / (hi - lo)


def _blobs(rng: np.random.Generator, n: int, count: int, radius: float) -> np.ndarray:
    yy, xx = np.mgrid[0:n, 0:n].astype(float)
    out = np.zeros((n, n))
    for _ in range(count):
        cy, cx = rng.uniform(radius, n - radius, size=2)
        r = np.hypot(yy - cy, xx - cx)
        # soft edge one pixel wide
        out += 0.5 * (1 - np.tanh((r - radius) / 1.0))
    return _rescale(out)


def generate(recipe: ObjectRecipe, pad_factor: int = 6) -> ObjectSpec:
    """Build the object described by ``recipe``; deterministic for a fixed seed."""
    n = recipe.size
    rng = np.random.default_rng(recipe.seed)
    ones = np.ones((n, n))
    kind = recipe.kind

    if kind in (ObjectKind.COMPLEX_STRUCTURED, ObjectKind.PURE_PHASE):
        # phase drawn first so both kinds share it for the same seed
        phase = recipe.phase_range * _unit_smooth(rng, n, recipe.smoothness)
        if kind is ObjectKind.PURE_PHASE:
            amp = ones
        else:
            u = _unit_smooth(rng, n, recipe.smoothness)
            amp = recipe.amplitude_min * (1 + (recipe.amplitude_contrast - 1) * u)
    elif kind is ObjectKind.BLOBS:
        amp = ones
        phase = recipe.phase_range * _blobs(rng, n, recipe.blob_count, recipe.blob_radius)
    elif kind is ObjectKind.VORTEX:
        amp = ones
        c = (n - 1) / 2
        yy, xx = np.mgrid[0:n, 0:n]
        theta = np.arctan2(yy - c, xx - c)
        phase = np.mod(recipe.topological_number * theta, 2 * np.pi)
        if recipe.vortex_radius is not None:
            # finite plate on a flat surround
            phase = np.where(np.hypot(yy - c, xx - c) < recipe.vortex_radius, phase, 0.0)
    elif kind is ObjectKind.TILT_BACKGROUND:
        amp = ones
        yy, xx = np.mgrid[0:n, 0:n]
        phase = recipe.phase_range * (xx + yy) / (2 * (n - 1))
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown object kind {kind!r}")
    return ObjectSpec(amp, phase, None, pad_factor)


def winding_number(phase: np.ndarray, radius: float) -> float:
    """Total wrapped phase change around a centered square loop, in units of 2*pi."""
    n = phase.shape[0]
    c = n // 2
    r = int(radius)
    if not 0 < r < c:
        raise ValueError(f"loop radius must be in (0, {c}), got {radius}")
    top = [(c - r, x) for x in range(c - r, c + r)]
    right = [(y, c + r) for y in range(c - r, c + r)]
    bottom = [(c + r, x) for x in range(c + r, c - r, -1)]
    left = [(y, c - r) for y in range(c + r, c - r, -1)]
    loop = top + right + bottom + left
    vals = np.array([phase[p] for p in loop] + [phase[loop[0]]])
    steps = np.angle(np.exp(1j * np.diff(vals)))
    return float(steps.sum() / (2 * np.pi))
