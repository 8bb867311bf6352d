"""Experiment configuration in a line-based ``key = value`` format.

Blank lines and ``#`` comments are ignored; nested settings use dotted keys::

    object.kind = complex_structured
    object.size = 256
    window.width_px = 7
    shifts = 0.0, 1.5707963267948966, 3.141592653589793
    iteration.max_iters = 25

Floats are written with ``repr`` so parse -> serialize -> parse is exact.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from .algebraic import KMode, PhaseShiftTriple
from .field import WindowSpec
from .forward import NoiseKind, NoiseSpec
from .iterative import IterationConfig
from .objects import ObjectKind, ObjectRecipe

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "serialize_config", "load_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    object: ObjectRecipe = field(default_factory=ObjectRecipe)
    amplitude_file: Optional[str] = None
    phase_file: Optional[str] = None
    window: WindowSpec = field(default_factory=WindowSpec)
    shifts: PhaseShiftTriple = field(default_factory=PhaseShiftTriple.standard)
    pad_factor: int = 6
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    iteration: IterationConfig = field(default_factory=IterationConfig)
    kmode: KMode = KMode.COMBINED
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if int(self.pad_factor) != self.pad_factor or self.pad_factor < 1:
            raise ConfigError(f"pad_factor must be a positive integer, got {self.pad_factor!r}")
        if (self.amplitude_file is None) != (self.phase_file is None):
            raise ConfigError("object.amplitude_file and object.phase_file must be given together")
        object.__setattr__(self, "kmode", KMode(self.kmode))
        self.shifts.check_distinct()


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    return int(text)


def _parse_optional_float(text: str) -> Optional[float]:
    return None if text.lower() == "none" else float(text)


def _fmt(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, float):
        return repr(v)
    return str(v)


# key -> (section, attribute, parser); section None means a top-level field
_OBJECT_TYPES: dict[str, Callable[[str], Any]] = {
    "kind": ObjectKind,
    "size": _parse_int,
    "phase_range": float,
    "amplitude_min": float,
    "amplitude_contrast": float,
    "smoothness": float,
    "topological_number": _parse_int,
    "vortex_radius": _parse_optional_float,
    "blob_count": _parse_int,
    "blob_radius": float,
    "seed": _parse_int,
}
_SCHEMA: dict[str, tuple[Optional[str], str, Callable[[str], Any]]] = {
    **{f"object.{k}": ("object", k, p) for k, p in _OBJECT_TYPES.items()},
    "object.amplitude_file": (None, "amplitude_file", str),
    "object.phase_file": (None, "phase_file", str),
    "window.width_px": ("window", "width_px", _parse_int),
    "window.height_px": ("window", "height_px", _parse_int),
    "window.dx": ("window", "dx", _parse_int),
    "window.dy": ("window", "dy", _parse_int),
    "shifts": (None, "shifts", PhaseShiftTriple.parse),
    "pad_factor": (None, "pad_factor", _parse_int),
    "noise.kind": ("noise", "kind", NoiseKind),
    "noise.sigma": ("noise", "sigma", float),
    "noise.seed": ("noise", "seed", _parse_int),
    "iteration.max_iters": ("iteration", "max_iters", _parse_int),
    "iteration.self_residual_tol": ("iteration", "self_residual_tol", float),
    "iteration.record_trace": ("iteration", "record_trace", _parse_bool),
    "kmode": (None, "kmode", KMode),
    "output_dir": (None, "output_dir", str),
}


def parse_config(text: str) -> ExperimentConfig:
    sections: dict[str, dict[str, Any]] = {"object": {}, "window": {}, "noise": {}, "iteration": {}}
    top: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        section, attr, parser = _SCHEMA[key]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
        (top if section is None else sections[section])[attr] = parsed

    try:
        win = sections["window"]
        offset = (win.pop("dx", 0), win.pop("dy", 0))
        return ExperimentConfig(
            object=ObjectRecipe(**sections["object"]),
            window=WindowSpec(center_offset=offset, **win),
            noise=NoiseSpec(**sections["noise"]),
            iteration=IterationConfig(**sections["iteration"]),
            **top,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in dataclasses.fields(ObjectRecipe):
        lines.append(f"object.{f.name} = {_fmt(getattr(cfg.object, f.name))}")
    if cfg.amplitude_file is not None:
        lines.append(f"object.amplitude_file = {cfg.amplitude_file}")
        lines.append(f"object.phase_file = {cfg.phase_file}")
    lines += [
        f"window.width_px = {cfg.window.width_px}",
        f"window.height_px = {cfg.window.height_px}",
        f"window.dx = {cfg.window.center_offset[0]}",
        f"window.dy = {cfg.window.center_offset[1]}",
        "shifts = " + ", ".join(repr(float(t)) for t in cfg.shifts.as_tuple()),
        f"pad_factor = {cfg.pad_factor}",
        f"noise.kind = {_fmt(cfg.noise.kind)}",
        f"noise.sigma = {_fmt(float(cfg.noise.sigma))}",
        f"noise.seed = {cfg.noise.seed}",
        f"iteration.max_iters = {cfg.iteration.max_iters}",
        f"iteration.self_residual_tol = {_fmt(float(cfg.iteration.self_residual_tol))}",
        f"iteration.record_trace = {_fmt(cfg.iteration.record_trace)}",
        f"kmode = {_fmt(cfg.kmode)}",
        f"output_dir = {cfg.output_dir}",
    ]
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    """Parse a config file; relative map paths are resolved against its directory."""
    path = Path(path)
    cfg = parse_config(path.read_text())
    if cfg.amplitude_file is not None:
        base = path.parent
        cfg = dataclasses.replace(
            cfg,
            amplitude_file=str(base / cfg.amplitude_file),
            phase_file=str(base / cfg.phase_file),
        )
    return cfg
