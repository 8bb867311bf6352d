"""Command-line entry points: genobject, simulate, recover, analyze, background, resolution."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .algebraic import KMode, PhaseShiftTriple
from .config import ExperimentConfig, load_config, serialize_config
from .field import WindowSpec
from .forward import ObjectSpec, simulate_triple, window_energy_fraction
from .formats import (
    atomic_write_text,
    read_map,
    read_pfm,
    read_trace_csv,
    write_pfm,
    write_pgm16,
    write_trace_csv,
)
from .iterative import IterationConfig, recover
from .metrics import background_eliminate, estimate_convergence, theoretical_resolution
from .objects import ObjectKind, ObjectRecipe, generate

log = logging.getLogger("windowqpi")

_WINDOW_RE = re.compile(r"^(\d+)x(\d+)(?:([+-]\d+)([+-]\d+))?$")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one-line diagnostics
        self.exit(2, f"{self.prog}: error: {message}\n")


def parse_window(text: str) -> WindowSpec:
    """``WxH`` or ``WxH+dx+dy`` (offsets may be negative, e.g. ``7x7-2+3``)."""
    m = _WINDOW_RE.match(text.strip())
    if not m:
        raise ValueError(f"window must look like WxH or WxH+dx+dy, got {text!r}")
    w, h, dx, dy = m.groups()
    return WindowSpec(int(w), int(h), (int(dx or 0), int(dy or 0)))


def _object_from_config(cfg: ExperimentConfig) -> ObjectSpec:
    if cfg.amplitude_file is not None:
        amp = read_map(cfg.amplitude_file)
        phase = read_map(cfg.phase_file)
        return ObjectSpec(amp, phase, None, cfg.pad_factor)
    return generate(cfg.object, cfg.pad_factor)


def cmd_genobject(args) -> int:
    if args.config:
        recipe = load_config(args.config).object
    else:
        recipe = ObjectRecipe(
            kind=ObjectKind(args.kind),
            size=args.size,
            phase_range=args.phase_range,
            amplitude_min=args.amplitude_min,
            amplitude_contrast=args.contrast,
            smoothness=args.smoothness,
            topological_number=args.m,
            vortex_radius=args.vortex_radius,
            blob_count=args.blob_count,
            blob_radius=args.blob_radius,
            seed=args.seed,
        )
    obj = generate(recipe)
    out = Path(args.out)
    write_pfm(out / "amplitude.pfm", obj.amplitude)
    write_pfm(out / "phase.pfm", obj.phase)
    print(f"wrote {out / 'amplitude.pfm'} and {out / 'phase.pfm'}")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.out:
        cfg = dataclasses.replace(cfg, output_dir=args.out)
    obj = _object_from_config(cfg)
    out = Path(cfg.output_dir)
    intensities = simulate_triple(obj, cfg.window, cfg.shifts, cfg.noise)
    for k, I in enumerate(intensities, 1):
        write_pgm16(out / f"I{k}.pgm", I)
    write_pfm(out / "truth_amplitude.pfm", obj.amplitude)
    write_pfm(out / "truth_phase.pfm", obj.phase)
    atomic_write_text(out / "config.txt", serialize_config(cfg))
    frac = window_energy_fraction(obj, cfg.window)
    meta = [
        f"shape = {obj.shape[1]}x{obj.shape[0]}",
        f"padded_shape = {obj.padded_shape[1]}x{obj.padded_shape[0]}",
        "shifts = " + ", ".join(repr(t) for t in cfg.shifts.as_tuple()),
        f"window = {cfg.window.width_px}x{cfg.window.height_px}"
        f"{cfg.window.center_offset[0]:+d}{cfg.window.center_offset[1]:+d}",
        f"window_energy_fraction = {frac!r}",
    ]
    atomic_write_text(out / "metadata.txt", "\n".join(meta) + "\n")
    print(f"wrote I1.pgm, I2.pgm, I3.pgm to {out} (window carries {frac:.1%} of spectral energy)")
    return 0


def cmd_recover(args) -> int:
    shifts = PhaseShiftTriple.parse(args.shifts)
    shifts.check_distinct()
    window = parse_window(args.window)
    I1, I2, I3 = (read_map(p) for p in (args.i1, args.i2, args.i3))
    truth = read_map(args.truth) if args.truth else None
    illum = read_map(args.illumination) if args.illumination else None
    cfg = IterationConfig(max_iters=args.iters, self_residual_tol=args.tol)
    res = recover(
        I1, I2, I3, shifts, window,
        pad_factor=args.pad, kmode=KMode(args.kmode), cfg=cfg,
        illumination=illum, ground_truth=truth,
    )
    out = Path(args.out)
    write_pfm(out / "amplitude.pfm", res.amplitude)
    write_pfm(out / "phase.pfm", res.phase)
    write_trace_csv(res.trace, out / "trace.csv")
    summary = [f"iterations_run = {res.iterations_run}", f"diverged = {str(res.diverged).lower()}"]
    summary += [f"clamped.{k} = {v}" for k, v in res.clamp_counts.items()]
    if res.trace.rms:
        summary += [f"rms_initial = {res.trace.rms[0]!r}", f"rms_final = {res.trace.rms[-1]!r}"]
    atomic_write_text(out / "summary.txt", "\n".join(summary) + "\n")
    msg = f"recovered in {res.iterations_run} iterations"
    if res.trace.rms:
        msg += f"; phase RMS {res.trace.rms[0]:.4g} -> {res.trace.rms[-1]:.4g}"
    print(msg)
    return 0


def cmd_analyze(args) -> int:
    trace = read_trace_csv(args.trace)
    p, r = estimate_convergence(trace.rms, skip=args.skip)
    text = f"p = {p!r}\nr = {r!r}\n"
    out = Path(args.out) if args.out else Path(args.trace).with_suffix(".fit.txt")
    atomic_write_text(out, text)
    print(f"p = {p:.6g}\nr = {r:.6g}")
    return 0


class _Loaded:
    def __init__(self, directory: Path):
        self.amplitude = read_pfm(directory / "amplitude.pfm").astype(float)
        self.phase = read_pfm(directory / "phase.pfm").astype(float)


def cmd_background(args) -> int:
    obj = _Loaded(Path(args.object))
    bg = _Loaded(Path(args.background))
    corrected = background_eliminate(obj, bg, threshold=args.threshold)
    out = Path(args.out)
    write_pfm(out / "amplitude.pfm", corrected.amplitude)
    write_pfm(out / "phase.pfm", corrected.phase)
    n_low = int(np.count_nonzero(corrected.low_background))
    print(f"wrote corrected maps to {out} ({n_low} low-background pixels)")
    return 0


def cmd_resolution(args) -> int:
    d = theoretical_resolution(args.beam_d, args.focal, args.wavelength)
    print(f"{d:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="windowqpi", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("genobject", help="generate a synthetic object as amplitude/phase PFMs")
    g.add_argument("--config")
    g.add_argument("--kind", default="complex_structured", choices=[k.value for k in ObjectKind])
    g.add_argument("--size", type=int, default=256)
    g.add_argument("--phase-range", type=float, default=4.0)
    g.add_argument("--amplitude-min", type=float, default=0.01)
    g.add_argument("--contrast", type=float, default=100.0)
    g.add_argument("--smoothness", type=float, default=8.0)
    g.add_argument("--m", type=int, default=16, help="vortex topological number")
    g.add_argument("--vortex-radius", type=float, help="confine the vortex to a disk of this radius (pixels)")
    g.add_argument("--blob-count", type=int, default=12)
    g.add_argument("--blob-radius", type=float, default=12.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_genobject)

    s = sub.add_parser("simulate", help="simulate the three modulated intensities")
    s.add_argument("--config")
    s.add_argument("--out", help="overrides output_dir from the config")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("recover", help="recover amplitude and phase from three intensities")
    r.add_argument("--i1", required=True)
    r.add_argument("--i2", required=True)
    r.add_argument("--i3", required=True)
    r.add_argument("--shifts", default="0,1.5707963267948966,3.141592653589793")
    r.add_argument("--window", default="7x7")
    r.add_argument("--pad", type=int, default=6)
    r.add_argument("--kmode", choices=[k.value for k in KMode], default="combined")
    r.add_argument("--iters", type=int, default=25)
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--truth", help="ground-truth phase map for the RMS trace")
    r.add_argument("--illumination", help="illumination amplitude map B")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_recover)

    a = sub.add_parser("analyze", help="fit convergence order and rate to a trace CSV")
    a.add_argument("trace")
    a.add_argument("--skip", type=int, default=2)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("background", help="remove a calibration frame from a recovery")
    b.add_argument("--object", required=True)
    b.add_argument("--background", required=True)
    b.add_argument("--threshold", type=float, default=1e-6)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_background)

    res = sub.add_parser("resolution", help="diffraction-limited resolution in meters")
    res.add_argument("--beam-d", type=float, required=True)
    res.add_argument("--focal", type=float, required=True)
    res.add_argument("--lambda", dest="wavelength", type=float, required=True)
    res.set_defaults(func=cmd_resolution)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        msg = " ".join(str(exc).split())
        print(f"windowqpi {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
