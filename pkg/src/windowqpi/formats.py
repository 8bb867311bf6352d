"""PFM / 16-bit PGM image files and convergence-trace CSV.

All writers go through :func:`atomic_write_bytes` (temp file in the target
directory, then ``os.replace``) so a reader never sees a half-written file.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .metrics import ConvergenceTrace

__all__ = [
    "atomic_write_bytes",
    "atomic_write_text",
    "write_pfm",
    "read_pfm",
    "write_pgm16",
    "read_pgm16",
    "read_map",
    "write_trace_csv",
    "read_trace_csv",
]

PathLike = Union[str, os.PathLike]
PGM_MAXVAL = 65535


def atomic_write_bytes(path: PathLike, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: PathLike, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _read_header_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    """Pull ``count`` whitespace-separated header tokens; returns them and the payload offset.

    Netpbm allows ``#`` comments in headers; exactly one whitespace byte
    separates the last token from the payload.
    """
    tokens: list[bytes] = []
    i, n = 0, len(buf)
    while len(tokens) < count:
        while i < n and buf[i:i + 1].isspace():
            i += 1
        if i < n and buf[i:i + 1] == b"#":
            while i < n and buf[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not buf[j:j + 1].isspace():
            j += 1
        if j == i:
            raise ValueError("truncated image header")
        tokens.append(buf[i:j])
        i = j
    if i >= n or not buf[i:i + 1].isspace():
        raise ValueError("image header is not terminated by whitespace")
    return tokens, i + 1


def write_pfm(path: PathLike, values) -> None:
    """Write a grayscale little-endian PFM (rows stored bottom to top)."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ValueError(f"PFM writer needs a 2D map, got shape {arr.shape}")
    arr = arr.astype("<f4")
    if not np.isfinite(arr).all():
        raise ValueError("PFM writer refuses non-finite values")
    h, w = arr.shape
    header = f"Pf\n{w} {h}\n-1.0\n".encode("ascii")
    atomic_write_bytes(path, header + np.ascontiguousarray(arr[::-1]).tobytes())


def read_pfm(path: PathLike) -> np.ndarray:
    """Read a grayscale PFM into a float32 array with row 0 at the top."""
    buf = Path(path).read_bytes()
    (magic, w, h, scale), offset = _read_header_tokens(buf, 4)
    if magic != b"Pf":
        raise ValueError(f"{path}: not a grayscale PFM (magic {magic!r})")
    try:
        width, height, s = int(w), int(h), float(scale)
    except ValueError as exc:
        raise ValueError(f"{path}: malformed PFM header") from exc
    if width < 1 or height < 1 or s == 0 or not math.isfinite(s):
        raise ValueError(f"{path}: malformed PFM header ({width}x{height}, scale {s})")
    expected = width * height * 4
    payload = buf[offset:]
    if len(payload) != expected:
        raise ValueError(f"{path}: PFM payload has {len(payload)} bytes, expected {expected}")
    dtype = "<f4" if s < 0 else ">f4"
    arr = np.frombuffer(payload, dtype=dtype).reshape(height, width)[::-1]
    return arr.astype(np.float32)


def _scale_path(path: PathLike) -> Path:
    return Path(str(path) + ".scale")


def write_pgm16(path: PathLike, values, scale: Optional[float] = None) -> float:
    """Write a non-negative map as binary 16-bit PGM plus a ``.scale`` sidecar.

    Samples are ``round(value / scale * 65535)``; ``scale`` defaults to the
    map maximum (1.0 for an all-zero map). Returns the scale used.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"PGM writer needs a 2D map, got shape {arr.shape}")
    if not np.isfinite(arr).all() or (arr < 0).any():
        raise ValueError("PGM16 intensities must be finite and non-negative")
    if scale is None:
        m = float(arr.max())
        scale = m if m > 0 else 1.0
    if not scale > 0:
        raise ValueError(f"PGM16 scale must be > 0, got {scale!r}")
    samples = np.clip(np.rint(arr / scale * PGM_MAXVAL), 0, PGM_MAXVAL).astype(">u2")
    h, w = arr.shape
    header = f"P5\n{w} {h}\n{PGM_MAXVAL}\n".encode("ascii")
    atomic_write_bytes(path, header + samples.tobytes())
    atomic_write_text(_scale_path(path), f"scale={scale!r}\n")
    return scale


def read_pgm16(path: PathLike, scale: Optional[float] = None) -> np.ndarray:
    """Read a 16-bit PGM back into intensity units.

    ``scale`` defaults to the sidecar value, or 1.0 when no sidecar exists.
    """
    buf = Path(path).read_bytes()
    (magic, w, h, maxval), offset = _read_header_tokens(buf, 4)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    width, height, mv = int(w), int(h), int(maxval)
    if mv != PGM_MAXVAL:
        raise ValueError(f"{path}: PGM maxval is {mv}, expected {PGM_MAXVAL}")
    expected = width * height * 2
    payload = buf[offset:offset + expected]
    if len(payload) != expected:
        raise ValueError(f"{path}: truncated PGM payload ({len(payload)} of {expected} bytes)")
    samples = np.frombuffer(payload, dtype=">u2").reshape(height, width)
    if scale is None:
        side = _scale_path(path)
        scale = 1.0
        if side.exists():
            for line in side.read_text().splitlines():
                key, _, val = line.partition("=")
                if key.strip() == "scale":
                    scale = float(val)
    return samples.astype(float) * (scale / PGM_MAXVAL)


def read_map(path: PathLike) -> np.ndarray:
    """Load a real map from ``.pfm`` or ``.pgm`` by extension, as float64."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pfm":
        return read_pfm(path).astype(float)
    if suffix == ".pgm":
        return read_pgm16(path)
    raise ValueError(f"{path}: unsupported map format {suffix!r} (expected .pfm or .pgm)")


def _fmt(v: Optional[float]) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v))


def write_trace_csv(trace: ConvergenceTrace, path: PathLike) -> None:
    """``iter,rms,self_residual,ratio`` rows, then ``# p=`` and ``# r=`` comment lines."""
    n = max(len(trace.rms), len(trace.self_residual))
    lines = ["iter,rms,self_residual,ratio"]
    for k in range(n):
        rms = trace.rms[k] if k < len(trace.rms) else None
        res = trace.self_residual[k] if k < len(trace.self_residual) else None
        ratio = None
        if 0 < k < len(trace.rms) and trace.rms[k - 1] != 0:
            ratio = trace.rms[k] / trace.rms[k - 1]
        lines.append(f"{k},{_fmt(rms)},{_fmt(res)},{_fmt(ratio)}")
    lines.append(f"# p={_fmt(trace.fitted_p) or 'nan'}")
    lines.append(f"# r={_fmt(trace.fitted_r) or 'nan'}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_trace_csv(path: PathLike) -> ConvergenceTrace:
    trace = ConvergenceTrace()
    rows = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or rows[0].strip() != "iter,rms,self_residual,ratio":
        raise ValueError(f"{path}: not a trace CSV (bad header)")
    for ln in rows[1:]:
        if ln.startswith("#"):
            key, _, val = ln[1:].strip().partition("=")
            if key in ("p", "r") and val and val != "nan":
                setattr(trace, f"fitted_{key}", float(val))
            continue
        cells = ln.split(",")
        if len(cells) != 4:
            raise ValueError(f"{path}: malformed trace row {ln!r}")
        if cells[1]:
            trace.rms.append(float(cells[1]))
        trace.self_residual.append(float(cells[2]) if cells[2] else float("nan"))
    return trace
