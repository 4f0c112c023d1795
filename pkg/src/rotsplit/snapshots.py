"""Binary wavefunction snapshots for references and regression baselines.

Layout (all little-endian): 8-byte magic ``ROTSNAP1``, uint32 nx, uint32 ny,
float64 L, float64 time, uint32 comment length, ASCII comment, then
nx*ny interleaved re/im float64 pairs in row-major (x-major) order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .spectral import GridSpec, WaveFunction

MAGIC = b"ROTSNAP1"

__all__ = ["write_snapshot", "read_snapshot", "MAGIC"]


def write_snapshot(path, psi: WaveFunction, time: float, comment: str = "") -> None:
    """Write psi (coordinate space) with its grid metadata and a comment block."""
    cbytes = comment.encode("ascii")
    g = psi.grid
    header = MAGIC + struct.pack("<IIddI", g.nx, g.ny, g.L, time, len(cbytes)) + cbytes
    inter = np.empty((g.nx, g.ny, 2), dtype="<f8")
    inter[..., 0] = psi.values.real
    inter[..., 1] = psi.values.imag
    Path(path).write_bytes(header + inter.tobytes())


def read_snapshot(path, grid: GridSpec | None = None):
    """Read a snapshot; returns (WaveFunction, time, comment).

    When ``grid`` is given its geometry must match the stored one and the
    returned wavefunction shares it (so FFT counters stay in one place).
    """
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path}: not a wavefunction snapshot (bad magic)")
    nx, ny, L, time, clen = struct.unpack_from("<IIddI", raw, 8)
    off = 8 + struct.calcsize("<IIddI")
    comment = raw[off:off + clen].decode("ascii")
    off += clen
    expected = off + nx * ny * 16
    if len(raw) != expected:
        raise ValueError(f"{path}: truncated snapshot ({len(raw)} bytes, want {expected})")
    inter = np.frombuffer(raw[off:], dtype="<f8").reshape(nx, ny, 2)
    values = inter[..., 0] + 1j * inter[..., 1]
    if grid is None:
        grid = GridSpec(L=L, nx=nx, ny=ny)
    elif (grid.nx, grid.ny) != (nx, ny) or grid.L != L:
        raise ValueError(
            f"{path}: snapshot grid ({nx}, {ny}, L={L}) does not match "
            f"({grid.nx}, {grid.ny}, L={grid.L})")
    return WaveFunction(values, grid), time, comment
