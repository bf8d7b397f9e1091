"""Binary checkpoints.

Layout (little endian): 8-byte magic ``TDKSIM01``, two u64 dims
(n_modes, n_y), seven f64 scalars (t, tau, eps, delta, r, L_x, y_max),
interleaved re/im f64 for wbar (mode-major) then A, and a CRC32 of
everything before it as u32.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import CorruptCheckpointError

MAGIC = b"TDKSIM01"
_HEAD = struct.Struct("<8sQQ7d")


@dataclass
class Checkpoint:
    wbar: np.ndarray
    A: np.ndarray
    t: float
    tau: float
    eps: float
    delta: float
    r: float
    L_x: float
    y_max: float

    @property
    def n_modes(self) -> int:
        return self.wbar.shape[0]

    @property
    def n_y(self) -> int:
        return self.wbar.shape[1]


def _interleave(z: np.ndarray) -> bytes:
    z = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    out = np.empty(2 * z.size, dtype="<f8")
    out[0::2] = z.real
    out[1::2] = z.imag
    return out.tobytes()


def to_bytes(ck: Checkpoint) -> bytes:
    n, ny = ck.wbar.shape
    if ck.A.shape != (n,):
        raise ValueError("A must have one entry per mode")
    body = _HEAD.pack(MAGIC, n, ny, ck.t, ck.tau, ck.eps, ck.delta, ck.r, ck.L_x, ck.y_max)
    body += _interleave(ck.wbar) + _interleave(ck.A)
    return body + struct.pack("<I", zlib.crc32(body))


def from_bytes(data: bytes) -> Checkpoint:
    if len(data) < _HEAD.size + 4:
        raise CorruptCheckpointError("checkpoint truncated")
    magic, n, ny, *scalars = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise CorruptCheckpointError("bad checkpoint magic")
    expected = _HEAD.size + 16 * (n * ny + n) + 4
    if len(data) != expected:
        raise CorruptCheckpointError(f"checkpoint length {len(data)} != {expected}")
    (crc,) = struct.unpack_from("<I", data, expected - 4)
    if crc != zlib.crc32(data[: expected - 4]):
        raise CorruptCheckpointError("checkpoint CRC mismatch")
    flat = np.frombuffer(data, dtype="<f8", offset=_HEAD.size, count=2 * (n * ny + n))
    z = flat[0::2] + 1j * flat[1::2]
    return Checkpoint(z[: n * ny].reshape(n, ny).copy(), z[n * ny:].copy(), *scalars)


def write(path, ck: Checkpoint) -> None:
    with open(path, "wb") as fh:
        fh.write(to_bytes(ck))


def read(path) -> Checkpoint:
    with open(path, "rb") as fh:
        return from_bytes(fh.read())
