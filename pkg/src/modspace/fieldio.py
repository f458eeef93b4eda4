"""Binary field files.

Layout (little-endian)::

    offset  size  content
    0       6     magic b"MSFLD1"
    6       4     u32 dim
    10      4     u32 N
    14      8     f64 h
    22      16*N^dim  complex samples as interleaved f64 (re, im), row-major, axis 0 slowest
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .lattice import GridSpec, SampledField

MAGIC = b"MSFLD1"
HEADER = struct.Struct("<6sIId")
HEADER_SIZE = HEADER.size  # 22


class FieldFormatError(ValueError):
    pass


def encode_field(field: SampledField) -> bytes:
    spec = field.spec
    head = HEADER.pack(MAGIC, spec.dim, spec.n, spec.step)
    return head + np.ascontiguousarray(field.values, dtype="<c16").tobytes()


def decode_field(data: bytes) -> SampledField:
    if len(data) < HEADER_SIZE:
        raise FieldFormatError(f"file too short for a header ({len(data)} bytes)")
    magic, dim, n, h = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FieldFormatError(f"bad magic {magic!r}")
    try:
        spec = GridSpec(dim, n, h)
    except ValueError as exc:
        raise FieldFormatError(f"invalid grid header: {exc}") from exc
    expected = HEADER_SIZE + 16 * n ** dim
    if len(data) != expected:
        raise FieldFormatError(f"expected {expected} bytes, got {len(data)}")
    values = np.frombuffer(data, dtype="<c16", offset=HEADER_SIZE).reshape(spec.shape)
    try:
        return SampledField(spec, values.astype(complex))
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc


def write_field(path, field: SampledField) -> None:
    Path(path).write_bytes(encode_field(field))


def read_field(path) -> SampledField:
    return decode_field(Path(path).read_bytes())
