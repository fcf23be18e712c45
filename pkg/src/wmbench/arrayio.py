"""Flat binary array files (WMF1) and the versioned checkpoint container.

WMF1 layout: magic b"WMF1", dtype code (1 byte), rank (1 byte), one u32
little-endian per dimension, then the row-major payload.

Checkpoint layout: magic b"WMCK1", u32 header length, UTF-8 JSON header
(the versioned architecture descriptor), u32 array count, then per array
a u16 name length, the UTF-8 name, a u64 blob length and a WMF1 blob.
"""

from __future__ import annotations

import io
import json
import struct
from typing import Any, BinaryIO

import numpy as np

from .errors import InvalidArgument

ARRAY_MAGIC = b"WMF1"
CHECKPOINT_MAGIC = b"WMCK1"
CHECKPOINT_VERSION = 1

_DTYPE_CODES = {
    np.dtype(np.float32): 1,
    np.dtype(np.float64): 2,
    np.dtype(np.bool_): 3,
    np.dtype(np.complex64): 4,
}
_CODE_DTYPES = {code: dt for dt, code in _DTYPE_CODES.items()}


def write_array(fh: BinaryIO, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(arr)
    if arr.dtype == np.complex128:
        arr = arr.astype(np.complex64)
    if arr.dtype not in _DTYPE_CODES:
        raise InvalidArgument(f"unsupported array dtype {arr.dtype}; "
                              "use f32, f64, bool or c64")
    if arr.ndim > 255:
        raise InvalidArgument("array rank exceeds format limit")
    fh.write(ARRAY_MAGIC)
    fh.write(struct.pack("<BB", _DTYPE_CODES[arr.dtype], arr.ndim))
    for dim in arr.shape:
        fh.write(struct.pack("<I", dim))
    fh.write(arr.astype(arr.dtype.newbyteorder("<")).tobytes())


def read_array(fh: BinaryIO) -> np.ndarray:
    magic = fh.read(4)
    if magic != ARRAY_MAGIC:
        raise InvalidArgument(f"bad array magic {magic!r}")
    code, rank = struct.unpack("<BB", fh.read(2))
    if code not in _CODE_DTYPES:
        raise InvalidArgument(f"unknown dtype code {code}")
    shape = tuple(struct.unpack("<I", fh.read(4))[0] for _ in range(rank))
    dtype = _CODE_DTYPES[code]
    count = int(np.prod(shape, dtype=np.int64)) if shape else 1
    payload = fh.read(count * dtype.itemsize)
    if len(payload) != count * dtype.itemsize:
        raise InvalidArgument("truncated array payload")
    arr = np.frombuffer(payload, dtype=dtype.newbyteorder("<")).astype(dtype)
    return arr.reshape(shape)


def save_array(path, arr: np.ndarray) -> None:
    with open(path, "wb") as fh:
        write_array(fh, arr)


def load_array(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_array(fh)


def array_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    write_array(buf, arr)
    return buf.getvalue()


def save_checkpoint(path, kind: str, descriptor: dict[str, Any],
                    arrays: dict[str, np.ndarray]) -> None:
    """Write a named-array checkpoint with a JSON architecture header."""
    header = {
        "format": "wmck",
        "version": CHECKPOINT_VERSION,
        "kind": kind,
        "descriptor": descriptor,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(struct.pack("<I", len(arrays)))
        for name in sorted(arrays):
            name_bytes = name.encode("utf-8")
            blob = array_bytes(arrays[name])
            fh.write(struct.pack("<H", len(name_bytes)))
            fh.write(name_bytes)
            fh.write(struct.pack("<Q", len(blob)))
            fh.write(blob)


def load_checkpoint(path) -> tuple[str, dict[str, Any], dict[str, np.ndarray]]:
    """Read a checkpoint; returns (kind, descriptor, arrays)."""
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != CHECKPOINT_MAGIC:
            raise InvalidArgument(f"bad checkpoint magic {magic!r}")
        (header_len,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        if header.get("format") != "wmck":
            raise InvalidArgument("not a wmck checkpoint")
        if header.get("version") != CHECKPOINT_VERSION:
            raise InvalidArgument(f"unsupported checkpoint version "
                                  f"{header.get('version')}")
        (n_arrays,) = struct.unpack("<I", fh.read(4))
        arrays = {}
        for _ in range(n_arrays):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            (blob_len,) = struct.unpack("<Q", fh.read(8))
            arrays[name] = read_array(io.BytesIO(fh.read(blob_len)))
        return header["kind"], header["descriptor"], arrays
