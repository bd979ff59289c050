"""Reader/writer for the DTF1 dense tensor container.

Layout, all little-endian:

    bytes 0..3   magic  b"DTF1"
    byte  4      dtype code (1 = float32)
    byte  5      ndim (1, 2 or 3)
    next  4*ndim dims as u32
    rest         payload, row-major float32
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError, IoError, UnsupportedDtype, ValidationError

MAGIC = b"DTF1"
DTYPE_FLOAT32 = 1

_MAX_NDIM = 3


def write_tensor(path: str | Path, values: np.ndarray) -> None:
    """Write *values* to *path* as a DTF1 file (stored as float32)."""
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim < 1 or arr.ndim > _MAX_NDIM:
        raise ValidationError(f"DTF1 supports 1..{_MAX_NDIM} dims, got shape {arr.shape}")
    header = MAGIC + struct.pack("<BB", DTYPE_FLOAT32, arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())


def read_tensor(path: str | Path) -> np.ndarray:
    """Read a DTF1 file and return its float32 array.

    Raises:
        IoError: file does not exist.
        FormatError: bad magic, bad ndim, or truncated payload.
        UnsupportedDtype: dtype code other than 1.
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"tensor file not found: {path}")
    data = path.read_bytes()
    if len(data) < 6 or data[:4] != MAGIC:
        raise FormatError(f"{path}: not a DTF1 file (bad magic)")
    dtype_code, ndim = struct.unpack_from("<BB", data, 4)
    if dtype_code != DTYPE_FLOAT32:
        raise UnsupportedDtype(f"{path}: unsupported dtype code {dtype_code}")
    if ndim < 1 or ndim > _MAX_NDIM:
        raise FormatError(f"{path}: ndim {ndim} outside 1..{_MAX_NDIM}")
    header_end = 6 + 4 * ndim
    if len(data) < header_end:
        raise FormatError(f"{path}: truncated dimension header")
    dims = struct.unpack_from(f"<{ndim}I", data, 6)
    expected = int(np.prod(dims)) * 4
    payload = data[header_end:]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected} for dims {dims}"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(dims).copy()


def tensor_dims(path: str | Path) -> tuple[int, ...]:
    """Read only the header of a DTF1 file and return its dims.

    Cheap dimension probe for manifest validation; raises the same errors
    as read_tensor for a malformed header.
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"tensor file not found: {path}")
    with open(path, "rb") as fh:
        head = fh.read(6 + 4 * _MAX_NDIM)
    if len(head) < 6 or head[:4] != MAGIC:
        raise FormatError(f"{path}: not a DTF1 file (bad magic)")
    dtype_code, ndim = struct.unpack_from("<BB", head, 4)
    if dtype_code != DTYPE_FLOAT32:
        raise UnsupportedDtype(f"{path}: unsupported dtype code {dtype_code}")
    if ndim < 1 or ndim > _MAX_NDIM:
        raise FormatError(f"{path}: ndim {ndim} outside 1..{_MAX_NDIM}")
    if len(head) < 6 + 4 * ndim:
        raise FormatError(f"{path}: truncated dimension header")
    return struct.unpack_from(f"<{ndim}I", head, 6)
