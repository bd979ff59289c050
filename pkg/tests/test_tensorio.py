from __future__ import annotations

import struct

import numpy as np
import pytest

from dance.errors import FormatError, IoError, UnsupportedDtype, ValidationError
from dance.tensorio import read_tensor, tensor_dims, write_tensor


def test_round_trip_2x3(tmp_path):
    path = tmp_path / "t.dtf"
    values = np.arange(1, 7, dtype=np.float32).reshape(2, 3)
    write_tensor(path, values)
    out = read_tensor(path)
    assert out.shape == (2, 3)
    assert np.array_equal(out, values)


def test_bad_magic_raises(tmp_path):
    path = tmp_path / "bad.dtf"
    path.write_bytes(b"XXXX" + b"\x01\x01" + struct.pack("<I", 1) + struct.pack("<f", 1.0))
    with pytest.raises(FormatError):
        read_tensor(path)


def test_truncated_payload_raises(tmp_path):
    path = tmp_path / "short.dtf"
    write_tensor(path, np.ones((4, 4), dtype=np.float32))
    data = path.read_bytes()
    path.write_bytes(data[:-5])
    with pytest.raises(FormatError):
        read_tensor(path)


def test_unsupported_dtype_raises(tmp_path):
    path = tmp_path / "dtype.dtf"
    write_tensor(path, np.ones(3, dtype=np.float32))
    data = bytearray(path.read_bytes())
    data[4] = 7
    path.write_bytes(bytes(data))
    with pytest.raises(UnsupportedDtype):
        read_tensor(path)


def test_missing_file_raises(tmp_path):
    with pytest.raises(IoError):
        read_tensor(tmp_path / "nope.dtf")


def test_ndim_limits(tmp_path):
    with pytest.raises(ValidationError):
        write_tensor(tmp_path / "4d.dtf", np.zeros((2, 2, 2, 2), dtype=np.float32))


def test_round_trip_random_tensors_bit_exact(tmp_path):
    # oracle: byte-level comparison of two independent writes of the same data
    rng = np.random.default_rng(7)
    for i in range(100):
        ndim = int(rng.integers(1, 4))
        shape = tuple(int(rng.integers(1, 6)) for _ in range(ndim))
        values = rng.standard_normal(shape).astype(np.float32)
        first = tmp_path / f"a{i}.dtf"
        write_tensor(first, values)
        loaded = read_tensor(first)
        assert loaded.shape == shape
        assert loaded.tobytes() == values.tobytes()
        second = tmp_path / f"b{i}.dtf"
        write_tensor(second, loaded)
        assert first.read_bytes() == second.read_bytes()


def test_tensor_dims_matches_payload(tmp_path):
    path = tmp_path / "dims.dtf"
    write_tensor(path, np.zeros((3, 5), dtype=np.float32))
    assert tensor_dims(path) == (3, 5)
