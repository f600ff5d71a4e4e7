import numpy as np
import pytest

from mmgbsm.tensorio import (
    MAGIC,
    read_csv,
    read_tensor,
    read_tensor_header,
    write_csv,
    write_tensor,
)


@pytest.mark.parametrize("dtype", ["complex64", "complex128"])
def test_tensor_roundtrip(tmp_path, dtype):
    rng = np.random.default_rng(0)
    gains = (rng.standard_normal((2, 3, 4)) + 1j * rng.standard_normal((2, 3, 4)))
    path = tmp_path / "t.bin"
    write_tensor(path, gains, {"seed": 7, "delays_s": [0.0, 1e-7]}, dtype=dtype)
    back, header = read_tensor(path)
    assert header["dtype"] == dtype
    assert header["shape"] == [2, 3, 4]
    assert header["seed"] == 7
    rtol = 1e-6 if dtype == "complex64" else 1e-15
    assert np.allclose(back, gains, rtol=rtol)
    assert read_tensor_header(path) == header


def test_tensor_layout(tmp_path):
    path = tmp_path / "t.bin"
    write_tensor(path, np.zeros((1, 1), dtype=complex), {}, dtype="complex64")
    blob = path.read_bytes()
    assert blob[:8] == MAGIC
    length = int.from_bytes(blob[8:16], "little")
    import json

    header = json.loads(blob[16 : 16 + length])
    assert header["schema_version"] == 1
    assert len(blob) == 16 + length + 8  # one complex64 payload element


def test_tensor_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTMAGIC" + b"\0" * 16)
    with pytest.raises(ValueError, match="bad magic"):
        read_tensor(path)


def test_tensor_rejects_unknown_dtype(tmp_path):
    with pytest.raises(ValueError, match="dtype"):
        write_tensor(tmp_path / "t.bin", np.zeros(1, dtype=complex), {}, dtype="float32")


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "x.csv"
    write_csv(
        path,
        {"seed": 1, "estimator": "analytic"},
        ["a", "b"],
        [[1, 2.5], [3, -4.0]],
    )
    comments, columns, rows = read_csv(path)
    assert comments["schema_version"] == "1"
    assert comments["seed"] == "1"
    assert columns == ["a", "b"]
    assert rows == [["1", "2.5"], ["3", "-4.0"]]
