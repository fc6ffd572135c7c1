import io
import struct

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from stationary_spde.spdg import (
    MAGIC,
    SPDGError,
    decode_spdg,
    encode_spdg,
    format_float,
    read_csv,
    read_spdg,
    write_csv,
    write_spdg,
)


def test_header_layout():
    data = encode_spdg(np.arange(6.0).reshape(2, 3), (0.5, 0.25))
    assert data[:4] == b"\x53\x50\x44\x47" == MAGIC
    assert struct.unpack_from("<IB", data, 4) == (1, 2)
    assert struct.unpack_from("<QdQd", data, 9) == (2, 0.5, 3, 0.25)
    # last axis fastest
    assert struct.unpack_from("<6d", data, 41) == (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    assert len(data) == 41 + 48


def test_file_round_trip_is_exact(tmp_path):
    values = np.random.default_rng(0).standard_normal((4, 5, 3)) * 1e-300
    path = tmp_path / "g.spdg"
    write_spdg(path, values, (0.1, 0.2, 0.3))
    g = read_spdg(path)
    assert g.sizes == (4, 5, 3) and g.spacings == (0.1, 0.2, 0.3)
    assert_array_equal(g.values, values)


def test_bad_magic_and_truncation():
    data = encode_spdg(np.zeros(3), (1.0,))
    with pytest.raises(SPDGError):
        decode_spdg(b"XXXX" + data[4:])
    with pytest.raises(SPDGError):
        decode_spdg(data[:-1])
    with pytest.raises(SPDGError):
        decode_spdg(data[:12])
    bumped = data[:4] + struct.pack("<I", 2) + data[8:]
    with pytest.raises(SPDGError):
        decode_spdg(bumped)


def test_spacing_count_must_match():
    with pytest.raises(SPDGError):
        encode_spdg(np.zeros((2, 2)), (1.0,))


def test_float_format_round_trips():
    for x in (0.1, 1 / 3, 2.0 ** -1074, 1e308, -0.0, 12345.678):
        assert float(format_float(x)) == x
    assert format_float(0.1) == "0.1"


def test_csv_round_trip_is_exact():
    axes = [np.array([-0.2, 0.0, 0.2]), np.array([-1 / 3, 1 / 3])]
    values = np.random.default_rng(1).standard_normal((3, 2))
    valid = np.array([[True, False], [True, True], [False, True]])
    buf = io.StringIO()
    write_csv(buf, axes, values, valid, ["h1", "h2"])
    text = buf.getvalue()
    assert text.splitlines()[0] == "h1,h2,value,valid"
    back_axes, back_values, back_valid, names = read_csv(text)
    assert names == ["h1", "h2"]
    for a, b in zip(axes, back_axes):
        assert_array_equal(a, b)
    assert_array_equal(back_values, values)
    assert_array_equal(back_valid, valid)


def test_empty_csv_rejected():
    with pytest.raises(SPDGError):
        read_csv("")
