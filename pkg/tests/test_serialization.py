import json
from fractions import Fraction

import numpy as np
import pytest

from trace_convexity.errors import DomainError
from trace_convexity.serialization import (
    decode_matrix,
    encode_matrix,
    format_float,
    to_jsonable,
)


class TestEncoding:
    def test_matrix_is_bit_exact(self):
        m = np.array([[0.1 + 0.2j, 1.0 / 3.0], [np.pi, -2.5e-300j]])
        decoded = decode_matrix(json.loads(json.dumps(encode_matrix(m))))
        assert np.array_equal(decoded, m)

    def test_vectors_become_columns(self):
        assert encode_matrix(np.array([1.0, 2.0]))["shape"] == [2, 1]

    def test_unknown_encoding(self):
        with pytest.raises(DomainError):
            decode_matrix({"encoding": "base64", "shape": [1, 1], "real": [], "imag": []})

    def test_shape_mismatch(self):
        data = encode_matrix(np.eye(2))
        data["shape"] = [3, 3]
        with pytest.raises(DomainError):
            decode_matrix(data)

    def test_format_float(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert float(format_float(2.0 / 3.0)) == 2.0 / 3.0

    def test_to_jsonable(self):
        payload = to_jsonable(
            {
                "fraction": Fraction(2, 3),
                "inf": float("inf"),
                "flag": np.bool_(True),
                "count": np.int64(3),
                "value": np.float64(0.5),
                "matrix": np.eye(1),
                1: (1, 2),
            }
        )
        assert payload["fraction"] == "2/3"
        assert payload["inf"] == "inf"
        assert payload["flag"] is True
        assert payload["count"] == 3
        assert payload["matrix"]["encoding"] == "hex-float"
        assert payload["1"] == [1, 2]
        json.dumps(payload)
