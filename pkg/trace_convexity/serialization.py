"""
Number and matrix encodings for reports and witnesses.

Floats in CSV/JSON output use 17 significant digits, which round-trips any
double. Matrices are stored as hex floats so that witnesses replay bit for bit.
"""

from fractions import Fraction
from typing import Any, Dict, Union

import numpy as np

from .errors import DomainError

MATRIX_ENCODING = "hex-float"


def format_float(value: Union[float, int, Fraction]) -> str:
    """Shortest-safe decimal with 17 significant digits"""
    return "{:.17g}".format(float(value))


def encode_matrix(m: np.ndarray) -> Dict[str, Any]:
    """Complex matrix -> {"shape", "real", "imag"} with hex-float entries"""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return {
        "encoding": MATRIX_ENCODING,
        "shape": list(arr.shape),
        "real": [[float(x).hex() for x in row] for row in arr.real],
        "imag": [[float(x).hex() for x in row] for row in arr.imag],
    }


def decode_matrix(data: Dict[str, Any]) -> np.ndarray:
    if data.get("encoding") != MATRIX_ENCODING:
        raise DomainError(f"Unsupported matrix encoding: {data.get('encoding')!r}")
    shape = tuple(data["shape"])
    real = np.array([[float.fromhex(x) for x in row] for row in data["real"]], dtype=float)
    imag = np.array([[float.fromhex(x) for x in row] for row in data["imag"]], dtype=float)
    if real.shape != shape or imag.shape != shape:
        raise DomainError(f"Matrix payload does not match its declared shape {shape}")
    return real + 1j * imag


def to_jsonable(value: Any) -> Any:
    """
    Recursively convert report payloads into JSON-compatible values.

    numpy arrays become hex-float matrices, numpy scalars become Python
    numbers, Fractions become "a/b" strings and infinities become strings.
    """
    if isinstance(value, np.ndarray):
        return encode_matrix(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            return str(value)
        return value
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value
