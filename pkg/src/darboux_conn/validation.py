"""Input coercion helpers used at module boundaries."""

from __future__ import annotations

import cmath
import numbers
from typing import Any, Sequence

import numpy as np

from .errors import InvalidInput, NonFiniteValue


def as_complex(value: Any, name: str = "value") -> complex:
    """Coerce a scalar to a finite Python complex."""
    if isinstance(value, (bool, np.bool_)):
        raise InvalidInput(f"{name}: boolean is not a number")
    if isinstance(value, numbers.Number):
        z = complex(value)
    elif isinstance(value, np.generic) and np.ndim(value) == 0:
        z = complex(value.item())
    else:
        raise InvalidInput(f"{name}: expected a complex scalar, got {type(value).__name__}")
    if not (cmath.isfinite(z)):
        raise NonFiniteValue(f"{name}: non-finite value {z!r}")
    return z


def complex_from_pair(pair: Any, name: str = "value") -> complex:
    """Decode the ``[re, im]`` wire format."""
    if not isinstance(pair, Sequence) or isinstance(pair, str) or len(pair) != 2:
        raise InvalidInput(f"{name}: expected [re, im], got {pair!r}")
    re, im = pair
    for part in (re, im):
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise InvalidInput(f"{name}: components must be real numbers, got {pair!r}")
    return as_complex(complex(float(re), float(im)), name)


def complex_to_pair(z: complex) -> list[float]:
    """Encode a complex number as ``[re, im]``."""
    z = complex(z)
    return [float(z.real), float(z.imag)]


def as_complex_vector(values: Any, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce a sequence to a finite 1-D complex array of optional fixed length."""
    try:
        arr = np.asarray(values, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name}: cannot convert to complex array") from exc
    if arr.ndim != 1:
        raise InvalidInput(f"{name}: expected 1-D data, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise InvalidInput(f"{name}: expected length {length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name}: contains non-finite entries")
    return arr


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise InvalidInput(f"{name} must be a positive finite number, got {value}")
    return value
