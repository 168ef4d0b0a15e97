"""Truncated Laurent series, residues and small dense linear solves.

All scalars are double-precision complex numbers. A :class:`LaurentSeries`
stores the coefficients of ``z**k`` for ``k`` from ``lowest_order`` up to and
including ``truncation_order``; higher coefficients are unknown, not zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NearSingular, NonFiniteValue, SeriesError
from .validation import as_complex

__all__ = [
    "DEFAULT_WINDOW",
    "SINGULARITY_THRESHOLD",
    "TRIM_RELATIVE",
    "LaurentSeries",
    "LinearSystem",
    "convergence_order",
    "determinant",
    "polynomial_at",
    "residue",
    "richardson_extrapolate",
    "series_add",
    "series_derivative",
    "series_inverse",
    "series_mul",
    "series_power",
    "series_scale",
    "series_sqrt",
    "series_sub",
    "solve_linear",
]

DEFAULT_WINDOW = 12
TRIM_RELATIVE = 1e-13
SINGULARITY_THRESHOLD = 1e-10
_TRIM_LOOKAHEAD = 4
_BRANCH_TOLERANCE = 1e-8


def _trim(lowest: int, coeffs: np.ndarray) -> tuple[int, np.ndarray]:
    # Leading entries that are tiny next to the first few coefficients are
    # cancellation noise. Comparing against the whole window would wrongly
    # discard genuine leading terms of series with a small convergence radius.
    start = 0
    n = coeffs.shape[0]
    while start < n:
        head = np.abs(coeffs[start:start + _TRIM_LOOKAHEAD])
        scale = head.max()
        if scale == 0.0:
            start += head.shape[0]
            continue
        if head[0] < TRIM_RELATIVE * scale:
            start += 1
            continue
        break
    return lowest + start, coeffs[start:]


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """Truncated Laurent series ``sum_k c_k z**(lowest_order + k)``.

    Construction normalizes the leading coefficient away from cancellation
    noise. A series whose every known coefficient vanishes is the zero series
    with an empty coefficient array and ``lowest_order = truncation_order + 1``.
    """

    lowest_order: int
    coefficients: np.ndarray

    def __init__(self, lowest_order: int, coefficients: Iterable[complex], *, trim: bool = True):
        arr = np.array(list(coefficients) if not isinstance(coefficients, np.ndarray) else coefficients,
                       dtype=complex)
        if arr.ndim != 1:
            raise SeriesError("coefficients must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue("series coefficients must be finite")
        low = int(lowest_order)
        if trim:
            low, arr = _trim(low, arr)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "lowest_order", low)
        object.__setattr__(self, "coefficients", arr)

    @classmethod
    def zero(cls, truncation_order: int) -> "LaurentSeries":
        return cls(truncation_order + 1, np.zeros(0, dtype=complex))

    @classmethod
    def monomial(cls, order: int, coefficient: complex = 1.0, truncation_order: int | None = None
                 ) -> "LaurentSeries":
        top = order + DEFAULT_WINDOW - 1 if truncation_order is None else truncation_order
        coeffs = np.zeros(top - order + 1, dtype=complex)
        coeffs[0] = coefficient
        return cls(order, coeffs)

    @classmethod
    def from_taylor(cls, coefficients: Sequence[complex], lowest_order: int = 0) -> "LaurentSeries":
        return cls(lowest_order, np.asarray(coefficients, dtype=complex))

    @property
    def truncation_order(self) -> int:
        return self.lowest_order + self.coefficients.shape[0] - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients.shape[0] == 0

    @property
    def leading_coefficient(self) -> complex:
        if self.is_zero:
            raise SeriesError("zero series has no leading coefficient")
        return complex(self.coefficients[0])

    def coefficient(self, order: int) -> complex:
        """Coefficient of ``z**order``; orders below the window are zero."""
        if order > self.truncation_order:
            raise SeriesError(
                f"order {order} lies beyond the truncation order {self.truncation_order}")
        if order < self.lowest_order:
            return 0j
        return complex(self.coefficients[order - self.lowest_order])

    def dense(self, start: int, stop: int) -> np.ndarray:
        """Coefficients for orders ``start..stop`` inclusive, zero-padded below."""
        return np.array([self.coefficient(k) for k in range(start, stop + 1)], dtype=complex)

    def truncate(self, truncation_order: int) -> "LaurentSeries":
        if truncation_order >= self.truncation_order:
            return self
        keep = truncation_order - self.lowest_order + 1
        if keep <= 0:
            return LaurentSeries.zero(truncation_order)
        return _series(self.lowest_order, self.coefficients[:keep])

    def __call__(self, z: complex) -> complex:
        k = np.arange(self.lowest_order, self.truncation_order + 1)
        return complex(np.sum(self.coefficients * np.power(complex(z), k)))

    def __add__(self, other: "LaurentSeries | complex") -> "LaurentSeries":
        return series_add(self, _coerce(other, self))

    __radd__ = __add__

    def __sub__(self, other: "LaurentSeries | complex") -> "LaurentSeries":
        return series_sub(self, _coerce(other, self))

    def __rsub__(self, other: "LaurentSeries | complex") -> "LaurentSeries":
        return series_sub(_coerce(other, self), self)

    def __neg__(self) -> "LaurentSeries":
        return series_scale(self, -1.0)

    def __mul__(self, other: "LaurentSeries | complex") -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: "LaurentSeries | complex") -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return series_mul(self, series_inverse(other))
        return series_scale(self, 1.0 / complex(other))

    def __repr__(self) -> str:
        return (f"LaurentSeries(lowest_order={self.lowest_order}, "
                f"truncation_order={self.truncation_order}, coefficients={self.coefficients!r})")


def _series(lowest: int, coeffs: np.ndarray, trim: bool = True) -> LaurentSeries:
    """Internal constructor for arithmetic results, whose inputs were already checked finite."""
    low = int(lowest)
    arr = np.asarray(coeffs, dtype=complex)
    if trim:
        low, arr = _trim(low, arr)
    arr = arr.copy()
    arr.setflags(write=False)
    out = object.__new__(LaurentSeries)
    object.__setattr__(out, "lowest_order", low)
    object.__setattr__(out, "coefficients", arr)
    return out


def _coerce(value: "LaurentSeries | complex", like: LaurentSeries) -> LaurentSeries:
    if isinstance(value, LaurentSeries):
        return value
    top = max(like.truncation_order, 0)
    coeffs = np.zeros(top + 1, dtype=complex)
    coeffs[0] = as_complex(value)
    return _series(0, coeffs)


def series_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    top = min(a.truncation_order, b.truncation_order)
    low = min(a.lowest_order, b.lowest_order)
    if top < low:
        return LaurentSeries.zero(top)
    out = np.zeros(top - low + 1, dtype=complex)
    for s in (a, b):
        n = min(s.coefficients.shape[0], top - s.lowest_order + 1)
        if n > 0:
            off = s.lowest_order - low
            out[off:off + n] += s.coefficients[:n]
    return _series(low, out)


def series_sub(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return series_add(a, series_scale(b, -1.0))


def series_scale(a: LaurentSeries, c: complex) -> LaurentSeries:
    c = complex(c)
    if c == 0:
        return LaurentSeries.zero(a.truncation_order)
    return _series(a.lowest_order, a.coefficients * c, trim=False)


def series_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Product; the window ends where either factor's uncertainty begins."""
    low = a.lowest_order + b.lowest_order
    top = min(a.lowest_order + b.truncation_order, b.lowest_order + a.truncation_order)
    if a.is_zero or b.is_zero:
        return LaurentSeries.zero(top)
    n = top - low + 1
    if n <= 0:
        raise SeriesError("empty window after truncation")
    prod = np.convolve(a.coefficients[:n], b.coefficients[:n])[:n]
    return _series(low, prod)


def series_inverse(a: LaurentSeries) -> LaurentSeries:
    """Reciprocal by the standard coefficient recurrence."""
    if a.is_zero or a.coefficients[0] == 0:
        raise SeriesError("zero leading coefficient")
    c = a.coefficients
    n = c.shape[0]
    out = np.zeros(n, dtype=complex)
    inv0 = 1.0 / c[0]
    out[0] = inv0
    for k in range(1, n):
        out[k] = -inv0 * np.dot(c[1:k + 1], out[k - 1::-1])
    return _series(-a.lowest_order, out, trim=False)


def series_sqrt(a: LaurentSeries, branch_value: complex) -> LaurentSeries:
    """Square root whose leading coefficient is ``branch_value``."""
    if a.is_zero:
        raise SeriesError("square root of the zero series")
    if a.lowest_order % 2:
        raise SeriesError("odd lowest order has no Laurent square root")
    b0 = as_complex(branch_value, "branch_value")
    c = a.coefficients
    if abs(b0 * b0 - c[0]) > _BRANCH_TOLERANCE * max(1.0, abs(c[0])):
        raise SeriesError(f"branch value {b0!r} does not square to leading coefficient {c[0]!r}")
    n = c.shape[0]
    out = np.zeros(n, dtype=complex)
    out[0] = b0
    half_inv = 0.5 / b0
    for k in range(1, n):
        cross = np.dot(out[1:k], out[k - 1:0:-1]) if k > 1 else 0.0
        out[k] = (c[k] - cross) * half_inv
    return _series(a.lowest_order // 2, out, trim=False)


def series_power(a: LaurentSeries, n: int) -> LaurentSeries:
    if n < 0:
        return series_power(series_inverse(a), -n)
    result = LaurentSeries(0, np.ones(1 + max(a.truncation_order - a.lowest_order, 0), dtype=complex))
    base = a
    while n:
        if n & 1:
            result = series_mul(result, base)
        n >>= 1
        if n:
            base = series_mul(base, base)
    return result


def series_derivative(a: LaurentSeries) -> LaurentSeries:
    """Term-by-term derivative with respect to the local parameter."""
    orders = np.arange(a.lowest_order, a.truncation_order + 1)
    return _series(a.lowest_order - 1, a.coefficients * orders)


def residue(a: LaurentSeries) -> complex:
    """Coefficient of ``z**-1``."""
    if a.truncation_order < -1:
        raise SeriesError("series is truncated before order -1")
    return a.coefficient(-1)


def polynomial_at(coefficients: Sequence[complex], x: LaurentSeries) -> LaurentSeries:
    """Evaluate an ascending-coefficient polynomial at a series by Horner's rule."""
    coeffs = list(coefficients)
    if not coeffs:
        return LaurentSeries.zero(x.truncation_order)
    acc = _coerce(coeffs[-1], x)
    for c in reversed(coeffs[:-1]):
        acc = series_add(series_mul(acc, x), _coerce(c, x))
    return acc


@dataclass(frozen=True)
class LinearSystem:
    """Square complex system ``matrix @ solution = rhs`` of size 2 or 3."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        b = np.array(self.rhs, dtype=complex).reshape(-1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if m.shape[0] not in (2, 3):
            raise ValueError("only 2x2 and 3x3 systems are supported")
        if b.shape[0] != m.shape[0]:
            raise ValueError("rhs length does not match the matrix")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(b))):
            raise NonFiniteValue("linear system contains non-finite entries")
        m.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rhs", b)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def determinant(m: np.ndarray) -> complex:
    """Cofactor-expansion determinant of a 2x2 or 3x3 matrix."""
    m = np.asarray(m, dtype=complex)
    if m.shape == (2, 2):
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if m.shape == (3, 3):
        return complex(
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )
    raise ValueError(f"unsupported shape {m.shape}")


def _cramer(m: np.ndarray, b: np.ndarray, det: complex) -> np.ndarray:
    out = np.empty(m.shape[0], dtype=complex)
    for k in range(m.shape[0]):
        mk = m.copy()
        mk[:, k] = b
        out[k] = determinant(mk) / det
    return out


def solve_linear(system: LinearSystem, threshold: float = SINGULARITY_THRESHOLD,
                 what: str = "linear system") -> np.ndarray:
    """Solve by Cramer's rule after a determinant-based singularity test.

    Raises :class:`NearSingular` when ``|det|`` is at or below ``threshold``
    times the product of the row norms. One step of residual correction is
    applied, and the back-substitution residual is checked.
    """
    m, b = np.array(system.matrix), np.array(system.rhs)
    det = determinant(m)
    scale = float(np.prod(np.linalg.norm(m, axis=1)))
    limit = threshold * scale
    if not abs(det) > limit:
        raise NearSingular(det, limit, what)
    x = _cramer(m, b, det)
    r = b - m @ x
    x = x + _cramer(m, r, det)
    r = b - m @ x
    bound = 1e-12 * (np.linalg.norm(m) * np.linalg.norm(x) + np.linalg.norm(b))
    if np.linalg.norm(r) > bound:
        raise NearSingular(det, limit, f"{what} (back-substitution residual {np.linalg.norm(r):.2e})")
    return x


def richardson_extrapolate(values: Sequence[complex], steps: Sequence[float], order: int = 2
                           ) -> complex:
    """Cancel the leading ``h**order`` error term between the last two steps."""
    if len(values) != len(steps) or len(values) < 2:
        raise ValueError("need at least two (value, step) pairs")
    h1, h2 = float(steps[-2]), float(steps[-1])
    f1, f2 = complex(values[-2]), complex(values[-1])
    w1, w2 = h1 ** order, h2 ** order
    return (w1 * f2 - w2 * f1) / (w1 - w2)


def convergence_order(errors: Sequence[float], steps: Sequence[float]) -> float:
    """Observed order ``log(e1/e2) / log(h1/h2)`` from the last two steps."""
    e1, e2 = float(errors[-2]), float(errors[-1])
    h1, h2 = float(steps[-2]), float(steps[-1])
    if e1 <= 0.0 or e2 <= 0.0:
        return float("inf")
    return float(np.log(e1 / e2) / np.log(h1 / h2))
