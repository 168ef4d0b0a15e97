"""Rational functions of one variable kept in partial-fraction form.

A :class:`Rational` is a polynomial plus principal parts at finitely many
poles. Keeping pole locations explicit means a pole at the expansion point
is detected exactly instead of through a numerically tiny denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .numeric import LaurentSeries, polynomial_at, series_add, series_inverse, series_mul

__all__ = ["Rational", "rational_sum", "taylor_shift"]

_UNBOUNDED = 1 << 20


def taylor_shift(coeffs: Sequence[complex], a: complex) -> np.ndarray:
    """Coefficients of ``p(x)`` re-expanded in powers of ``x - a``."""
    p = np.asarray(coeffs, dtype=complex)
    n = p.shape[0]
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        if p[i] == 0:
            continue
        for m in range(i + 1):
            out[m] += p[i] * comb(i, m) * a ** (i - m)
    return out


def _strip(coeffs: Sequence[complex]) -> tuple[complex, ...]:
    c = [complex(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _add_into(target: list[complex], values: Sequence[complex]) -> None:
    if len(values) > len(target):
        target.extend([0j] * (len(values) - len(target)))
    for i, v in enumerate(values):
        target[i] += v


@dataclass(frozen=True, eq=False)
class Rational:
    """``poly(x) + sum_a sum_k parts[a][k-1] / (x - a)**k``."""

    poly: tuple[complex, ...]
    parts: tuple[tuple[complex, tuple[complex, ...]], ...]

    @classmethod
    def make(cls, poly: Sequence[complex] = (), parts: Mapping[complex, Sequence[complex]] | None = None
             ) -> "Rational":
        merged: dict[complex, list[complex]] = {}
        for a, cs in (parts or {}).items():
            _add_into(merged.setdefault(complex(a), []), [complex(c) for c in cs])
        clean = []
        for a in sorted(merged, key=lambda z: (z.real, z.imag)):
            cs = _strip(merged[a])
            if cs:
                clean.append((a, cs))
        return cls(_strip(poly), tuple(clean))

    @classmethod
    def constant(cls, c: complex) -> "Rational":
        return cls.make((c,))

    @classmethod
    def polynomial(cls, coeffs: Sequence[complex]) -> "Rational":
        return cls.make(coeffs)

    @classmethod
    def pole(cls, a: complex, c: complex = 1.0, order: int = 1) -> "Rational":
        cs = [0j] * order
        cs[-1] = complex(c)
        return cls.make((), {a: cs})

    @classmethod
    def linear(cls, a: complex) -> "Rational":
        """The polynomial ``x - a``."""
        return cls.make((-complex(a), 1.0))

    @property
    def pole_locations(self) -> tuple[complex, ...]:
        return tuple(a for a, _ in self.parts)

    @property
    def is_zero(self) -> bool:
        return not self.poly and not self.parts

    def coefficient_norm(self) -> float:
        vals = list(self.poly) + [c for _, cs in self.parts for c in cs]
        return max((abs(v) for v in vals), default=0.0)

    def _part_map(self) -> dict[complex, list[complex]]:
        return {a: list(cs) for a, cs in self.parts}

    def __add__(self, other: "Rational | complex") -> "Rational":
        other = _as_rational(other)
        poly = list(self.poly)
        _add_into(poly, other.poly)
        parts = self._part_map()
        for a, cs in other.parts:
            _add_into(parts.setdefault(a, []), cs)
        return Rational.make(poly, parts)

    __radd__ = __add__

    def __neg__(self) -> "Rational":
        return self.scale(-1.0)

    def __sub__(self, other: "Rational | complex") -> "Rational":
        return self + (-_as_rational(other))

    def __rsub__(self, other: "Rational | complex") -> "Rational":
        return _as_rational(other) - self

    def scale(self, c: complex) -> "Rational":
        c = complex(c)
        return Rational.make([c * p for p in self.poly],
                             {a: [c * v for v in cs] for a, cs in self.parts})

    def __mul__(self, other: "Rational | complex") -> "Rational":
        if not isinstance(other, Rational):
            return self.scale(other)
        poly: list[complex] = []
        parts: dict[complex, list[complex]] = {}
        if self.poly and other.poly:
            _add_into(poly, np.convolve(self.poly, other.poly))
        for p, q in ((self, other), (other, self)):
            if not p.poly:
                continue
            for a, cs in q.parts:
                _poly_times_part(p.poly, a, cs, poly, parts)
        for a, cs in self.parts:
            for b, ds in other.parts:
                _part_times_part(a, cs, b, ds, parts)
        return Rational.make(poly, parts)

    __rmul__ = __mul__

    def derivative(self) -> "Rational":
        poly = [k * self.poly[k] for k in range(1, len(self.poly))]
        parts = {a: [0j] + [-(k + 1) * cs[k] for k in range(len(cs))] for a, cs in self.parts}
        return Rational.make(poly, parts)

    def reciprocal(self) -> "Rational":
        """Inverse of a unit ``c * (x - a)**k`` with integer ``k``."""
        if not self.parts:
            nz = [i for i, c in enumerate(self.poly) if c != 0]
            if len(nz) == 1:
                k = nz[0]
                if k == 0:
                    return Rational.constant(1.0 / self.poly[0])
                return Rational.pole(0j, 1.0 / self.poly[k], order=k)
            if len(self.poly) == 2:
                return Rational.pole(-self.poly[0] / self.poly[1], 1.0 / self.poly[1])
        elif not self.poly and len(self.parts) == 1:
            a, cs = self.parts[0]
            if all(c == 0 for c in cs[:-1]):
                k = len(cs)
                coeffs = [comb(k, i) * (-a) ** (k - i) / cs[-1] for i in range(k + 1)]
                return Rational.make(coeffs)
        raise ValueError("reciprocal is only available for monomial units")

    def __call__(self, x):
        """Evaluate at a scalar or an array of points."""
        x = np.asarray(x, dtype=complex)
        out = np.polynomial.polynomial.polyval(x, self.poly) if self.poly else np.zeros_like(x)
        for a, cs in self.parts:
            inv = 1.0 / (x - a)
            acc = np.zeros_like(x)
            for c in reversed(cs):
                acc = (acc + c) * inv
            out = out + acc
        return out if out.ndim else complex(out)

    def at_series(self, x: LaurentSeries, inverse_cache: dict | None = None) -> LaurentSeries:
        """Compose with a series ``x(s)``; ``inverse_cache`` memoizes ``1/(x - a)``."""
        acc = polynomial_at(self.poly, x) if self.poly else LaurentSeries.zero(_UNBOUNDED)
        for a, cs in self.parts:
            inv = None if inverse_cache is None else inverse_cache.get(a)
            if inv is None:
                inv = series_inverse(series_add(x, _const_series(-a, x)))
                if inverse_cache is not None:
                    inverse_cache[a] = inv
            term = None
            for c in reversed(cs):
                term = _const_series(c, inv) if term is None else series_add(term, _const_series(c, inv))
                term = series_mul(term, inv)
            acc = series_add(acc, term)
        return acc

    def __repr__(self) -> str:
        return f"Rational(poly={self.poly!r}, parts={self.parts!r})"


def _const_series(c: complex, like: LaurentSeries) -> LaurentSeries:
    top = max(like.truncation_order, 0)
    coeffs = np.zeros(top + 1, dtype=complex)
    coeffs[0] = c
    return LaurentSeries(0, coeffs)


def _as_rational(value: "Rational | complex") -> Rational:
    return value if isinstance(value, Rational) else Rational.constant(complex(value))


def _poly_times_part(poly: Sequence[complex], a: complex, cs: Sequence[complex],
                     poly_out: list[complex], parts_out: dict[complex, list[complex]]) -> None:
    d = taylor_shift(poly, a)
    local_poly: list[complex] = []
    principal: list[complex] = []
    for m, dm in enumerate(d):
        if dm == 0:
            continue
        for k, ck in enumerate(cs, start=1):
            e = m - k
            if e >= 0:
                _add_into(local_poly, [0j] * e + [dm * ck])
            else:
                _add_into(principal, [0j] * (-e - 1) + [dm * ck])
    if local_poly:
        _add_into(poly_out, taylor_shift(local_poly, -a))
    if principal:
        _add_into(parts_out.setdefault(a, []), principal)


def _part_times_part(a: complex, cs: Sequence[complex], b: complex, ds: Sequence[complex],
                     parts_out: dict[complex, list[complex]]) -> None:
    if a == b:
        out: list[complex] = []
        for k, ck in enumerate(cs, start=1):
            for m, dm in enumerate(ds, start=1):
                _add_into(out, [0j] * (k + m - 1) + [ck * dm])
        _add_into(parts_out.setdefault(a, []), out)
        return
    for k, ck in enumerate(cs, start=1):
        for m, dm in enumerate(ds, start=1):
            w = ck * dm
            _add_into(parts_out.setdefault(a, []), _split(k, m, a - b, w))
            _add_into(parts_out.setdefault(b, []), _split(m, k, b - a, w))


def _split(k: int, m: int, gap: complex, w: complex) -> list[complex]:
    # principal part at a of w / ((x-a)^k (x-b)^m) with gap = a - b
    out = [0j] * k
    for n in range(k):
        binom = 1.0
        for i in range(n):
            binom *= (-m - i) / (i + 1)
        out[k - n - 1] += w * binom * gap ** (-m - n)
    return out


def rational_sum(terms: Iterable[Rational]) -> Rational:
    acc = Rational.make()
    for t in terms:
        acc = acc + t
    return acc
