"""Exact scalars of the form sum_k (x_k + i y_k) * sqrt(k).

``x_k, y_k`` are rationals and ``k`` runs over squarefree positive integers.
The set is a ring closed under complex conjugation.  Square roots of
distinct squarefree integers are linearly independent over Q(i), so an
element is zero iff every stored coefficient is, which makes identities
among the bundled example data checkable without rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["Surd", "as_exact", "is_exact"]

_ZERO = Fraction(0)


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, k)`` with ``n == s*s*k`` and ``k`` squarefree."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, k = 1, 1
    f = 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            s *= f
        if n % f == 0:
            n //= f
            k *= f
        f += 1
    return s, k * n


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


class Surd:
    """Immutable exact complex number in Q(i)(sqrt 2, sqrt 3, sqrt 5, ...)."""

    __slots__ = ("_terms",)

    def __init__(self, value=0):
        if isinstance(value, Surd):
            self._terms = value._terms
            return
        if isinstance(value, (int, Rational)):
            v = Fraction(value)
            self._terms = {1: (v, _ZERO)} if v else {}
            return
        raise TypeError(f"cannot build an exact Surd from {type(value).__name__}")

    @classmethod
    def _from_terms(cls, terms: dict) -> Surd:
        out = object.__new__(cls)
        out._terms = {k: v for k, v in terms.items() if v[0] or v[1]}
        return out

    @classmethod
    def gaussian(cls, re=0, im=0) -> Surd:
        return cls._from_terms({1: (Fraction(re), Fraction(im))})

    @classmethod
    def sqrt(cls, x) -> Surd:
        """Exact square root of a rational; negative input gives i*sqrt(|x|)."""
        x = Fraction(x)
        if x == 0:
            return cls(0)
        neg = x < 0
        x = abs(x)
        # sqrt(p/q) = sqrt(p*q)/q
        s, k = _squarefree_split(x.numerator * x.denominator)
        c = Fraction(s, x.denominator)
        return cls._from_terms({k: (_ZERO, c) if neg else (c, _ZERO)})

    @classmethod
    def from_parts(cls, parts) -> Surd:
        """Build from ``[[k, re, im], ...]`` where re/im are rational strings."""
        acc = cls(0)
        for k, re, im in parts:
            s, kk = _squarefree_split(int(k))
            acc = acc + cls._from_terms({kk: (Fraction(re) * s, Fraction(im) * s)})
        return acc

    def parts(self) -> list[list]:
        return [[k, str(re), str(im)] for k, (re, im) in sorted(self._terms.items())]

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return not self._terms or (set(self._terms) == {1} and self._terms[1][1] == 0)

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self._terms[1][0] if self._terms else _ZERO

    def conjugate(self) -> Surd:
        return Surd._from_terms({k: (re, -im) for k, (re, im) in self._terms.items()})

    def _coerce(self, other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Rational)):
            return Surd(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        terms = dict(self._terms)
        for k, (re, im) in o._terms.items():
            r0, i0 = terms.get(k, (_ZERO, _ZERO))
            terms[k] = (r0 + re, i0 + im)
        return Surd._from_terms(terms)

    __radd__ = __add__

    def __neg__(self):
        return Surd._from_terms({k: (-re, -im) for k, (re, im) in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self)
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        terms: dict = {}
        for k1, g1 in self._terms.items():
            for k2, g2 in o._terms.items():
                g = _gmul(g1, g2)
                g0 = math.gcd(k1, k2)
                # sqrt(k1*k2) = g0 * sqrt(k1*k2/g0^2), the latter squarefree
                k = (k1 // g0) * (k2 // g0)
                re, im = terms.get(k, (_ZERO, _ZERO))
                terms[k] = (re + g[0] * g0, im + g[1] * g0)
        return Surd._from_terms(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        if o.is_zero:
            raise ZeroDivisionError("Surd division by zero")
        if set(o._terms) != {1}:
            raise TypeError("division is only supported by Gaussian rationals")
        re, im = o._terms[1]
        n = re * re + im * im
        return self * Surd.gaussian(re / n, -im / n)

    def __rtruediv__(self, other):
        return Surd(other) / self if self._coerce(other) is not None else other / complex(self)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Surd(1)
        for _ in range(n):
            out = out * self
        return out

    def __complex__(self):
        z = 0j
        for k, (re, im) in self._terms.items():
            z += complex(float(re), float(im)) * math.sqrt(k)
        return z

    def __float__(self):
        z = complex(self)
        if z.imag != 0:
            raise TypeError("Surd has a nonzero imaginary part")
        return z.real

    def __abs__(self):
        return abs(complex(self))

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) == other
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self.is_rational:
            return hash(self.as_fraction())
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"Surd({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for k, (re, im) in sorted(self._terms.items()):
            if im == 0:
                g = str(re)
            elif re == 0:
                g = f"{im}i"
            else:
                g = f"({re}{'+' if im > 0 else '-'}{abs(im)}i)"
            pieces.append(g if k == 1 else f"{g}*sqrt({k})")
        return " + ".join(pieces)


def is_exact(c) -> bool:
    return isinstance(c, Surd)


def as_exact(c) -> Surd:
    """Coerce ints, Fractions, and dyadic floats/complex to Surd without rounding."""
    if isinstance(c, Surd):
        return c
    if isinstance(c, (int, Rational)):
        return Surd(c)
    if isinstance(c, (float, complex)):
        c = complex(c)
        return Surd.gaussian(Fraction(c.real), Fraction(c.imag))
    raise TypeError(f"cannot convert {type(c).__name__} to Surd")
