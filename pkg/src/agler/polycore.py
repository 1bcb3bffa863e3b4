"""Sparse multivariate complex polynomials.

Polynomials map exponent tuples to coefficients.  Coefficients are Python
``complex`` (float mode) or :class:`~agler.surd.Surd` (exact mode); the two
may be mixed, in which case arithmetic degrades to ``complex``.  Variables
are indexed from 0 throughout the Python API.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from types import MappingProxyType

import numpy as np

from .exceptions import DimensionError
from .surd import Surd, as_exact

__all__ = [
    "PRUNE_TOL",
    "Poly",
    "VecPoly",
    "LaurentPoly",
    "grlex_key",
    "multidegree",
    "amplify",
    "scalar_to_json",
    "scalar_from_json",
]

PRUNE_TOL = 1e-14

MultiIndex = tuple[int, ...]


def grlex_key(exp: Sequence[int]):
    """Sort key for graded lexicographic order (total degree first)."""
    return (sum(exp), tuple(exp))


def _coerce(c):
    if isinstance(c, Surd):
        return c
    return complex(c)


def _negligible(c, atol: float) -> bool:
    if isinstance(c, Surd):
        return c.is_zero
    return abs(c) <= atol


def scalar_to_json(c) -> dict:
    z = complex(c)
    out = {"re": z.real, "im": z.imag}
    if isinstance(c, Surd):
        out["exact"] = c.parts()
    return out


def scalar_from_json(obj, exact: bool = False):
    if not isinstance(obj, Mapping) or "re" not in obj or "im" not in obj:
        raise ValueError(f"bad scalar {obj!r}: expected {{'re': x, 'im': y}}")
    if exact:
        if "exact" in obj:
            return Surd.from_parts(obj["exact"])
        return as_exact(complex(float(obj["re"]), float(obj["im"])))
    return complex(float(obj["re"]), float(obj["im"]))


def _check_exp(exp, nvars: int, signed: bool = False) -> MultiIndex:
    exp = tuple(int(e) for e in exp)
    if len(exp) != nvars:
        raise DimensionError(f"exponent {exp} has length {len(exp)}, expected {nvars}")
    if not signed and any(e < 0 for e in exp):
        raise ValueError(f"negative exponent in {exp}")
    return exp


class Poly:
    """Polynomial in ``nvars`` complex variables with sparse coefficients.

    Instances are treated as immutable; ``terms`` is a read-only mapping.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping | None = None, atol: float = PRUNE_TOL):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = int(nvars)
        clean: dict[MultiIndex, object] = {}
        for exp, c in (terms or {}).items():
            exp = _check_exp(exp, self.nvars)
            c = _coerce(c)
            if exp in clean:
                c = clean[exp] + c
            clean[exp] = c
        self._terms = {e: c for e, c in clean.items() if not _negligible(c, atol)}

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> Poly:
        out = object.__new__(cls)
        out.nvars = nvars
        out._terms = {e: c for e, c in terms.items() if not _negligible(c, PRUNE_TOL)}
        return out

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, j: int, coeff=1.0) -> Poly:
        if not 0 <= j < nvars:
            raise DimensionError(f"variable index {j} out of range for {nvars} variables")
        exp = [0] * nvars
        exp[j] = 1
        return cls(nvars, {tuple(exp): coeff})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1.0) -> Poly:
        return cls(len(exp), {tuple(exp): coeff})

    @classmethod
    def exact(cls, nvars: int, terms: Mapping) -> Poly:
        """Exact-mode polynomial: rational and surd coefficients are kept as Surd."""
        return cls(nvars, {e: as_exact(c) for e, c in terms.items()})

    # -- basic protocol ---------------------------------------------------

    @property
    def terms(self) -> Mapping[MultiIndex, object]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Surd) for c in self._terms.values())

    def support(self) -> list[MultiIndex]:
        return sorted(self._terms, key=grlex_key)

    def coeff(self, exp: Sequence[int]):
        return self._terms.get(tuple(exp), 0)

    def sorted_terms(self):
        return [(e, self._terms[e]) for e in self.support()]

    def __len__(self):
        return len(self._terms)

    def __repr__(self):
        if not self._terms:
            return f"Poly({self.nvars}, 0)"
        body = " + ".join(f"({c})*z^{list(e)}" for e, c in self.sorted_terms())
        return f"Poly({self.nvars}, {body})"

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        return NotImplemented

    __hash__ = None

    def allclose(self, other: Poly, atol: float = 1e-11) -> bool:
        return (self - other).max_abs_coeff() <= atol

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def to_float(self) -> Poly:
        return Poly._raw(self.nvars, {e: complex(c) for e, c in self._terms.items()})

    # -- arithmetic -------------------------------------------------------

    def _const_like(self, c) -> Poly:
        if self.is_exact and not isinstance(c, (float, complex)):
            c = as_exact(c)
        return Poly.const(self.nvars, c)

    def _check(self, other: Poly):
        if other.nvars != self.nvars:
            raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            return self + self._const_like(other)
        self._check(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = self._const_like(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> Poly:
        return Poly._raw(self.nvars, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return Poly._raw(self.nvars, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = self._const_like(1)
        for _ in range(n):
            out = out * self
        return out

    def conj_coeffs(self) -> Poly:
        """Conjugate every coefficient (the polynomial z -> conj(p(conj z)))."""
        return Poly._raw(self.nvars, {e: c.conjugate() for e, c in self._terms.items()})

    # -- evaluation and structure ----------------------------------------

    def eval(self, z) -> complex:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.nvars:
            raise DimensionError(f"point has {z.shape[0]} coordinates, expected {self.nvars}")
        total = 0j
        for e, c in self._terms.items():
            m = complex(c)
            for zk, ek in zip(z, e):
                if ek:
                    m *= zk**ek
            total += m
        return total

    __call__ = eval

    def eval_many(self, Z) -> np.ndarray:
        """Evaluate at each row of ``Z`` (shape ``(npts, nvars)``)."""
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        if Z.shape[1] != self.nvars:
            raise DimensionError(f"points have {Z.shape[1]} coordinates, expected {self.nvars}")
        out = np.zeros(Z.shape[0], dtype=complex)
        for e, c in self._terms.items():
            out += complex(c) * np.prod(Z ** np.asarray(e), axis=1)
        return out

    def multidegree(self) -> MultiIndex:
        return multidegree(self)

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def amplify(self, j: int, M: int) -> Poly:
        return amplify(self, j, M)

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"exp": list(e), **scalar_to_json(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping, exact: bool = False) -> Poly:
        nvars = int(obj["nvars"])
        terms = {}
        for t in obj["terms"]:
            exp = _check_exp(t["exp"], nvars)
            if exp in terms:
                raise ValueError(f"duplicate exponent {list(exp)}")
            terms[exp] = scalar_from_json(t, exact)
        return cls(nvars, terms)


def multidegree(p) -> MultiIndex:
    """Componentwise maximum exponent; all zeros for the zero polynomial.

    Check ``p.is_zero`` to tell the zero polynomial apart from a constant.
    """
    out = [0] * p.nvars
    for e in p.terms:
        for k, ek in enumerate(e):
            if ek > out[k]:
                out[k] = ek
    return tuple(out)


def _amplify_exp(e: MultiIndex, j: int, M: int) -> MultiIndex:
    return e[:j] + (e[j] * M,) + e[j + 1 :]


def amplify(p, j: int, M: int):
    """Substitute ``z_j -> z_j**M`` in a Poly or VecPoly."""
    if not 0 <= j < p.nvars:
        raise DimensionError(f"variable index {j} out of range for {p.nvars} variables")
    if int(M) != M or M < 1:
        raise ValueError("M must be a positive integer")
    M = int(M)
    if isinstance(p, VecPoly):
        return VecPoly(p.nvars, p.dim, {_amplify_exp(e, j, M): v for e, v in p.terms.items()})
    return Poly._raw(p.nvars, {_amplify_exp(e, j, M): c for e, c in p.terms.items()})


class VecPoly:
    """Vector-valued polynomial ``z -> C^dim`` stored as exponent -> coefficient tuple."""

    __slots__ = ("nvars", "dim", "_terms")

    def __init__(self, nvars: int, dim: int, terms: Mapping | None = None, atol: float = PRUNE_TOL):
        if dim < 0:
            raise ValueError("dim must be non-negative")
        self.nvars = int(nvars)
        self.dim = int(dim)
        clean: dict[MultiIndex, tuple] = {}
        for exp, vec in (terms or {}).items():
            exp = _check_exp(exp, self.nvars)
            vec = tuple(_coerce(c) for c in vec)
            if len(vec) != self.dim:
                raise DimensionError(f"vector of length {len(vec)} in a dim-{self.dim} VecPoly")
            if exp in clean:
                vec = tuple(a + b for a, b in zip(clean[exp], vec))
            clean[exp] = vec
        self._terms = {
            e: v for e, v in clean.items() if not all(_negligible(c, atol) for c in v)
        }

    @classmethod
    def from_components(cls, comps: Sequence[Poly], nvars: int | None = None) -> VecPoly:
        if nvars is None:
            if not comps:
                raise ValueError("nvars is required for an empty component list")
            nvars = comps[0].nvars
        for c in comps:
            if c.nvars != nvars:
                raise DimensionError("components disagree on nvars")
        exps = set().union(*(c.terms for c in comps)) if comps else set()
        zero = Surd(0) if comps and all(c.is_exact for c in comps) else 0j
        terms = {e: tuple(c.terms.get(e, zero) for c in comps) for e in exps}
        return cls(nvars, len(comps), terms)

    @classmethod
    def from_matrix(cls, Y: np.ndarray, basis: Sequence[MultiIndex], nvars: int) -> VecPoly:
        """Rows of ``Y`` are components, columns indexed by ``basis``."""
        Y = np.asarray(Y)
        terms = {tuple(b): tuple(Y[:, i]) for i, b in enumerate(basis)}
        return cls(nvars, Y.shape[0], terms)

    @property
    def terms(self) -> Mapping[MultiIndex, tuple]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def support(self) -> list[MultiIndex]:
        return sorted(self._terms, key=grlex_key)

    def components(self) -> list[Poly]:
        return [
            Poly._raw(self.nvars, {e: v[k] for e, v in self._terms.items()})
            for k in range(self.dim)
        ]

    def coeff_matrix(self, basis: Sequence[MultiIndex] | None = None) -> tuple[np.ndarray, list]:
        """Return ``(Y, basis)`` with ``Y[k, i]`` the coefficient of ``basis[i]`` in component k."""
        if basis is None:
            basis = self.support()
        exact = any(isinstance(c, Surd) for v in self._terms.values() for c in v)
        Y = np.zeros((self.dim, len(basis)), dtype=object if exact else complex)
        if exact:
            Y[:] = Surd(0)
        for i, b in enumerate(basis):
            v = self._terms.get(tuple(b))
            if v is not None:
                for k in range(self.dim):
                    Y[k, i] = v[k]
        return Y, list(basis)

    def eval(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.nvars:
            raise DimensionError(f"point has {z.shape[0]} coordinates, expected {self.nvars}")
        out = np.zeros(self.dim, dtype=complex)
        for e, v in self._terms.items():
            m = complex(np.prod(z ** np.asarray(e))) if self.nvars else 1.0
            out += m * np.array([complex(c) for c in v])
        return out

    __call__ = eval

    def multidegree(self) -> MultiIndex:
        return multidegree(self)

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def amplify(self, j: int, M: int) -> VecPoly:
        return amplify(self, j, M)

    def mul_monomial(self, exp: Sequence[int]) -> VecPoly:
        exp = tuple(exp)
        return VecPoly(
            self.nvars,
            self.dim,
            {tuple(a + b for a, b in zip(e, exp)): v for e, v in self._terms.items()},
        )

    def scale(self, c) -> VecPoly:
        return VecPoly(
            self.nvars, self.dim, {e: tuple(x * c for x in v) for e, v in self._terms.items()}
        )

    def to_float(self) -> VecPoly:
        return VecPoly(
            self.nvars, self.dim, {e: tuple(complex(c) for c in v) for e, v in self._terms.items()}
        )

    @staticmethod
    def stack(parts: Sequence[VecPoly]) -> VecPoly:
        """Concatenate vector polynomials componentwise."""
        comps = [c for p in parts for c in p.components()]
        return VecPoly.from_components(comps, nvars=parts[0].nvars)

    def __eq__(self, other):
        if isinstance(other, VecPoly):
            return (self.nvars, self.dim, self._terms) == (other.nvars, other.dim, other._terms)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"VecPoly(nvars={self.nvars}, dim={self.dim}, nterms={len(self._terms)})"

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "dim": self.dim,
            "terms": [
                {"exp": list(e), "vec": [scalar_to_json(c) for c in self._terms[e]]}
                for e in self.support()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping, exact: bool = False) -> VecPoly:
        nvars, dim = int(obj["nvars"]), int(obj["dim"])
        terms = {}
        for t in obj["terms"]:
            exp = _check_exp(t["exp"], nvars)
            if exp in terms:
                raise ValueError(f"duplicate exponent {list(exp)}")
            vec = [scalar_from_json(c, exact) for c in t["vec"]]
            if len(vec) != dim:
                raise DimensionError(f"vector of length {len(vec)} in a dim-{dim} VecPoly")
            terms[exp] = vec
        return cls(nvars, dim, terms)


class LaurentPoly:
    """Polynomial with signed integer exponents; used for data on the torus."""

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping | None = None, atol: float = PRUNE_TOL):
        self.nvars = int(nvars)
        clean: dict = {}
        for exp, c in (terms or {}).items():
            exp = _check_exp(exp, self.nvars, signed=True)
            c = _coerce(c)
            clean[exp] = clean[exp] + c if exp in clean else c
        self._terms = {e: c for e, c in clean.items() if not _negligible(c, atol)}

    @property
    def terms(self) -> Mapping[tuple[int, ...], object]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, exp: Sequence[int]):
        return self._terms.get(tuple(exp), 0)

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self._terms, key=lambda e: (sum(abs(x) for x in e), e))

    def eval(self, z) -> complex:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.nvars:
            raise DimensionError(f"point has {z.shape[0]} coordinates, expected {self.nvars}")
        return complex(
            sum(complex(c) * np.prod(z ** np.asarray(e, dtype=float)) for e, c in self._terms.items())
        )

    __call__ = eval

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_conj_symmetric(self, atol: float = 1e-11) -> bool:
        for e, c in self._terms.items():
            partner = self._terms.get(tuple(-x for x in e), 0)
            if abs(complex(c) - complex(partner).conjugate()) > atol:
                return False
        return True

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        if other.nvars != self.nvars:
            raise DimensionError("nvars mismatch")
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(self.nvars, out)

    def __neg__(self):
        return LaurentPoly(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def scale(self, c) -> LaurentPoly:
        return LaurentPoly(self.nvars, {e: v * c for e, v in self._terms.items()})

    def allclose(self, other: LaurentPoly, atol: float = 1e-11) -> bool:
        return (self - other).max_abs_coeff() <= atol

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({self._terms[e]})*z^{list(e)}" for e in self.support()) or "0"
        return f"LaurentPoly({self.nvars}, {body})"

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"exp": list(e), **scalar_to_json(self._terms[e])} for e in self.support()],
        }

    @classmethod
    def from_json(cls, obj: Mapping, exact: bool = False) -> LaurentPoly:
        nvars = int(obj["nvars"])
        terms = {}
        for t in obj["terms"]:
            exp = _check_exp(t["exp"], nvars, signed=True)
            if exp in terms:
                raise ValueError(f"duplicate exponent {list(exp)}")
            terms[exp] = scalar_from_json(t, exact)
        return cls(nvars, terms)


def eval_matrix_poly(p: Poly, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate ``p`` at a tuple of commuting square matrices.

    Nested Horner evaluation in variable order 0, 1, ..., n-1.
    """
    if len(mats) != p.nvars:
        raise DimensionError(f"{len(mats)} matrices for a {p.nvars}-variable polynomial")
    if p.nvars == 0:
        raise DimensionError("need at least one variable")
    m = mats[0].shape[0]
    eye = np.eye(m, dtype=complex)

    def horner(terms: dict, k: int) -> np.ndarray:
        if k == p.nvars:
            return sum((complex(c) for c in terms.values()), 0j) * eye
        groups: dict[int, dict] = {}
        for e, c in terms.items():
            groups.setdefault(e[k], {})[e] = c
        acc = np.zeros((m, m), dtype=complex)
        for deg in range(max(groups), -1, -1):
            acc = acc @ mats[k]
            if deg in groups:
                acc = acc + horner(groups[deg], k + 1)
        return acc

    if p.is_zero:
        return np.zeros((m, m), dtype=complex)
    return horner(dict(p.terms), 0)


def random_poly(rng: np.random.Generator, nvars: int, maxdeg: int | Iterable[int], nterms: int) -> Poly:
    """Random sparse polynomial with complex Gaussian coefficients (test helper)."""
    if isinstance(maxdeg, int):
        maxdeg = [maxdeg] * nvars
    maxdeg = list(maxdeg)
    terms = {}
    for _ in range(nterms):
        e = tuple(int(rng.integers(0, d + 1)) for d in maxdeg)
        terms[e] = complex(rng.normal(), rng.normal())
    return Poly(nvars, terms)

