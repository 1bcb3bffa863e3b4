"""Hermitian forms over monomial bases and their restrictions to the torus.

A form with basis ``m = (z^a for a in basis)`` and matrix ``H`` is the kernel

    K(z, zeta) = sum_{a, b} conj(zeta^b) * H[b, a] * z^a

so rows index the ``zeta`` side and columns the ``z`` side.  For a vector
polynomial ``F`` with coefficient matrix ``Y`` the Gram form
``<F(z), F(zeta)>`` has ``H = Y^* Y``.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np

from .exceptions import DimensionError, FaceNotFactorableError, UnsupportedDegreeError
from .polycore import (
    PRUNE_TOL,
    LaurentPoly,
    Poly,
    VecPoly,
    _negligible,
    grlex_key,
    scalar_from_json,
    scalar_to_json,
)
from .surd import Surd

__all__ = [
    "HERMITIAN_TOL",
    "HermitianForm",
    "mod2diff",
    "gram_form",
    "subtract_sos",
    "torus_restrict",
    "face_extract",
]

HERMITIAN_TOL = 1e-13

Exp = tuple[int, ...]


def _acc(d: dict, key, val):
    d[key] = d[key] + val if key in d else val


class HermitianForm:
    """Hermitian kernel ``m(zeta)^* H m(z)`` over a monomial basis.

    Parameters
    ----------
    nvars : int
    basis : sequence of exponent tuples, distinct
    H : (len(basis), len(basis)) array, complex or object (exact Surd entries)
    check : bool
        Verify Hermitian symmetry (exactly for Surd entries, to
        ``HERMITIAN_TOL`` otherwise).
    """

    __slots__ = ("nvars", "basis", "H")

    def __init__(self, nvars: int, basis: Sequence[Exp], H, check: bool = True):
        self.nvars = int(nvars)
        self.basis = tuple(tuple(int(x) for x in b) for b in basis)
        if len(set(self.basis)) != len(self.basis):
            raise ValueError("basis entries must be distinct")
        for b in self.basis:
            if len(b) != self.nvars:
                raise DimensionError(f"basis exponent {b} has wrong length")
        H = np.asarray(H)
        if H.dtype != object:
            H = H.astype(complex)
        if H.shape != (len(self.basis), len(self.basis)):
            raise DimensionError(f"H has shape {H.shape}, basis has {len(self.basis)} entries")
        self.H = H
        self.H.setflags(write=False)
        if check and not self.is_hermitian():
            raise ValueError("H is not Hermitian")

    @property
    def is_exact(self) -> bool:
        return self.H.dtype == object and all(isinstance(c, Surd) for c in self.H.flat)

    def is_hermitian(self, atol: float = HERMITIAN_TOL) -> bool:
        if self.H.size == 0:
            return True
        if self.is_exact:
            k = len(self.basis)
            return all(self.H[i, j] == self.H[j, i].conjugate() for i in range(k) for j in range(i, k))
        Hc = self.H.astype(complex)
        return float(np.max(np.abs(Hc - Hc.conj().T))) <= atol * max(1.0, float(np.max(np.abs(Hc))))

    # -- sparse view ------------------------------------------------------

    def entries(self) -> dict[tuple[Exp, Exp], object]:
        """Nonzero entries keyed by ``(row exponent, column exponent)``."""
        out = {}
        for i, b in enumerate(self.basis):
            for j, a in enumerate(self.basis):
                c = self.H[i, j]
                if not _negligible(c, 0.0):
                    out[(b, a)] = c
        return out

    @classmethod
    def from_entries(cls, nvars: int, entries: Mapping, atol: float = PRUNE_TOL) -> HermitianForm:
        """Build from a ``{(row_exp, col_exp): coeff}`` map, dropping negligible entries."""
        kept = {k: v for k, v in entries.items() if not _negligible(v, atol)}
        basis = sorted({e for pair in kept for e in pair}, key=grlex_key)
        idx = {b: i for i, b in enumerate(basis)}
        exact = any(isinstance(v, Surd) for v in kept.values())
        if exact and all(isinstance(v, Surd) for v in kept.values()):
            H = np.empty((len(basis), len(basis)), dtype=object)
            H[:] = Surd(0)
            for (b, a), v in kept.items():
                H[idx[b], idx[a]] = v
        else:
            H = np.zeros((len(basis), len(basis)), dtype=complex)
            for (b, a), v in kept.items():
                H[idx[b], idx[a]] = complex(v)
        return cls(nvars, basis, H, check=False)

    @classmethod
    def zero(cls, nvars: int) -> HermitianForm:
        return cls(nvars, [], np.zeros((0, 0), dtype=complex))

    # -- algebra ----------------------------------------------------------

    def _check(self, other: HermitianForm):
        if other.nvars != self.nvars:
            raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: HermitianForm) -> HermitianForm:
        self._check(other)
        d = self.entries()
        for k, v in other.entries().items():
            _acc(d, k, v)
        return HermitianForm.from_entries(self.nvars, d)

    def __neg__(self) -> HermitianForm:
        return HermitianForm(self.nvars, self.basis, -self.H, check=False)

    def __sub__(self, other: HermitianForm) -> HermitianForm:
        return self + (-other)

    def shift(self, j: int) -> HermitianForm:
        """Multiply the kernel by ``z_j * conj(zeta_j)``."""
        basis = [b[:j] + (b[j] + 1,) + b[j + 1 :] for b in self.basis]
        return HermitianForm(self.nvars, basis, self.H, check=False)

    def to_float(self) -> HermitianForm:
        return HermitianForm(self.nvars, self.basis, self.H.astype(complex), check=False)

    def full_box(self, degree: Sequence[int]) -> HermitianForm:
        """Re-express over every monomial with exponents bounded by ``degree``."""
        grids = np.meshgrid(*[np.arange(d + 1) for d in degree], indexing="ij")
        box = sorted({tuple(int(x) for x in e) for e in zip(*(g.ravel() for g in grids))}, key=grlex_key)
        missing = set(self.basis) - set(box)
        if missing:
            raise ValueError(f"basis elements {sorted(missing)} exceed the box {tuple(degree)}")
        idx = {b: i for i, b in enumerate(box)}
        H = np.zeros((len(box), len(box)), dtype=self.H.dtype)
        if H.dtype == object:
            H[:] = Surd(0)
        for i, b in enumerate(self.basis):
            for j, a in enumerate(self.basis):
                H[idx[b], idx[a]] = self.H[i, j]
        return HermitianForm(self.nvars, box, H, check=False)

    # -- evaluation -------------------------------------------------------

    def _monomials(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.nvars:
            raise DimensionError(f"point has {z.shape[0]} coordinates, expected {self.nvars}")
        if not self.basis:
            return np.zeros(0, dtype=complex)
        return np.prod(z[None, :] ** np.asarray(self.basis), axis=1)

    def __call__(self, z, zeta=None) -> complex:
        """Kernel value ``K(z, zeta)``; ``zeta`` defaults to ``z``."""
        mz = self._monomials(z)
        mw = mz if zeta is None else self._monomials(zeta)
        return complex(mw.conj() @ self.H.astype(complex) @ mz)

    def max_abs_coeff(self) -> float:
        if self.H.size == 0:
            return 0.0
        return float(max(abs(c) for c in self.H.flat))

    def is_zero(self, atol: float = 0.0) -> bool:
        if self.is_exact:
            return all(c.is_zero for c in self.H.flat)
        return self.max_abs_coeff() <= atol

    def __repr__(self):
        return f"HermitianForm(nvars={self.nvars}, size={len(self.basis)})"

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "basis": [list(b) for b in self.basis],
            "H": [[scalar_to_json(c) for c in row] for row in self.H],
        }

    @classmethod
    def from_json(cls, obj: Mapping, exact: bool = False) -> HermitianForm:
        basis = [tuple(b) for b in obj["basis"]]
        nvars = int(obj.get("nvars", len(basis[0]) if basis else 0))
        rows = [[scalar_from_json(c, exact) for c in row] for row in obj["H"]]
        H = np.empty((len(basis), len(basis)), dtype=object if exact else complex)
        if len(rows) != len(basis) or any(len(r) != len(basis) for r in rows):
            raise DimensionError("H must be square and match the basis")
        for i, r in enumerate(rows):
            for j, c in enumerate(r):
                H[i, j] = c
        return cls(nvars, basis, H)


def mod2diff(p: Poly, q: Poly) -> HermitianForm:
    """Form of ``p(z) conj(p(zeta)) - q(z) conj(q(zeta))`` over the union of supports."""
    if p.nvars != q.nvars:
        raise DimensionError(f"nvars mismatch: {p.nvars} vs {q.nvars}")
    d: dict = {}
    for poly, sign in ((p, 1), (q, -1)):
        for b, cb in poly.terms.items():
            cbc = cb.conjugate()
            for a, ca in poly.terms.items():
                _acc(d, (b, a), ca * cbc if sign > 0 else -(ca * cbc))
    form = HermitianForm.from_entries(p.nvars, d, atol=0.0)
    # keep every support monomial in the basis, even when its row cancels
    basis = sorted(set(p.terms) | set(q.terms), key=grlex_key)
    if set(basis) != set(form.basis):
        idx = {b: i for i, b in enumerate(basis)}
        H = np.zeros((len(basis), len(basis)), dtype=form.H.dtype)
        if H.dtype == object:
            H[:] = Surd(0)
        for i, b in enumerate(form.basis):
            for j, a in enumerate(form.basis):
                H[idx[b], idx[a]] = form.H[i, j]
        form = HermitianForm(p.nvars, basis, H, check=False)
    return form


def gram_form(F: VecPoly) -> HermitianForm:
    """The kernel ``<F(z), F(zeta)>``, i.e. ``H = Y^* Y``."""
    d: dict = {}
    for b, vb in F.terms.items():
        for a, va in F.terms.items():
            s = 0
            for x, y in zip(va, vb):
                s = s + x * y.conjugate()
            _acc(d, (b, a), s)
    return HermitianForm.from_entries(F.nvars, d, atol=0.0)


def subtract_sos(form: HermitianForm, cert) -> HermitianForm:
    """``form - sum_j (1 - z_j conj(zeta_j)) <F_j(z), F_j(zeta)>`` for a certificate."""
    if cert.nvars != form.nvars:
        raise DimensionError(f"nvars mismatch: {form.nvars} vs {cert.nvars}")
    d = form.entries()
    for j, F in enumerate(cert.faces):
        G = gram_form(F)
        for k, v in G.entries().items():
            _acc(d, k, -v)
        for k, v in G.shift(j).entries().items():
            _acc(d, k, v)
    return HermitianForm.from_entries(form.nvars, d, atol=0.0)


def torus_restrict(form: HermitianForm) -> LaurentPoly:
    """Restrict ``z = zeta`` to the torus: ``z^a conj(z)^b -> z^(a-b)``."""
    out: dict = {}
    for (b, a), c in form.entries().items():
        _acc(out, tuple(x - y for x, y in zip(a, b)), c)
    return LaurentPoly(form.nvars, out, atol=0.0)


def _is_small(c, atol: float) -> bool:
    if isinstance(c, Surd):
        return c.is_zero
    return abs(c) <= atol


def face_extract(p: Poly, q: Poly, j: int, atol: float = 1e-11) -> LaurentPoly:
    """Torus data of the ``j``-th sums-of-squares term.

    With ``|z_k| = 1`` for every ``k != j`` the kernel ``|p|^2 - |q|^2``
    becomes ``c0 + c1 |z_j|^2 + (cross terms)``.  For inner ``q/p`` with
    ``deg_{z_j} <= 1`` the cross terms vanish and ``c1 = -c0``, leaving
    ``(1 - |z_j|^2) c0``.  Returns ``c0`` as a Laurent polynomial in the
    remaining ``nvars - 1`` variables, in their original order.

    ``atol`` is relative to the largest coefficient of ``p`` and ``q``.
    """
    if p.nvars != q.nvars:
        raise DimensionError(f"nvars mismatch: {p.nvars} vs {q.nvars}")
    if not 0 <= j < p.nvars:
        raise DimensionError(f"variable index {j} out of range for {p.nvars} variables")
    dj = max(p.multidegree()[j], q.multidegree()[j])
    if dj > 1:
        raise UnsupportedDegreeError(
            f"face extraction needs degree <= 1 in z_{j}, got {dj}"
        )
    form = mod2diff(p, q)
    buckets: dict[tuple[int, int], dict] = {}
    for (b, a), c in form.entries().items():
        gamma = tuple(x - y for k, (x, y) in enumerate(zip(a, b)) if k != j)
        _acc(buckets.setdefault((a[j], b[j]), {}), gamma, c)
    n1 = p.nvars - 1
    c0 = LaurentPoly(n1, buckets.get((0, 0), {}), atol=0.0)
    c1 = LaurentPoly(n1, buckets.get((1, 1), {}), atol=0.0)
    scale = max(1.0, p.max_abs_coeff(), q.max_abs_coeff()) ** 2
    tol = atol * scale
    for key in ((1, 0), (0, 1)):
        cross = LaurentPoly(n1, buckets.get(key, {}), atol=0.0)
        if any(not _is_small(c, tol) for c in cross.terms.values()):
            raise FaceNotFactorableError(
                f"face {j}: nonzero cross terms in z_{j}; q/p is not inner or violates the degree hypothesis"
            )
    if any(not _is_small(c, tol) for c in (c0 + c1).terms.values()):
        raise FaceNotFactorableError(
            f"face {j}: constant and |z_{j}|^2 parts do not cancel; q/p is not inner"
        )
    return LaurentPoly(n1, {e: c for e, c in c0.terms.items() if not _is_small(c, tol)}, atol=0.0)
