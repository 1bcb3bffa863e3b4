"""Unitary transfer-function realizations ``f(z) = A + B E(z) (I - D E(z))^{-1} C``."""

from __future__ import annotations

import itertools
import warnings
from collections.abc import Mapping, Sequence

import numpy as np
from scipy.stats import unitary_group

from .exceptions import DegenerateInputError, DimensionError, NotIsometricError, SingularityError
from .polycore import Poly, VecPoly, grlex_key, scalar_from_json, scalar_to_json
from .soscert import SosCertificate
from .surd import Surd

__all__ = [
    "UNITARY_TOL",
    "Realization",
    "lurking_isometry",
    "transfer_eval",
    "to_rational",
    "decomposition_from_realization",
    "size",
    "random_realization",
    "stability_margin",
    "match_residual",
]

UNITARY_TOL = 1e-10
SPAN_TOL = 1e-10


def _conj_t(U: np.ndarray) -> np.ndarray:
    if U.dtype == object:
        return np.vectorize(lambda c: c.conjugate(), otypes=[object])(U).T
    return U.conj().T


class Realization:
    """Block unitary colligation ``U = [[A, B], [C, D]]`` with state dims per variable.

    ``U`` is a complex array, or an object array of :class:`Surd` for exact
    bundled data.  Row/column ``0`` is the scalar channel; the state rows
    are grouped by variable in ``dims`` order.
    """

    __slots__ = ("dims", "U")

    def __init__(self, dims: Sequence[int], U, check: bool = True, tol: float = UNITARY_TOL):
        self.dims = tuple(int(d) for d in dims)
        if any(d < 0 for d in self.dims):
            raise ValueError("dims must be non-negative")
        U = np.asarray(U)
        if U.dtype != object:
            U = U.astype(complex)
        n = 1 + sum(self.dims)
        if U.shape != (n, n):
            raise DimensionError(f"U has shape {U.shape}, expected {(n, n)} for dims {self.dims}")
        self.U = U
        self.U.setflags(write=False)
        if check:
            res = self.unitarity_residual()
            if res >= tol:
                raise ValueError(f"U is not unitary (residual {res:.3e})")

    @property
    def nvars(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return sum(self.dims)

    @property
    def is_exact(self) -> bool:
        return self.U.dtype == object

    @property
    def A(self):
        return self.U[0, 0]

    @property
    def B(self) -> np.ndarray:
        return self.U[0:1, 1:]

    @property
    def C(self) -> np.ndarray:
        return self.U[1:, 0:1]

    @property
    def D(self) -> np.ndarray:
        return self.U[1:, 1:]

    def block_of_state(self) -> list[int]:
        """Variable index for each state coordinate."""
        return [j for j, d in enumerate(self.dims) for _ in range(d)]

    def E(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.nvars:
            raise DimensionError(f"point has {z.shape[0]} coordinates, expected {self.nvars}")
        return np.diag(np.repeat(z, self.dims)) if self.size else np.zeros((0, 0), complex)

    def unitarity_residual(self) -> float:
        """``max |U^* U - I|``; exactly 0.0 for exact unitaries."""
        n = self.U.shape[0]
        if self.is_exact:
            G = _conj_t(self.U).dot(self.U)
            return float(max(abs(G[i, k] - (1 if i == k else 0)) for i in range(n) for k in range(n)))
        return float(np.max(np.abs(self.U.conj().T @ self.U - np.eye(n))))

    def to_float(self) -> Realization:
        return Realization(self.dims, self.U.astype(complex), check=False)

    def __call__(self, z) -> complex:
        return transfer_eval(self, z)

    def __repr__(self):
        return f"Realization(dims={self.dims}, size={self.size})"

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "U": [[scalar_to_json(c) for c in row] for row in self.U]}

    @classmethod
    def from_json(cls, obj: Mapping, exact: bool = False, tol: float = UNITARY_TOL) -> Realization:
        rows = [[scalar_from_json(c, exact) for c in row] for row in obj["U"]]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionError("U must be square")
        U = np.empty((n, n), dtype=object if exact else complex)
        for i, r in enumerate(rows):
            for k, c in enumerate(r):
                U[i, k] = c
        return cls(obj["dims"], U, tol=tol)


def size(r: Realization) -> int:
    return r.size


def transfer_eval(r: Realization, z, cond_max: float = 1e12) -> complex:
    """``A + B E(z) (I - D E(z))^{-1} C``."""
    Uf = r.U.astype(complex) if r.is_exact else r.U
    A = Uf[0, 0]
    if r.size == 0:
        r.E(z)  # dimension check
        return complex(A)
    E = r.E(z)
    M = np.eye(r.size) - Uf[1:, 1:] @ E
    if np.linalg.cond(M) > cond_max:
        raise SingularityError(f"I - D E(z) is singular at z = {np.asarray(z).tolist()}")
    x = np.linalg.solve(M, Uf[1:, 0])
    return complex(A + Uf[0, 1:] @ (E @ x))


def transfer_eval_many(r: Realization, Z) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    return np.array([transfer_eval(r, z) for z in Z])


# -- polynomial determinants ----------------------------------------------


def _poly_det(M: list[list[Poly]], nvars: int, one) -> Poly:
    """Determinant of a square matrix of polynomials by Laplace expansion.

    Memoized over the set of used columns (row = number of used columns),
    so the cost is ``O(2^n n)`` polynomial products.
    """
    n = len(M)
    if n == 0:
        return Poly.const(nvars, one)
    memo: dict[int, Poly] = {}

    def minor(mask: int) -> Poly:
        row = bin(mask).count("1")
        if row == n:
            return Poly.const(nvars, one)
        if mask in memo:
            return memo[mask]
        acc = Poly.zero(nvars)
        pos = 0
        for col in range(n):
            if mask >> col & 1:
                continue
            entry = M[row][col]
            if not entry.is_zero:
                term = entry * minor(mask | (1 << col))
                acc = acc - term if pos % 2 else acc + term
            pos += 1
        memo[mask] = acc
        return acc

    return minor(0)


def _entry_poly(nvars: int, const, coeff, var: int | None) -> Poly:
    """``const + coeff * z_var`` (``var=None`` for a constant)."""
    terms = {}
    zero = (0,) * nvars
    terms[zero] = const
    if var is not None:
        e = [0] * nvars
        e[var] = 1
        terms[tuple(e)] = coeff
    return Poly(nvars, terms)


def _resolvent_matrix(r: Realization) -> tuple[list[list[Poly]], object, object]:
    """Polynomial matrix ``I - D E(z)`` plus the scalar zero/one of the coefficient field."""
    n = r.nvars
    exact = r.is_exact
    zero = Surd(0) if exact else 0j
    one = Surd(1) if exact else 1 + 0j
    blk = r.block_of_state()
    D = r.D
    M = [
        [
            _entry_poly(n, one if i == k else zero, -D[i, k], blk[k])
            for k in range(r.size)
        ]
        for i in range(r.size)
    ]
    return M, zero, one


def to_rational(r: Realization) -> tuple[Poly, Poly]:
    """Recover ``(q, p)`` with ``p = det(I - D E)`` and ``q/p`` the transfer function.

    ``q = det([[A, -B E], [C, I - D E]]) = A det(I - DE) + B E adj(I - DE) C``.
    """
    n = r.nvars
    M, zero, one = _resolvent_matrix(r)
    p = _poly_det(M, n, one)
    blk = r.block_of_state()
    top = [_entry_poly(n, r.A, zero, None)] + [
        _entry_poly(n, zero, -r.B[0, k], blk[k]) for k in range(r.size)
    ]
    bordered = [top] + [
        [_entry_poly(n, r.C[i, 0], zero, None)] + M[i] for i in range(r.size)
    ]
    q = _poly_det(bordered, n, one)
    return q, p


def decomposition_from_realization(r: Realization) -> SosCertificate:
    """Certificate ``F = adj(I - D E(z)) C`` split by variable blocks.

    Component ``i`` of ``adj(M) C`` is ``det`` of ``M`` with column ``i``
    replaced by ``C`` (Cramer's rule).
    """
    n = r.nvars
    M, zero, one = _resolvent_matrix(r)
    Ccol = [_entry_poly(n, r.C[i, 0], zero, None) for i in range(r.size)]
    comps = []
    for i in range(r.size):
        Mi = [row[:i] + [Ccol[k]] + row[i + 1 :] for k, row in enumerate(M)]
        comps.append(_poly_det(Mi, n, one))
    faces = []
    start = 0
    for d in r.dims:
        faces.append(VecPoly.from_components(comps[start : start + d], nvars=n))
        start += d
    return SosCertificate(faces, n)


# -- lurking isometry ------------------------------------------------------


def _disk_grid() -> np.ndarray:
    """20 points of the closed disk: 12 on the circle, 7 at radius 1/2, and 0.

    Angles sit half a step off 1, so boundary zeros at z = 1 (common for
    inner functions) are not hit head-on.
    """
    outer = np.exp(2j * np.pi * (np.arange(12) + 0.5) / 12)
    inner = 0.5 * np.exp(2j * np.pi * (np.arange(7) + 0.5) / 7)
    return np.concatenate([outer, inner, [0]])


def stability_margin(p: Poly, max_grid: int = 160_000, seed: int = 0) -> float:
    """Minimum ``|p|`` over a ``20^n`` grid of the closed polydisk.

    A heuristic for "p has no zeros on the polydisk", not a proof.  When
    ``20^n`` exceeds ``max_grid`` random points of the closed polydisk
    are used instead.
    """
    n = p.nvars
    if 20**n <= max_grid:
        Z = np.array(list(itertools.product(_disk_grid(), repeat=n)))
    else:
        rng = np.random.default_rng(seed)
        Z = np.sqrt(rng.random((max_grid, n))) * np.exp(2j * np.pi * rng.random((max_grid, n)))
    return float(np.min(np.abs(p.eval_many(Z))))


def _left_right(p: Poly, q: Poly, cert: SosCertificate):
    n = p.nvars
    left = [p]
    right = [q]
    for j, F in enumerate(cert.faces):
        e = [0] * n
        e[j] = 1
        left.extend(F.mul_monomial(e).components())
        right.extend(F.components())
    basis = sorted(set().union(*(c.terms for c in left + right)), key=grlex_key)
    L = np.array([[complex(c.coeff(b)) for b in basis] for c in left], dtype=complex)
    R = np.array([[complex(c.coeff(b)) for b in basis] for c in right], dtype=complex)
    return L, R


def _complement(Q: np.ndarray, r: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``range(Q)`` (rank ``r``)."""
    Uq, _, _ = np.linalg.svd(Q, full_matrices=True)
    return Uq[:, r:]


def lurking_isometry(
    p: Poly,
    q: Poly,
    cert: SosCertificate,
    tol: float = 1e-10,
    check_stability: bool = True,
) -> Realization:
    """Build a unitary realization of ``q/p`` from a sums-of-squares certificate.

    The map ``[p; z_1 F_1; ...; z_n F_n] -> [q; F_1; ...; F_n]`` is isometric
    on the span of its left-hand values exactly when ``L^* L = R^* R`` for the
    coefficient matrices over the joint monomial basis.  It is solved on
    ``range(L)`` and extended to a unitary by matching orthonormal bases of
    the two orthogonal complements in order.
    """
    if not (p.nvars == q.nvars == cert.nvars):
        raise DimensionError("p, q and the certificate disagree on nvars")
    p, q = p.to_float(), q.to_float()
    if abs(p.coeff((0,) * p.nvars)) <= tol * max(1.0, p.max_abs_coeff()):
        raise DegenerateInputError("p(0) = 0: q/p cannot be a rational inner function as given")
    if check_stability and p.nvars:
        m = stability_margin(p)
        if m < 1e-8:
            warnings.warn(
                f"min |p| on the torus grid is {m:.2e}; p may vanish on the polydisk",
                RuntimeWarning,
                stacklevel=2,
            )
    cert = cert.to_float().trim()
    L, R = _left_right(p, q, cert)
    scale = max(1.0, float(np.max(np.abs(L))), float(np.max(np.abs(R)))) ** 2
    gap = float(np.max(np.abs(L.conj().T @ L - R.conj().T @ R))) if L.size else 0.0
    if gap > tol * scale:
        raise NotIsometricError(
            f"not isometric: certificate invalid (max |L*L - R*R| = {gap:.3e})"
        )
    Ul, s, Vh = np.linalg.svd(L, full_matrices=True)
    rank = int(np.sum(s > SPAN_TOL * s[0])) if s.size and s[0] > 0 else 0
    Ql, Ql_perp = Ul[:, :rank], Ul[:, rank:]
    Qr = R @ Vh[:rank].conj().T / s[:rank]
    Qr_perp = _complement(Qr, rank) if rank else np.eye(L.shape[0], dtype=complex)
    W = Qr @ Ql.conj().T + Qr_perp @ Ql_perp.conj().T
    # nearest unitary (polar factor) removes rounding drift
    X, _, Yh = np.linalg.svd(W)
    U = X @ Yh
    return Realization(cert.dims, U)


def match_residual(r: Realization, p: Poly, q: Poly, npts: int = 50, seed: int = 0, radius: float = 0.95) -> float:
    """Max ``|transfer_eval(r, z) - q(z)/p(z)|`` over random interior points."""
    Z = random_polydisk_points(r.nvars, npts, seed, radius)
    vals = transfer_eval_many(r, Z)
    target = q.eval_many(Z) / p.eval_many(Z)
    return float(np.max(np.abs(vals - target))) if npts else 0.0


def random_polydisk_points(n: int, npts: int, seed: int = 0, radius: float = 0.95) -> np.ndarray:
    """Uniform samples from the polydisk of the given radius (area measure per coordinate)."""
    rng = np.random.default_rng(seed)
    rad = radius * np.sqrt(rng.random((npts, n)))
    return rad * np.exp(2j * np.pi * rng.random((npts, n)))


def random_realization(dims: Sequence[int], seed=None) -> Realization:
    """Realization with a Haar-random unitary colligation."""
    n = 1 + sum(dims)
    rng = np.random.default_rng(seed)
    U = unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random((1, 1)))
    return Realization(dims, np.atleast_2d(U))
