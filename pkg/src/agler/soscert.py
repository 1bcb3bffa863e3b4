"""Sums-of-squares certificates for rational inner functions.

A certificate for ``f = q/p`` is a tuple of vector polynomials
``(F_1, ..., F_n)`` with

    p(z) conj(p(zeta)) - q(z) conj(q(zeta))
        = sum_j (1 - z_j conj(zeta_j)) <F_j(z), F_j(zeta)>.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, NotPSDError
from .hermform import HermitianForm, gram_form, mod2diff, subtract_sos
from .polycore import Poly, VecPoly, amplify
from .surd import Surd

__all__ = [
    "RANK_TOL",
    "SosCertificate",
    "FaceReport",
    "gram_factor",
    "verify_decomposition",
    "check_degree_bounds",
    "radial_polys",
    "radial_check",
    "face_count_bound",
]

RANK_TOL = 1e-10


def _numerical_rank(Y: np.ndarray, tol: float = RANK_TOL) -> int:
    if Y.size == 0:
        return 0
    s = np.linalg.svd(np.asarray(Y, dtype=complex), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


class SosCertificate:
    """An n-tuple of vector polynomials; faces with ``dim == 0`` are kept explicitly."""

    __slots__ = ("nvars", "faces")

    def __init__(self, faces: Sequence[VecPoly], nvars: int | None = None):
        faces = tuple(faces)
        if nvars is None:
            if not faces:
                raise ValueError("nvars is required for an empty certificate")
            nvars = faces[0].nvars
        if len(faces) != nvars:
            raise DimensionError(f"{len(faces)} faces for {nvars} variables")
        for F in faces:
            if F.nvars != nvars:
                raise DimensionError("faces disagree on nvars")
        self.nvars = int(nvars)
        self.faces = faces

    @classmethod
    def empty(cls, nvars: int) -> SosCertificate:
        return cls([VecPoly(nvars, 0) for _ in range(nvars)], nvars)

    @classmethod
    def from_polys(cls, faces: Sequence[Sequence[Poly]], nvars: int) -> SosCertificate:
        """Build from lists of scalar polynomials, one list per variable."""
        return cls(
            [VecPoly.from_components(list(comps), nvars=nvars) for comps in faces], nvars
        )

    @property
    def dims(self) -> tuple[int, ...]:
        """Raw vector lengths of the faces."""
        return tuple(F.dim for F in self.faces)

    @property
    def counts(self) -> tuple[int, ...]:
        """``N_j``: dimension of the span of the components of ``F_j``."""
        return tuple(_numerical_rank(F.coeff_matrix()[0]) for F in self.faces)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Surd) for F in self.faces for v in F.terms.values() for c in v)

    def to_float(self) -> SosCertificate:
        return SosCertificate([F.to_float() for F in self.faces], self.nvars)

    def with_face(self, j: int, F: VecPoly) -> SosCertificate:
        faces = list(self.faces)
        faces[j] = F
        return SosCertificate(faces, self.nvars)

    def trim(self) -> SosCertificate:
        """Replace each face by an equivalent one with linearly independent components.

        Faces that already have full rank are returned untouched (exactness kept).
        """
        out = []
        for F in self.faces:
            Y, _ = F.coeff_matrix()
            if _numerical_rank(Y) == F.dim:
                out.append(F)
            else:
                out.append(gram_factor(gram_form(F)))
        return SosCertificate(out, self.nvars)

    def amplify(self, j: int, M: int) -> SosCertificate:
        """Certificate for ``q/p`` after ``z_j -> z_j**M``.

        Uses ``1 - |z_j|^{2M} = (1 - |z_j|^2) sum_{i<M} |z_j|^{2i}``, so face
        ``j`` becomes the stack of ``z_j^i F_j(..., z_j^M, ...)`` for
        ``i < M``; other faces are only substituted.
        """
        faces = []
        for k, F in enumerate(self.faces):
            G = amplify(F, j, M)
            if k == j:
                shifts = []
                for i in range(M):
                    e = [0] * self.nvars
                    e[j] = i
                    shifts.append(G.mul_monomial(e))
                G = VecPoly.stack(shifts) if G.dim else G
            faces.append(G)
        return SosCertificate(faces, self.nvars)

    def __repr__(self):
        return f"SosCertificate(nvars={self.nvars}, dims={self.dims})"

    def to_json(self) -> dict:
        return {"nvars": self.nvars, "faces": [F.to_json() for F in self.faces]}

    @classmethod
    def from_json(cls, obj: Mapping, exact: bool = False) -> SosCertificate:
        faces = [VecPoly.from_json(f, exact) for f in obj["faces"]]
        return cls(faces, obj.get("nvars"))


def gram_factor(form: HermitianForm, tol: float = RANK_TOL) -> VecPoly:
    """Factor a PSD form as ``<V(z), V(zeta)>``.

    Uses a Hermitian eigendecomposition ``H = sum_k lam_k v_k v_k^*`` and
    sets the k-th component coefficients to ``sqrt(lam_k) conj(v_k)``.
    Eigenvalues in ``[-tol*|H|, tol*|H|]`` are treated as zero; anything
    more negative raises :class:`NotPSDError`.
    """
    n = len(form.basis)
    if n == 0:
        return VecPoly(form.nvars, 0)
    H = form.H.astype(complex)
    H = 0.5 * (H + H.conj().T)
    lam, vecs = np.linalg.eigh(H)
    norm = float(np.max(np.abs(lam)))
    if norm == 0.0:
        return VecPoly(form.nvars, 0)
    if lam[0] < -tol * norm:
        raise NotPSDError(float(lam[0]), tol * norm)
    keep = lam > tol * norm
    # largest eigenvalues first for a deterministic component order
    idx = np.nonzero(keep)[0][::-1]
    Y = np.sqrt(lam[idx])[:, None] * vecs[:, idx].conj().T
    return VecPoly.from_matrix(Y, form.basis, form.nvars)


def verify_decomposition(p: Poly, q: Poly, cert: SosCertificate) -> float:
    """Max coefficient magnitude of the residual kernel; 0 means a valid decomposition.

    With exact (Surd) inputs the residual is computed without rounding and
    is ``0.0`` exactly when the identity holds.
    """
    if not (p.nvars == q.nvars == cert.nvars):
        raise DimensionError("p, q and the certificate disagree on nvars")
    return subtract_sos(mod2diff(p, q), cert).max_abs_coeff()


@dataclass(frozen=True)
class FaceReport:
    face: int
    multidegree: tuple[int, ...]
    degree_bound: tuple[int, ...]
    count: int
    count_bound: int
    violation: tuple[int, ...] | None
    degree_ok: bool
    count_ok: bool

    @property
    def ok(self) -> bool:
        return self.degree_ok and self.count_ok


def face_count_bound(d: Sequence[int], j: int) -> int:
    """``d_j * prod_{k != j} (d_k + 1)``."""
    out = d[j]
    for k, dk in enumerate(d):
        if k != j:
            out *= dk + 1
    return out


def check_degree_bounds(cert: SosCertificate, d: Sequence[int]) -> list[FaceReport]:
    """Check ``multidegree(F_j) <= d - e_j`` and ``N_j <= d_j prod_{k!=j}(d_k+1)`` per face."""
    d = tuple(int(x) for x in d)
    if len(d) != cert.nvars:
        raise DimensionError(f"degree bound has length {len(d)}, expected {cert.nvars}")
    counts = cert.counts
    reports = []
    for j, F in enumerate(cert.faces):
        bound = tuple(dk - (k == j) for k, dk in enumerate(d))
        violation = None
        for e in F.support():
            if any(x > b for x, b in zip(e, bound)):
                violation = e
                break
        nb = face_count_bound(d, j)
        reports.append(
            FaceReport(
                face=j,
                multidegree=F.multidegree(),
                degree_bound=bound,
                count=counts[j],
                count_bound=nb,
                violation=violation,
                degree_ok=violation is None,
                count_ok=counts[j] <= nb,
            )
        )
    return reports


def _abs2(c):
    return c * c.conjugate()


def radial_polys(p: Poly, q: Poly, cert: SosCertificate) -> tuple[list, list]:
    """Coefficient lists (in ``s = |t|^2``) of both sides of the radial identity.

    LHS: ``sum_a s^|a| (|p_a|^2 - |q_a|^2)``.
    RHS: ``(1 - s) sum_j sum_a |F_{j,a}|^2 s^|a|``.
    """
    lhs: dict[int, object] = {}
    for poly, sign in ((p, 1), (q, -1)):
        for a, c in poly.terms.items():
            v = _abs2(c)
            k = sum(a)
            lhs[k] = lhs[k] + (v if sign > 0 else -v) if k in lhs else (v if sign > 0 else -v)
    inner: dict[int, object] = {}
    for F in cert.faces:
        for a, vec in F.terms.items():
            v = 0
            for c in vec:
                v = v + _abs2(c)
            k = sum(a)
            inner[k] = inner[k] + v if k in inner else v
    rhs: dict[int, object] = {}
    for k, v in inner.items():
        rhs[k] = rhs[k] + v if k in rhs else v
        rhs[k + 1] = rhs[k + 1] - v if k + 1 in rhs else -v
    top = max([*lhs, *rhs, 0])
    return [lhs.get(k, 0) for k in range(top + 1)], [rhs.get(k, 0) for k in range(top + 1)]


def radial_check(p: Poly, q: Poly, cert: SosCertificate) -> float:
    """Max coefficient mismatch of the zeroth-Fourier-coefficient identity."""
    lhs, rhs = radial_polys(p, q, cert)
    return float(max((abs(a - b) for a, b in zip(lhs, rhs)), default=0.0))
