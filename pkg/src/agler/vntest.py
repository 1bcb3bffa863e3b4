"""Random probes of the von Neumann inequality ``||f(T)|| <= 1``.

Only simultaneously diagonalizable tuples ``T_j = S D_j S^{-1}`` are drawn.
They commute exactly, and the similarity ``S`` makes them non-normal.
A probe can expose a violation but never certifies membership in the
Schur-Agler class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from .exceptions import DimensionError, SingularityError
from .polycore import Poly, eval_matrix_poly

__all__ = ["ContractionTuple", "random_tuple", "vn_norm", "VNProbe", "vn_probe"]

COND_CAP = 10.0


@dataclass(frozen=True)
class ContractionTuple:
    mats: tuple[np.ndarray, ...]
    rho: float
    similarity: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def m(self) -> int:
        return self.mats[0].shape[0]

    def norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(T, 2) for T in self.mats])

    def commutator_residual(self) -> float:
        out = 0.0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                Ti, Tj = self.mats[i], self.mats[j]
                out = max(out, float(np.max(np.abs(Ti @ Tj - Tj @ Ti))))
        return out


def _disk(rng: np.random.Generator, size) -> np.ndarray:
    return np.sqrt(rng.random(size)) * np.exp(2j * np.pi * rng.random(size))


def random_tuple(n: int, m: int, rho: float = 0.99, seed=None) -> ContractionTuple:
    """Commuting ``n``-tuple of ``m x m`` matrices with ``||T_j|| = rho * u_j``, ``u_j ~ U(0.5, 1]``.

    ``S = Q_1 diag(sigma) Q_2`` with Haar unitaries and singular values in
    ``[1, COND_CAP]``, so ``cond(S) <= COND_CAP`` by construction.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    if m == 1:
        S = np.ones((1, 1), dtype=complex)
    else:
        sig = 1 + (COND_CAP - 1) * rng.random(m)
        sig[0], sig[-1] = 1.0, COND_CAP * (0.5 + 0.5 * rng.random())
        Q1 = unitary_group.rvs(m, random_state=rng)
        Q2 = unitary_group.rvs(m, random_state=rng)
        S = Q1 @ np.diag(sig) @ Q2
    Sinv = np.linalg.inv(S)
    mats = []
    for _ in range(n):
        T = S @ np.diag(_disk(rng, m)) @ Sinv
        u = 1.0 - 0.5 * rng.random()  # (0.5, 1]
        nrm = np.linalg.norm(T, 2)
        mats.append(T * (rho * u / nrm) if nrm > 0 else T)
    return ContractionTuple(tuple(mats), rho, S)


def vn_norm(q: Poly, p: Poly, T: ContractionTuple, cond_max: float = 1e12) -> float:
    """Operator norm of ``q(T) p(T)^{-1}``."""
    if not (q.nvars == p.nvars == T.n):
        raise DimensionError(f"{T.n} matrices for {p.nvars}-variable functions")
    P = eval_matrix_poly(p, T.mats)
    if np.linalg.cond(P) > cond_max:
        raise SingularityError("p(T) is numerically singular")
    Q = eval_matrix_poly(q, T.mats)
    return float(np.linalg.norm(np.linalg.solve(P.T, Q.T).T, 2))


@dataclass
class VNProbe:
    trials: int
    max_norm: float
    argmax_trial: int
    tol: float
    norms: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.max_norm <= 1 + self.tol


def vn_probe(
    q: Poly,
    p: Poly,
    trials: int = 1000,
    dim: int = 6,
    rho: float = 0.99,
    seed: int = 0,
    tol: float = 1e-8,
) -> VNProbe:
    """Max of ``vn_norm`` over seeded random tuples with sizes cycling through ``1..dim``."""
    norms = np.empty(trials)
    for t in range(trials):
        m = 1 + t % dim
        T = random_tuple(p.nvars, m, rho, seed=[seed, t])
        norms[t] = vn_norm(q, p, T)
    i = int(np.argmax(norms)) if trials else -1
    return VNProbe(trials, float(norms[i]) if trials else 0.0, i, tol, norms)
