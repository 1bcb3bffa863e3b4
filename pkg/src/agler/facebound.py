"""Square counts for degree-(1,1) trigonometric data on the 2-torus.

Each sums-of-squares term of a certificate restricted to a torus face is a
real trigonometric polynomial

    T(z, w) = c00 + 2 Re(c10 z + c01 w + c11 z w + c1m1 z conj(w))

and a single square ``|a + b z + c w + d z w|^2`` matches it iff

    |a|^2 + |b|^2 + |c|^2 + |d|^2 = c00      (const)
    conj(a) b + conj(c) d = c10              (z)
    conj(a) c + conj(b) d = c01              (w)
    conj(a) d = c11                          (zw)
    b conj(c) = c1m1                         (z/w)

The one-square question is settled by a closed-form case analysis; two or
more squares are searched for numerically.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .exceptions import UnsupportedDegreeError
from .hermform import face_extract
from .polycore import LaurentPoly, Poly

__all__ = [
    "FaceData",
    "SquareAnsatz",
    "CaseBranch",
    "SingleSquareResult",
    "SearchResult",
    "MinSquaresResult",
    "FaceBound",
    "ansatz_coeffs",
    "single_square_feasible",
    "square_search",
    "min_squares",
    "face_bounds",
    "size_lower_bound",
]

# Laurent exponent (in (z, w)) of each stored coefficient
_EXPONENTS = {"c10": (1, 0), "c01": (0, 1), "c11": (1, 1), "c1m1": (1, -1)}


@dataclass(frozen=True)
class FaceData:
    """Fourier data of a real trigonometric polynomial of bidegree <= (1, 1).

    ``c1m1`` is the coefficient of ``z conj(w)``; the coefficient of
    ``conj(z) w`` is its conjugate.
    """

    c00: float
    c10: complex = 0j
    c01: complex = 0j
    c11: complex = 0j
    c1m1: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "c00", float(np.real(self.c00)))
        for name in _EXPONENTS:
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_laurent(cls, lp: LaurentPoly, atol: float = 1e-11) -> FaceData:
        """Read data from a conjugate-symmetric Laurent polynomial in at most 2 variables."""
        if lp.nvars > 2:
            raise UnsupportedDegreeError(f"face data in {lp.nvars} variables is not supported")
        if not lp.is_conj_symmetric(atol * max(1.0, lp.max_abs_coeff())):
            raise ValueError("face data is not real on the torus")
        pad = (0,) * (2 - lp.nvars)
        vals = {}
        for e, c in lp.terms.items():
            e2 = tuple(e) + pad
            if e2 == (0, 0):
                vals["c00"] = complex(c)
                continue
            for name, ex in _EXPONENTS.items():
                if e2 == ex:
                    vals[name] = complex(c)
                    break
                if e2 == (-ex[0], -ex[1]):
                    break
            else:
                raise UnsupportedDegreeError(f"exponent {e} outside bidegree (1, 1)")
        c00 = vals.pop("c00", 0j)
        if abs(c00.imag) > atol * max(1.0, abs(c00)):
            raise ValueError("constant term must be real")
        return cls(c00.real, **vals)

    def to_laurent(self) -> LaurentPoly:
        terms = {(0, 0): complex(self.c00)}
        for name, (i, k) in _EXPONENTS.items():
            v = getattr(self, name)
            terms[(i, k)] = v
            terms[(-i, -k)] = v.conjugate()
        return LaurentPoly(2, terms)

    def as_vector(self) -> np.ndarray:
        """The nine independent real numbers (c00, then real/imag parts)."""
        out = [self.c00]
        for name in _EXPONENTS:
            v = getattr(self, name)
            out += [v.real, v.imag]
        return np.array(out)

    def scale(self, lam: float) -> FaceData:
        return FaceData(self.c00 * lam, self.c10 * lam, self.c01 * lam, self.c11 * lam, self.c1m1 * lam)

    def magnitude(self) -> float:
        return float(np.max(np.abs(self.as_vector())))

    def __call__(self, z, w) -> float:
        return self.to_laurent().eval([z, w]).real


@dataclass(frozen=True)
class SquareAnsatz:
    """Coefficients of ``a + b z + c w + d z w``."""

    a: complex = 0j
    b: complex = 0j
    c: complex = 0j
    d: complex = 0j

    def as_poly(self) -> Poly:
        return Poly(2, {(0, 0): self.a, (1, 0): self.b, (0, 1): self.c, (1, 1): self.d})

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)


def ansatz_coeffs(s: SquareAnsatz | Sequence[SquareAnsatz]) -> FaceData:
    """Torus Fourier data of ``|a + bz + cw + dzw|^2`` (summed over a list of squares)."""
    squares = [s] if isinstance(s, SquareAnsatz) else list(s)
    X = np.array([q.as_array() for q in squares], dtype=complex).reshape(1, -1, 4)
    return FaceData(*_model(X)[0])


def _model(X: np.ndarray) -> np.ndarray:
    """Batched coefficients ``(c00, c10, c01, c11, c1m1)`` for ``X`` of shape (K, r, 4)."""
    a, b, c, d = (X[..., k] for k in range(4))
    ac, bc, cc = a.conj(), b.conj(), c.conj()
    out = np.empty((X.shape[0], 5), dtype=complex)
    out[:, 0] = np.sum(np.abs(X) ** 2, axis=(1, 2))
    out[:, 1] = np.sum(ac * b + cc * d, axis=1)
    out[:, 2] = np.sum(ac * c + bc * d, axis=1)
    out[:, 3] = np.sum(ac * d, axis=1)
    out[:, 4] = np.sum(b * cc, axis=1)
    return out


# products conj(u) * v contributing to each complex coefficient, by slot index
_PRODUCTS = {1: [(0, 1), (2, 3)], 2: [(0, 2), (1, 3)], 3: [(0, 3)], 4: [(2, 1)]}


def _residual_and_jac(X: np.ndarray, target: np.ndarray):
    """Real residual (K, 9) and Jacobian (K, 9, 8r) w.r.t. (re, im) of each slot."""
    K, r, _ = X.shape
    m = _model(X) - target[None, :]
    res = np.empty((K, 9))
    res[:, 0] = m[:, 0].real
    res[:, 1::2] = m[:, 1:].real
    res[:, 2::2] = m[:, 1:].imag
    # complex derivatives: dC[k] has shape (K, r, 4 slots, 2 parts)
    J = np.zeros((K, 9, r, 4, 2))
    J[:, 0, :, :, 0] = 2 * X.real
    J[:, 0, :, :, 1] = 2 * X.imag
    for k, prods in _PRODUCTS.items():
        dC = np.zeros((K, r, 4, 2), dtype=complex)
        for u, v in prods:
            dC[:, :, u, 0] += X[:, :, v]
            dC[:, :, u, 1] += -1j * X[:, :, v]
            dC[:, :, v, 0] += X[:, :, u].conj()
            dC[:, :, v, 1] += 1j * X[:, :, u].conj()
        J[:, 2 * k - 1] = dC.real
        J[:, 2 * k] = dC.imag
    return res, J.reshape(K, 9, 8 * r)


def _pack(X: np.ndarray) -> np.ndarray:
    return np.stack([X.real, X.imag], axis=-1).reshape(X.shape[0], -1)


def _unpack(x: np.ndarray, r: int) -> np.ndarray:
    y = x.reshape(x.shape[0], r, 4, 2)
    return y[..., 0] + 1j * y[..., 1]


def _levenberg_marquardt(X0: np.ndarray, target: np.ndarray, iters: int = 200, ctol: float = 1e-12):
    """Batched Levenberg-Marquardt over independent starts; returns (X, residual norms).

    A start stops once its residual norm drops below ``ctol`` times the data
    scale, or once an accepted step no longer reduces the cost measurably.
    """
    K, r, _ = X0.shape
    x = _pack(X0)
    res, J = _residual_and_jac(X0, target)
    cost = np.sum(res**2, axis=1)
    lam = np.full(K, 1e-3)
    eye = np.eye(8 * r)
    stop = (ctol * max(1.0, float(np.max(np.abs(target))))) ** 2
    active = cost > stop
    for _ in range(iters):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        Ja, ra = J[idx], res[idx]
        JtJ = np.einsum("kij,kil->kjl", Ja, Ja)
        g = np.einsum("kij,ki->kj", Ja, ra)
        scale = np.maximum(np.einsum("kjj->kj", JtJ).max(axis=1), 1e-12)
        A = JtJ + (lam[idx] * scale)[:, None, None] * eye
        step = np.linalg.solve(A, -g[..., None])[..., 0]
        xn = x[idx] + step
        rn, Jn = _residual_and_jac(_unpack(xn, r), target)
        cn = np.sum(rn**2, axis=1)
        better = cn < cost[idx]
        acc = idx[better]
        stalled = acc[(cost[acc] - cn[better]) <= 1e-13 * cost[acc]]
        x[acc], res[acc], J[acc], cost[acc] = xn[better], rn[better], Jn[better], cn[better]
        lam[acc] = np.maximum(lam[acc] / 3, 1e-15)
        rej = idx[~better]
        lam[rej] = lam[rej] * 4
        active[stalled] = False
        active &= (cost > stop) & (lam < 1e12)
    return _unpack(x, r), np.sqrt(cost)


@dataclass
class SearchResult:
    """Outcome of a multi-start least-squares search with ``r`` squares."""

    r: int
    starts: int
    best_residual: float
    best_start: int
    squares: list[SquareAnsatz]
    residuals: np.ndarray = field(repr=False)


def square_search(
    data: FaceData,
    r: int,
    starts: int = 1000,
    seed: int = 0,
    iters: int = 200,
    batch: int = 20_000,
) -> SearchResult:
    """Fit ``r`` squares to ``data`` from ``starts`` seeded random initializations.

    Starts are complex Gaussian with per-coefficient scale ``sqrt(c00/4)``.
    The residual is the Euclidean norm of the nine real coefficient
    mismatches.  Ties in residual go to the lowest start index.
    """
    rng = np.random.default_rng(seed)
    target = np.array([data.c00, data.c10, data.c01, data.c11, data.c1m1], dtype=complex)
    sigma = math.sqrt(max(data.c00, 1e-300) / 4)
    all_res = np.empty(starts)
    best = (np.inf, -1, None)
    for lo in range(0, starts, batch):
        k = min(batch, starts - lo)
        X0 = sigma * (rng.standard_normal((k, r, 4)) + 1j * rng.standard_normal((k, r, 4))) / math.sqrt(2)
        X, res = _levenberg_marquardt(X0, target, iters=iters)
        all_res[lo : lo + k] = res
        i = int(np.argmin(res))
        if res[i] < best[0]:
            best = (float(res[i]), lo + i, X[i])
    squares = [SquareAnsatz(*row) for row in best[2]] if best[2] is not None else []
    return SearchResult(r, starts, best[0], best[1], squares, all_res)


# -- exact case analysis for one square --------------------------------------


@dataclass
class CaseBranch:
    name: str
    feasible: bool
    steps: list[str] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    contradiction: str | None = None
    witness: SquareAnsatz | None = None


@dataclass
class SingleSquareResult:
    feasible: bool
    witness: SquareAnsatz | None
    branches: list[CaseBranch]
    search: SearchResult | None = None

    @property
    def search_residual(self) -> float | None:
        return None if self.search is None else self.search.best_residual

    def branch(self, name: str) -> CaseBranch:
        for b in self.branches:
            if b.name == name:
                return b
        raise KeyError(name)


def _witness_residual(data: FaceData, s: SquareAnsatz) -> float:
    return float(np.linalg.norm(ansatz_coeffs(s).as_vector() - data.as_vector()))


def _accept(branch: CaseBranch, data: FaceData, s: SquareAnsatz, tol: float) -> CaseBranch:
    res = _witness_residual(data, s)
    if res > tol:
        # polish: closed forms come from root finding in the general case
        X, r = _levenberg_marquardt(s.as_array().reshape(1, 1, 4), _target(data), iters=50)
        if r[0] < res:
            s, res = SquareAnsatz(*X[0, 0]), float(r[0])
    branch.values["witness_residual"] = res
    if res <= tol:
        branch.feasible = True
        branch.witness = s
        branch.steps.append(f"witness {s} reproduces the data (residual {res:.2e})")
    else:
        branch.contradiction = f"candidate witness leaves residual {res:.2e}"
        branch.steps.append(branch.contradiction)
    return branch


def _target(data: FaceData) -> np.ndarray:
    return np.array([data.c00, data.c10, data.c01, data.c11, data.c1m1], dtype=complex)


def _fail(branch: CaseBranch, msg: str) -> CaseBranch:
    branch.contradiction = msg
    branch.steps.append(f"contradiction: {msg}")
    return branch


def _one_vanishes(data: FaceData, which: str, tol: float, small) -> CaseBranch:
    """Branch where ``d = 0`` (``which='d'``) or ``a = 0`` (``which='a'``), the other nonzero.

    (z) and (w) fix the ratio ``|b| : |c|`` and (z/w) fixes ``|b| |c|``.
    (const) then gives the free coefficient; the modulus of (z) is the
    consistency test.
    """
    other = "a" if which == "d" else "d"
    br = CaseBranch(name=f"{which}=0", feasible=False)
    br.steps.append(f"assume {which} = 0, {other} != 0")
    c10, c01, c1m1, c00 = data.c10, data.c01, data.c1m1, data.c00
    if not small(data.c11):
        return _fail(br, f"(zw) needs conj(a) d = c11 = {data.c11:.6g}, impossible with {which} = 0")
    # d = 0: b = c10/conj(a), c = c01/conj(a).  a = 0: conj(c) = c10/d, conj(b) = c01/d.
    # In both cases (z/w) reads  c10 conj(c01) = c1m1 |free|^2  (up to conjugation).
    big_b, big_c = (c10, c01) if which == "d" else (c01, c10)
    if not small(c10) and not small(c01):
        if small(c1m1):
            return _fail(br, "(z) and (w) force b, c != 0 but (z/w) needs b conj(c) = 0")
        mb2 = abs(c1m1) * abs(big_b) / abs(big_c)
        mc2 = abs(c1m1) * abs(big_c) / abs(big_b)
        br.values.update({"|b|^2": mb2, "|c|^2": mc2})
        if abs(c10 - c01) <= tol:
            br.steps.append("(z) and (w) have equal right sides, so b = c")
            br.values["b=c"] = True
        br.steps.append(
            f"|b|/|c| from (z),(w) and |b||c| = |c1m1| from (z/w): |b|^2 = {mb2:.6g}, |c|^2 = {mc2:.6g}"
        )
        free2 = c00 - mb2 - mc2
        br.values[f"|{other}|^2"] = free2
        br.steps.append(f"(const): |{other}|^2 = c00 - |b|^2 - |c|^2 = {free2:.6g}")
        if free2 <= tol:
            return _fail(br, f"(const) leaves |{other}|^2 = {free2:.6g} <= 0")
        # modulus of (z): |a||b| = |c10| when d = 0, |c||d| = |c10| when a = 0
        partner2 = mb2 if which == "d" else mc2
        lhs = math.sqrt(free2 * partner2)
        br.values["|z-equation lhs|"] = lhs
        br.values["|c10|"] = abs(c10)
        pname = "b" if which == "d" else "c"
        if abs(lhs - abs(c10)) > tol:
            return _fail(
                br,
                f"(z) in modulus needs |{other}||{pname}| = |c10|, "
                f"but |{other}||{pname}| = sqrt({free2 * partner2:.6g}) = {lhs:.6g} != {abs(c10):.6g}",
            )
        ratio = (c10 * c01.conjugate() if which == "d" else c01.conjugate() * c10) / c1m1
        if abs(ratio - free2) > tol:
            return _fail(br, f"(z/w) phase: c10 conj(c01) / c1m1 = {ratio:.6g} is not |{other}|^2")
        y = free2
    else:
        if not small(c1m1):
            return _fail(br, "one of b, c vanishes by (z)/(w), so (z/w) needs c1m1 = 0")
        s2 = abs(c10) ** 2 + abs(c01) ** 2
        disc = c00 * c00 - 4 * s2
        br.steps.append(f"|{other}|^2 solves y^2 - c00 y + (|c10|^2 + |c01|^2) = 0, discriminant {disc:.6g}")
        if disc < -tol:
            return _fail(br, f"no real |{other}|^2 (discriminant {disc:.6g} < 0)")
        y = (c00 + math.sqrt(max(disc, 0.0))) / 2
        if y <= tol:
            return _fail(br, f"|{other}|^2 = {y:.6g} is not positive")
        br.values[f"|{other}|^2"] = y
    t = math.sqrt(y)
    if which == "d":
        s = SquareAnsatz(a=t, b=c10 / t, c=c01 / t, d=0)
    else:
        s = SquareAnsatz(a=0, b=c01.conjugate() / t, c=c10.conjugate() / t, d=t)
    return _accept(br, data, s, tol)


def _both_vanish(data: FaceData, tol: float, small) -> CaseBranch:
    br = CaseBranch(name="a=d=0", feasible=False)
    br.steps.append("assume a = d = 0")
    for name in ("c10", "c01", "c11"):
        v = getattr(data, name)
        if not small(v):
            return _fail(br, f"with a = d = 0 the coefficient {name} must vanish, but {name} = {v:.6g}")
    m = abs(data.c1m1)
    if 2 * m > data.c00 + tol:
        return _fail(br, f"|b|^2 + |c|^2 = c00 = {data.c00:.6g} < 2|b||c| = {2 * m:.6g}")
    disc = max(data.c00**2 - 4 * m * m, 0.0)
    u = (data.c00 + math.sqrt(disc)) / 2
    if u <= tol:
        return _accept(br, data, SquareAnsatz(), tol)
    t = math.sqrt(u)
    return _accept(br, data, SquareAnsatz(b=t, c=data.c1m1.conjugate() / t), tol)


def _general(data: FaceData, tol: float, small) -> CaseBranch:
    """``a, d != 0``: fix ``a = sqrt(y) > 0``; every other unknown is rational in ``y``."""
    br = CaseBranch(name="a,d!=0", feasible=False)
    br.steps.append("assume a, d != 0; rotate so a = sqrt(y) > 0")
    c10, c01, c11, c1m1, c00 = data.c10, data.c01, data.c11, data.c1m1, data.c00
    if small(c11):
        return _fail(br, "(zw) gives conj(a) d = c11 = 0, so a = 0 or d = 0")
    P = np.polynomial.Polynomial
    k2 = abs(c11) ** 2
    delta = P([-k2, 0, 1])
    Py = P([-c11 * c01.conjugate(), c10])
    Qy = P([-c11.conjugate() * c10, c01.conjugate()])
    Pbar = P(np.conj(Py.coef))
    Qbar = P(np.conj(Qy.coef))
    yv = P([0, 1])
    # (const) * y * delta^2 with b = sqrt(y) P/delta, conj(c) = sqrt(y) Q/delta, d = c11/sqrt(y)
    poly = yv**2 * delta**2 + yv**2 * (Py * Pbar + Qy * Qbar) + k2 * delta**2 - c00 * yv * delta**2
    roots = poly.roots()
    cands = sorted(
        {round(float(z.real), 14) for z in roots if abs(z.imag) <= 1e-7 * max(1.0, abs(z)) and z.real > 0}
    )
    br.steps.append(f"(const) reduces to a degree-{poly.degree()} polynomial in y; positive roots {cands}")
    witnesses = []
    for y in cands:
        t = math.sqrt(y)
        d = c11 / t
        dv = delta(y)
        if abs(dv) <= 1e-12 * max(1.0, k2):
            continue
        b = t * Py(y) / dv
        c = (t * Qy(y) / dv).conjugate()
        witnesses.append(SquareAnsatz(a=t, b=b, c=c, d=d))
    # delta(y) = 0: the (z)/(w) system is singular; conj(c) solves a quadratic
    y0 = abs(c11)
    t0 = math.sqrt(y0)
    d0 = c11 / t0
    if abs(y0 * c01.conjugate() - c11.conjugate() * c10) <= tol * max(1.0, y0):
        for cbar in np.roots([d0, -c10, t0 * c1m1]):
            b = (c10 - d0 * cbar) / t0
            witnesses.append(SquareAnsatz(a=t0, b=b, c=np.conj(cbar), d=d0))
        br.steps.append("singular case |a|^2 = |c11| admitted as candidates")
    if not witnesses:
        return _fail(br, "no positive root of the reduced equation")
    best = min(witnesses, key=lambda s: _witness_residual(data, s))
    return _accept(br, data, best, tol)


def single_square_feasible(
    data: FaceData,
    tol: float = 1e-9,
    starts: int = 1000,
    seed: int = 0,
) -> SingleSquareResult:
    """Decide whether ``data`` is one square ``|a + bz + cw + dzw|^2``.

    The decision is the case analysis on the (zw) equation: if
    ``c11 != 0`` both ``a`` and ``d`` are nonzero, otherwise one of them
    vanishes.  Every branch either derives a contradiction or produces an
    explicit witness that is checked against the data.  A seeded
    multi-start least-squares search (``starts`` > 0) is run as an
    independent cross-check and reported alongside.

    ``tol`` is relative to the largest data coefficient.
    """
    scale = max(1.0, data.magnitude())
    atol = tol * scale

    def small(v) -> bool:
        return abs(v) <= atol

    branches = [
        _one_vanishes(data, "d", atol, small),
        _one_vanishes(data, "a", atol, small),
        _both_vanish(data, atol, small),
        _general(data, atol, small),
    ]
    feasible = [b for b in branches if b.feasible]
    search = square_search(data, 1, starts=starts, seed=seed) if starts > 0 else None
    return SingleSquareResult(
        feasible=bool(feasible),
        witness=feasible[0].witness if feasible else None,
        branches=branches,
        search=search,
    )


@dataclass
class MinSquaresResult:
    r: int
    squares: list[SquareAnsatz]
    searches: list[SearchResult] = field(default_factory=list)


def min_squares(
    data: FaceData,
    rmax: int,
    starts: int = 1000,
    seed: int = 0,
    tol: float = 1e-8,
) -> MinSquaresResult:
    """Smallest ``r <= rmax`` with a sum of ``r`` squares matching ``data``.

    ``r = 0`` for zero data and ``r = 1`` are decided exactly; larger ``r``
    by :func:`square_search`, accepting a fit whose residual relative to
    ``c00`` is below ``tol``.  Returns ``rmax + 1`` if nothing fits.
    """
    if rmax < 1:
        raise ValueError("rmax must be >= 1")
    scale = max(data.magnitude(), 1e-300)
    if data.magnitude() <= 1e-14:
        return MinSquaresResult(0, [])
    one = single_square_feasible(data, starts=0)
    if one.feasible:
        return MinSquaresResult(1, [one.witness])
    searches = []
    for r in range(2, rmax + 1):
        res = square_search(data, r, starts=starts, seed=seed + r)
        searches.append(res)
        if res.best_residual / scale < tol:
            return MinSquaresResult(r, res.squares, searches)
    return MinSquaresResult(rmax + 1, [], searches)


@dataclass
class FaceBound:
    face: int
    data: FaceData
    single_square: bool
    bound: int


def face_bounds(p: Poly, q: Poly, starts: int = 0, seed: int = 0) -> list[FaceBound]:
    """Per-face square lower bounds: 0 for a vanishing face, else 1 or 2."""
    if p.nvars != q.nvars:
        raise ValueError("p and q disagree on nvars")
    if p.nvars > 3:
        raise UnsupportedDegreeError("faces in more than two variables are not supported")
    deg = tuple(max(a, b) for a, b in zip(p.multidegree(), q.multidegree()))
    if any(x > 1 for x in deg):
        raise UnsupportedDegreeError(f"multidegree {deg} exceeds (1, ..., 1)")
    out = []
    for j in range(p.nvars):
        data = FaceData.from_laurent(face_extract(p, q, j))
        if data.magnitude() <= 1e-12:
            out.append(FaceBound(j, data, True, 0))
            continue
        one = single_square_feasible(data, starts=starts, seed=seed)
        out.append(FaceBound(j, data, one.feasible, 1 if one.feasible else 2))
    return out


def size_lower_bound(p: Poly, q: Poly) -> int:
    """Lower bound on the realization size: each face needs ``dim H_j`` >= its square count."""
    return sum(f.bound for f in face_bounds(p, q))
