"""Bundled examples, stored exactly (rationals and square roots).

``blaschke``   (z^2 - 1/4) / (1 - z^2/4) with an explicit 3x3 unitary colligation
``twovar``     (2 z1 z2 - z1 - z2) / (2 - z1 - z2) with an explicit 3x3 unitary
``trivar``     (3 z1 z2 z3 - z1 z2 - z2 z3 - z1 z3) / (3 - z1 - z2 - z3) with an
               explicit three-face certificate of three squares each
``coordinate`` f = z1
``monomial``   f = z1 z2 z3
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .polycore import Poly
from .realize import Realization, decomposition_from_realization
from .soscert import SosCertificate, verify_decomposition
from .surd import Surd

__all__ = ["DemoBundle", "DEMO_NAMES", "load_demo", "trivar_certificate", "trivar_face_polys",
           "twovar_printed_realization"]

DEMO_NAMES = ("blaschke", "twovar", "trivar", "coordinate", "monomial")


@dataclass
class DemoBundle:
    name: str
    description: str
    p: Poly
    q: Poly
    cert: SosCertificate | None = None
    realization: Realization | None = None
    expected: dict = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return self.p.nvars

    def to_float(self) -> DemoBundle:
        return DemoBundle(
            self.name,
            self.description,
            self.p.to_float(),
            self.q.to_float(),
            None if self.cert is None else self.cert.to_float(),
            None if self.realization is None else self.realization.to_float(),
            dict(self.expected),
        )

    def validate(self) -> None:
        """Bundled data must pass its own checks exactly."""
        if self.cert is not None:
            res = verify_decomposition(self.p, self.q, self.cert)
            if res != 0.0:
                raise AssertionError(f"demo {self.name}: certificate residual {res}")
        if self.realization is not None and self.realization.unitarity_residual() != 0.0:
            raise AssertionError(f"demo {self.name}: bundled colligation is not unitary")


def _S(x) -> Surd:
    return x if isinstance(x, Surd) else Surd(Fraction(x))


def _U(rows) -> np.ndarray:
    n = len(rows)
    U = np.empty((n, n), dtype=object)
    for i, row in enumerate(rows):
        for k, v in enumerate(row):
            U[i, k] = _S(v)
    return U


def _blaschke() -> DemoBundle:
    r15 = Surd.sqrt(15) / 4
    q = Fraction(1, 4)
    U = _U([[-q, 0, r15], [r15, 0, q], [0, 1, 0]])
    real = Realization((2,), U)
    p = Poly.exact(1, {(0,): 1, (2,): Fraction(-1, 4)})
    qq = Poly.exact(1, {(2,): 1, (0,): Fraction(-1, 4)})
    return DemoBundle(
        "blaschke",
        "one-variable Blaschke product (z^2 - 1/4)/(1 - z^2/4)",
        p,
        qq,
        decomposition_from_realization(real),
        real,
        {"size": 2, "A": -0.25},
    )


def _twovar_rows(sign: int):
    r2 = Surd.sqrt(2) / 2
    h = Fraction(1, 2)
    return [[0, sign * r2, sign * r2], [r2, h, -h], [r2, -h, h]]


def twovar_printed_realization() -> Realization:
    """The commonly printed 3x3 colligation for ``twovar``.

    Its transfer function is ``-f`` (the B row has the wrong sign); kept so
    the discrepancy stays testable.
    """
    return Realization((1, 1), _U(_twovar_rows(+1)))


def _twovar() -> DemoBundle:
    real = Realization((1, 1), _U(_twovar_rows(-1)))
    p = Poly.exact(2, {(0, 0): 2, (1, 0): -1, (0, 1): -1})
    q = Poly.exact(2, {(1, 1): 2, (1, 0): -1, (0, 1): -1})
    # the colligation gives p/2 and q/2; rescale its certificate by 2
    cert = decomposition_from_realization(real)
    cert = SosCertificate([F.scale(Surd(2)) for F in cert.faces], 2)
    return DemoBundle(
        "twovar",
        "two-variable (2 z1 z2 - z1 - z2)/(2 - z1 - z2)",
        p,
        q,
        cert,
        real,
        {"size": 2, "A": 0.0},
    )


def trivar_face_polys(j: int) -> list[Poly]:
    """The three squares of face ``j``: in the other two variables (z, w),

    sqrt(3) (z w - z/2 - w/2),  sqrt(3) (1 - z/2 - w/2),  (z - w)/sqrt(2).
    """
    a, b = [k for k in range(3) if k != j]

    def e(ea, eb):
        x = [0, 0, 0]
        x[a], x[b] = ea, eb
        return tuple(x)

    s3 = Surd.sqrt(3)
    h = Fraction(1, 2)
    r = Surd.sqrt(h)
    return [
        Poly(3, {e(1, 1): s3, e(1, 0): -s3 * h, e(0, 1): -s3 * h}),
        Poly(3, {e(0, 0): s3, e(1, 0): -s3 * h, e(0, 1): -s3 * h}),
        Poly(3, {e(1, 0): r, e(0, 1): -r}),
    ]


def trivar_certificate() -> SosCertificate:
    return SosCertificate.from_polys([trivar_face_polys(j) for j in range(3)], 3)


def _trivar() -> DemoBundle:
    p = Poly.exact(3, {(0, 0, 0): 3, (1, 0, 0): -1, (0, 1, 0): -1, (0, 0, 1): -1})
    q = Poly.exact(3, {(1, 1, 1): 3, (1, 1, 0): -1, (0, 1, 1): -1, (1, 0, 1): -1})
    return DemoBundle(
        "trivar",
        "three-variable (3 z1 z2 z3 - z1 z2 - z2 z3 - z1 z3)/(3 - z1 - z2 - z3)",
        p,
        q,
        trivar_certificate(),
        None,
        {"size": 9, "lower_bound": 6},
    )


def _coordinate() -> DemoBundle:
    p = Poly.exact(1, {(0,): 1})
    q = Poly.exact(1, {(1,): 1})
    cert = SosCertificate.from_polys([[Poly.exact(1, {(0,): 1})]], 1)
    real = Realization((1,), _U([[0, 1], [1, 0]]))
    return DemoBundle("coordinate", "coordinate function f = z1", p, q, cert, real,
                      {"size": 1, "lower_bound": 1})


def _monomial() -> DemoBundle:
    p = Poly.exact(3, {(0, 0, 0): 1})
    q = Poly.exact(3, {(1, 1, 1): 1})
    cert = SosCertificate.from_polys(
        [
            [Poly.exact(3, {(0, 0, 0): 1})],
            [Poly.exact(3, {(1, 0, 0): 1})],
            [Poly.exact(3, {(1, 1, 0): 1})],
        ],
        3,
    )
    return DemoBundle("monomial", "monomial f = z1 z2 z3", p, q, cert, None,
                      {"size": 3, "lower_bound": 3})


_BUILDERS = {
    "blaschke": _blaschke,
    "twovar": _twovar,
    "trivar": _trivar,
    "coordinate": _coordinate,
    "monomial": _monomial,
}


def load_demo(name: str, exact: bool = True) -> DemoBundle:
    """Return a validated demo bundle; ``exact=False`` converts it to floats."""
    try:
        bundle = _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown demo {name!r}; choose from {', '.join(DEMO_NAMES)}") from None
    bundle.validate()
    return bundle if exact else bundle.to_float()
