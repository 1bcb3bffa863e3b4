import numpy as np
import pytest
import sympy as sp

from agler.demos import load_demo
from agler.polycore import Poly


@pytest.fixture(scope="session")
def trivar():
    return load_demo("trivar")


@pytest.fixture(scope="session")
def trivar_f():
    return load_demo("trivar", exact=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def to_sympy(p: Poly, syms):
    """Independent expansion oracle: build the sympy expression term by term."""
    out = 0
    for e, c in p.terms.items():
        z = complex(c)
        mon = 1
        for s, k in zip(syms, e):
            mon *= s**k
        out += (sp.nsimplify(z.real) + sp.I * sp.nsimplify(z.imag)) * mon
    return sp.expand(out)


def bidisk_monomial():
    """f = z1 z2 with the certificate F1 = 1, F2 = z1."""
    from agler.soscert import SosCertificate

    p = Poly.exact(2, {(0, 0): 1})
    q = Poly.exact(2, {(1, 1): 1})
    cert = SosCertificate.from_polys([[Poly.exact(2, {(0, 0): 1})], [Poly.exact(2, {(1, 0): 1})]], 2)
    return p, q, cert


# -- acceptance reporting ---------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def accept(capsys):
    """Record and print one PASS/FAIL line per acceptance criterion."""

    def _report(n: int, ok: bool, detail: str):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[n] = line
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
