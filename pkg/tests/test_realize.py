import json
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from agler.demos import DEMO_NAMES, load_demo, twovar_printed_realization
from agler.exceptions import DegenerateInputError, DimensionError, NotIsometricError, SingularityError
from agler.hermform import mod2diff, torus_restrict
from agler.polycore import Poly, VecPoly
from agler.realize import (
    Realization,
    decomposition_from_realization,
    lurking_isometry,
    match_residual,
    random_polydisk_points,
    random_realization,
    size,
    stability_margin,
    to_rational,
    transfer_eval,
)
from agler.soscert import SosCertificate, verify_decomposition

from conftest import bidisk_monomial, to_sympy


def _coordinate():
    return Poly.const(1, 1), Poly.var(1, 0), SosCertificate.from_polys([[Poly.const(1, 1)]], 1)


def test_lurking_coordinate():
    r = lurking_isometry(*_coordinate())
    assert size(r) == 1
    np.testing.assert_allclose(r.U, [[0, 1], [1, 0]], atol=1e-14)


def test_lurking_bidisk_monomial():
    p, q, cert = bidisk_monomial()
    r = lurking_isometry(p, q, cert)
    assert r.size == 2
    for z in random_polydisk_points(2, 30, seed=1):
        assert transfer_eval(r, z) == pytest.approx(z[0] * z[1], abs=1e-13)


def test_lurking_trivar(trivar):
    r = lurking_isometry(trivar.p, trivar.q, trivar.cert)
    assert r.dims == (3, 3, 3)
    assert r.unitarity_residual() < 1e-10
    assert match_residual(r, trivar.p.to_float(), trivar.q.to_float(), npts=100) < 1e-8


def test_lurking_is_deterministic(trivar):
    a = lurking_isometry(trivar.p, trivar.q, trivar.cert)
    b = lurking_isometry(trivar.p, trivar.q, trivar.cert)
    np.testing.assert_array_equal(a.U, b.U)


def test_lurking_rejects_bad_certificate(trivar):
    bad = trivar.cert.with_face(2, VecPoly(3, 0))
    with pytest.raises(NotIsometricError, match="not isometric"):
        lurking_isometry(trivar.p, trivar.q, bad)


def test_lurking_rejects_vanishing_constant_term():
    p = Poly.var(1, 0)
    with pytest.raises(DegenerateInputError):
        lurking_isometry(p, p, SosCertificate.empty(1))


def test_lurking_warns_on_interior_zero():
    # p = 1 + 2z vanishes at -1/2, inside the disk; no certificate can exist either
    p = Poly(1, {(0,): 1, (1,): 2})
    q = Poly(1, {(0,): 2, (1,): 1})
    with pytest.warns(RuntimeWarning, match="vanish"):
        with pytest.raises(NotIsometricError):
            lurking_isometry(p, q, SosCertificate.from_polys([[Poly.zero(1)]], 1))


def test_stability_margin_values(trivar_f):
    assert stability_margin(Poly(1, {(0,): 1, (1,): 2})) == pytest.approx(0, abs=1e-12)
    assert stability_margin(Poly.const(2, 3)) == 3
    # 3 - z1 - z2 - z3 has a boundary zero at (1, 1, 1) only
    assert 0 < stability_margin(trivar_f.p) < 1


def test_transfer_eval_examples():
    bl = load_demo("blaschke")
    assert transfer_eval(bl.realization, [0]) == -0.25
    assert transfer_eval(bl.realization, [0.5]) == pytest.approx(0, abs=1e-15)
    tv = load_demo("twovar")
    assert transfer_eval(tv.realization, [0, 0]) == 0


def test_transfer_eval_singular_point():
    with pytest.raises(SingularityError):
        transfer_eval(load_demo("twovar").realization, [1, 1])


def test_transfer_eval_dimension():
    with pytest.raises(DimensionError):
        transfer_eval(load_demo("twovar").realization, [0.1])


def test_to_rational_coordinate():
    r = Realization((1,), [[0, 1], [1, 0]])
    q, p = to_rational(r)
    assert q == Poly.var(1, 0) and p == Poly.const(1, 1)


def _sympy_det_pair(r: Realization):
    """Oracle: q and p by sympy determinants of the bordered matrices."""
    zs = sp.symbols(f"z1:{r.nvars + 1}")
    U = sp.Matrix(r.U.shape[0], r.U.shape[1], lambda i, k: sp.nsimplify(complex(r.U[i, k]).real))
    E = sp.diag(*[zs[j] for j in r.block_of_state()])
    D, B, C, A = U[1:, 1:], U[0:1, 1:], U[1:, 0:1], U[0, 0]
    M = sp.eye(r.size) - D * E
    top = sp.Matrix([[A]]).row_join(-B * E)
    bord = top.col_join(C.row_join(M))
    return sp.expand(bord.det()), sp.expand(M.det()), zs


def test_to_rational_blaschke_against_sympy():
    r = load_demo("blaschke").realization
    q, p = to_rational(r)
    qs, ps, zs = _sympy_det_pair(r)
    assert sp.expand(to_sympy(p, zs) - ps) == 0
    assert sp.expand(to_sympy(q, zs) - qs) == 0
    assert p == Poly.exact(1, {(0,): 1, (2,): Fraction(-1, 4)})
    assert q == Poly.exact(1, {(0,): Fraction(-1, 4), (2,): 1})


def test_to_rational_printed_twovar_has_flipped_sign():
    r = twovar_printed_realization()
    q, p = to_rational(r)
    assert p.to_float().allclose(Poly(2, {(0, 0): 1, (1, 0): -0.5, (0, 1): -0.5}))
    # (2 z1 z2 - z1 - z2) / 2 is the numerator of f; the printed colligation gives its negative
    assert q.to_float().allclose(Poly(2, {(1, 1): -1, (1, 0): 0.5, (0, 1): 0.5}))
    tv = load_demo("twovar")
    for z in random_polydisk_points(2, 20, seed=4):
        assert transfer_eval(r, z) == pytest.approx(-tv.q(z) / tv.p(z), abs=1e-12)


def test_to_rational_twovar_bundle():
    tv = load_demo("twovar")
    q, p = to_rational(tv.realization)
    assert p.is_exact
    assert p.scale(2) == tv.p and q.scale(2) == tv.q


def test_decomposition_coordinate():
    r = Realization((1,), [[0, 1], [1, 0]])
    cert = decomposition_from_realization(r)
    assert cert.faces[0].components() == [Poly.const(1, 1)]


def test_decomposition_random_bidisk():
    for seed in range(5):
        r = random_realization((1, 1), seed=seed)
        q, p = to_rational(r)
        assert verify_decomposition(p, q, decomposition_from_realization(r)) < 1e-9


def test_decomposition_twovar_is_exact():
    tv = load_demo("twovar")
    q, p = to_rational(tv.realization)
    assert verify_decomposition(p, q, decomposition_from_realization(tv.realization)) == 0.0


def test_size():
    assert size(Realization((3, 3, 3), np.eye(10))) == 9
    assert size(Realization((), np.eye(1))) == 0
    assert size(Realization((2, 2, 2), np.eye(7))) == 6


def test_non_unitary_rejected():
    with pytest.raises(ValueError, match="not unitary"):
        Realization((1,), [[1, 1], [0, 1]])
    with pytest.raises(DimensionError):
        Realization((2,), np.eye(2))


@pytest.mark.parametrize("name", DEMO_NAMES)
def test_bundled_functions_bounded_by_one(name):
    b = load_demo(name, exact=False)
    r = b.realization if b.realization is not None else lurking_isometry(b.p, b.q, b.cert)
    Z = random_polydisk_points(b.nvars, 1000, seed=7, radius=0.999)
    assert max(abs(transfer_eval(r, z)) for z in Z) <= 1 + 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_random_roundtrip(seed):
    rng = np.random.default_rng(seed)
    dims = tuple(int(d) for d in rng.integers(0, 3, 3))
    r = random_realization(dims, seed=seed)
    q, p = to_rational(r)
    assert all(a <= d for a, d in zip(p.multidegree(), dims))
    assert all(a <= d for a, d in zip(q.multidegree(), dims))
    assert torus_restrict(mod2diff(p, q)).max_abs_coeff() < 1e-10
    cert = decomposition_from_realization(r)
    assert verify_decomposition(p, q, cert) < 1e-9
    r2 = lurking_isometry(p, q, cert, check_stability=False)
    Z = random_polydisk_points(3, 50, seed=seed)
    assert max(abs(transfer_eval(r, z) - transfer_eval(r2, z)) for z in Z) < 1e-8


def test_json_roundtrip_is_bit_identical(trivar):
    r = lurking_isometry(trivar.p, trivar.q, trivar.cert)
    back = Realization.from_json(json.loads(json.dumps(r.to_json())))
    np.testing.assert_array_equal(back.U, r.U)
    bl = load_demo("blaschke")
    assert Realization.from_json(bl.realization.to_json(), exact=True).unitarity_residual() == 0.0
