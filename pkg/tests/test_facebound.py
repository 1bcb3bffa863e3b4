import numpy as np
import pytest

from agler.demos import load_demo
from agler.exceptions import UnsupportedDegreeError
from agler.facebound import (
    FaceData,
    SquareAnsatz,
    ansatz_coeffs,
    face_bounds,
    min_squares,
    single_square_feasible,
    size_lower_bound,
    square_search,
)
from agler.hermform import face_extract, gram_form, torus_restrict
from agler.polycore import Poly, VecPoly

SOS1 = FaceData(10, -3, -3, 0, 1)
# best single-square fit to SOS1 found by the seeded search; identical at 1e3 and 1e5 starts
RANK1_FLOOR = 0.1320259880984469


def _random_ansatz(rng):
    return SquareAnsatz(*(rng.normal(size=4) + 1j * rng.normal(size=4)))


def test_ansatz_examples():
    assert ansatz_coeffs(SquareAnsatz(1, 0, 0, 1)) == FaceData(2, 0, 0, 1, 0)
    assert ansatz_coeffs(SquareAnsatz(1, 1, 0, 0)) == FaceData(2, 1, 0, 0, 0)
    assert ansatz_coeffs(SquareAnsatz(0, 1, 1, 0)) == FaceData(2, 0, 0, 0, 1)


def test_ansatz_matches_expansion(rng):
    for _ in range(20):
        s = _random_ansatz(rng)
        lp = torus_restrict(gram_form(VecPoly.from_components([s.as_poly()])))
        got = ansatz_coeffs(s)
        assert got.to_laurent().allclose(lp, atol=1e-12)


def test_face_data_from_trivar(trivar):
    for j in range(3):
        assert FaceData.from_laurent(face_extract(trivar.p, trivar.q, j)) == SOS1


def test_sos1_single_square_infeasible():
    res = single_square_feasible(SOS1, starts=0)
    assert not res.feasible and res.witness is None
    for name, free, partner in (("d=0", "|a|^2", "|b|^2"), ("a=0", "|d|^2", "|c|^2")):
        br = res.branch(name)
        assert br.contradiction is not None
        assert br.values["b=c"] is True
        assert br.values[partner] == pytest.approx(1)
        assert br.values[free] == pytest.approx(8)
        assert br.values["|z-equation lhs|"] == pytest.approx(np.sqrt(8))
        assert br.values["|c10|"] == 3
    assert "c10" in res.branch("a=d=0").contradiction
    assert "c11 = 0" in res.branch("a,d!=0").contradiction


@pytest.mark.parametrize(
    "data, witness",
    [(FaceData(2, 0, 0, 1, 0), (1, 0, 0, 1)), (FaceData(2, 1, 0, 0, 0), (1, 1, 0, 0))],
)
def test_simple_witnesses(data, witness):
    res = single_square_feasible(data, starts=0)
    assert res.feasible
    np.testing.assert_allclose(ansatz_coeffs(res.witness).as_vector(), data.as_vector(), atol=1e-12)
    # the witness is unique up to a unimodular factor
    w = res.witness.as_array()
    k = np.flatnonzero(np.abs(w) > 1e-9)[0]
    np.testing.assert_allclose(w / w[k] * abs(w[k]), witness, atol=1e-9)


def test_single_square_complete_on_random_squares(rng):
    for _ in range(100):
        s = _random_ansatz(rng)
        res = single_square_feasible(ansatz_coeffs(s), starts=0)
        assert res.feasible
        assert np.allclose(ansatz_coeffs(res.witness).as_vector(), ansatz_coeffs(s).as_vector(), atol=1e-8)


def test_single_square_complete_on_degenerate_squares(rng):
    # one or two of a, b, c, d zero: exercises every branch
    for mask in [(1, 1, 1, 0), (0, 1, 1, 1), (0, 1, 1, 0), (1, 0, 0, 0), (0, 0, 1, 0), (1, 1, 0, 1)]:
        s = SquareAnsatz(*(np.array(mask) * (rng.normal(size=4) + 1j * rng.normal(size=4))))
        assert single_square_feasible(ansatz_coeffs(s), starts=0).feasible, mask


def test_two_squares_not_one(rng):
    s1, s2 = _random_ansatz(rng), _random_ansatz(rng)
    assert not single_square_feasible(ansatz_coeffs([s1, s2]), starts=0).feasible


def test_rank_one_search_floor():
    res = square_search(SOS1, 1, starts=1000, seed=0)
    assert res.best_residual == pytest.approx(RANK1_FLOOR, rel=1e-6)
    assert res.best_residual > 1e-6


def test_search_recovers_feasible(rng):
    s = _random_ansatz(rng)
    res = square_search(ansatz_coeffs(s), 1, starts=50, seed=1)
    assert res.best_residual < 1e-9


def test_search_is_deterministic():
    a = square_search(SOS1, 2, starts=40, seed=3)
    b = square_search(SOS1, 2, starts=40, seed=3)
    np.testing.assert_array_equal(a.residuals, b.residuals)


def test_min_squares_sos1():
    res = min_squares(SOS1, 3, starts=200)
    assert res.r == 2
    fit = ansatz_coeffs(res.squares).as_vector()
    # relative to c00 = 10
    assert np.abs(fit - SOS1.as_vector()).max() < 1e-8 * SOS1.c00


def test_min_squares_trivial():
    assert min_squares(FaceData(2, 0, 0, 1, 0), 3).r == 1
    assert min_squares(FaceData(0, 0, 0, 0, 0), 3).r == 0


@pytest.mark.parametrize("lam", [1e-3, 0.5, 7.0, 1e3])
def test_min_squares_scale_invariant(lam):
    assert min_squares(SOS1.scale(lam), 3, starts=200).r == 2
    assert min_squares(FaceData(2, 0, 0, 1, 0).scale(lam), 3).r == 1


def test_size_lower_bound_examples(trivar):
    assert size_lower_bound(trivar.p.to_float(), trivar.q.to_float()) == 6
    mono = load_demo("monomial", exact=False)
    assert size_lower_bound(mono.p, mono.q) == 3
    assert size_lower_bound(Poly.const(1, 1), Poly.var(1, 0)) == 1


def test_lower_bound_below_known_size(trivar):
    assert size_lower_bound(trivar.p, trivar.q) <= 9


def test_face_bounds_zero_face():
    # f = z1 viewed on the bidisk: the z2 face vanishes identically
    fb = face_bounds(Poly.const(2, 1), Poly.var(2, 0))
    assert [f.bound for f in fb] == [1, 0]


def test_face_bounds_reject_high_degree():
    with pytest.raises(UnsupportedDegreeError):
        size_lower_bound(Poly.const(2, 1), Poly.var(2, 0) ** 2)
    with pytest.raises(UnsupportedDegreeError):
        size_lower_bound(Poly.const(4, 1), Poly.var(4, 0))
