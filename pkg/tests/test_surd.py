from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from agler.surd import Surd, as_exact, is_exact

fr = st.fractions(min_value=-20, max_value=20, max_denominator=50)
radicand = st.sampled_from([1, 2, 3, 5, 6, 15])


@st.composite
def surds(draw):
    x = Surd(0)
    for _ in range(draw(st.integers(1, 3))):
        k = draw(radicand)
        x = x + Surd.gaussian(draw(fr), draw(fr)) * Surd.sqrt(k)
    return x


def test_sqrt_normalizes_square_factors():
    assert Surd.sqrt(8) == 2 * Surd.sqrt(2)
    assert Surd.sqrt(Fraction(1, 2)) == Surd.sqrt(2) / 2
    assert Surd.sqrt(9) == 3


def test_sqrt_squares_back():
    for k in (2, 3, 15, Fraction(3, 7)):
        assert Surd.sqrt(k) * Surd.sqrt(k) == k


def test_negative_radicand_is_imaginary():
    s = Surd.sqrt(-3)
    assert s * s == -3
    assert complex(s) == pytest.approx(1j * 3**0.5)


def test_blaschke_entries_are_unit():
    a, b = Fraction(1, 4), Surd.sqrt(15) / 4
    assert a * a + b * b == 1


def test_parts_roundtrip():
    x = Surd.gaussian(Fraction(1, 3), -2) + Surd.sqrt(6) * Fraction(5, 7)
    assert Surd.from_parts(x.parts()) == x


def test_division_only_by_gaussian():
    assert Surd.gaussian(1, 2) / Surd.gaussian(0, 1) == Surd.gaussian(2, -1)
    with pytest.raises(TypeError):
        Surd(1) / Surd.sqrt(2)


def test_mixing_with_floats_degrades():
    assert isinstance(Surd.sqrt(2) + 0.5, complex)
    assert isinstance(Surd.sqrt(2) * 1j, complex)


def test_as_exact_is_lossless_for_binary_floats():
    assert as_exact(0.5) == Fraction(1, 2)
    assert as_exact(0.1).as_fraction() == Fraction(0.1)
    assert as_exact(1 + 2j) == Surd.gaussian(1, 2)
    assert is_exact(Surd(1)) and not is_exact(1.0)


def test_hash_matches_int():
    assert hash(Surd(2)) == hash(2)
    assert len({Surd(2), Surd.sqrt(4)}) == 1


@given(surds(), surds(), surds())
def test_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert (a - a).is_zero


@given(surds(), surds())
def test_arithmetic_agrees_with_complex(a, b):
    assert complex(a * b) == pytest.approx(complex(a) * complex(b), abs=1e-9)
    assert complex(a + b) == pytest.approx(complex(a) + complex(b), abs=1e-9)
    assert complex(a.conjugate()) == pytest.approx(complex(a).conjugate(), abs=1e-12)


@given(surds())
def test_modulus_squared_is_real(a):
    m = a * a.conjugate()
    assert complex(m).imag == pytest.approx(0, abs=1e-9)
    assert complex(m).real >= -1e-12
