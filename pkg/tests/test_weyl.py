import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kazhdan_lab.errors import HorizonError, PrecisionError, SchemaError
from kazhdan_lab.fixedpoint import CirclePoint
from kazhdan_lab.weyl import (
    IntegerSequence,
    cesaro_character_mean,
    first_kind_scan,
    schedule,
    weyl_criterion_scan,
    write_reports_csv,
)


def test_parse_forms():
    assert IntegerSequence.parse("poly:1,0,0").terms(4) == [1, 4, 9, 16]
    assert IntegerSequence.parse("lacunary:2^k+k").terms(4) == [1, 3, 6, 11]
    assert IntegerSequence.parse("list:5,7,11").terms(3) == [5, 7, 11]
    with pytest.raises(SchemaError):
        IntegerSequence.parse("fib")


def test_horizon():
    seq = IntegerSequence.lacunary(2, horizon=10)
    with pytest.raises(HorizonError):
        seq.terms(11)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4), st.integers(1, 200))
def test_index_array_matches_terms(coeffs, N):
    seq = IntegerSequence.polynomial(coeffs)
    assert seq.index_array(N).tolist() == seq.terms(N)


@given(st.fractions(min_value=0, max_value=1, max_denominator=50), st.integers(1, 300), st.integers(1, 4))
def test_rational_mean_matches_direct_sum(theta, N, h):
    seq = IntegerSequence.polynomial([1, 0, 0])
    got = cesaro_character_mean(seq, CirclePoint.from_fraction(theta), N, h)
    want = sum(cmath.exp(2j * math.pi * float((h * k * k * theta) % 1)) for k in range(1, N + 1)) / N
    assert abs(got - want) < 1e-12


@pytest.mark.parametrize("theta", ["sqrt2", "golden"])
def test_squares_equidistribute(theta):
    reports = weyl_criterion_scan(IntegerSequence.parse("poly:1,0,0"), CirclePoint.parse(theta), 4, 10**5)
    assert max(r.magnitude for r in reports) < 0.05
    assert reports[0].partial[-1][0] == 10**5


def test_powers_of_two_at_third_do_not_decay():
    # 2^k/3 mod 1 alternates 1/3, 2/3: the mean is exactly (e(1/3) + e(2/3)) / 2 = -1/2 at even N
    m = cesaro_character_mean(IntegerSequence.parse("lacunary:2^k"), CirclePoint.parse("1/3"), 2000)
    assert m == pytest.approx(-0.5, abs=1e-12)


def test_precision_guard_blocks_irrational_lacunary():
    with pytest.raises(PrecisionError):
        cesaro_character_mean(IntegerSequence.parse("lacunary:2^k"), CirclePoint.parse("sqrt2"), 200)


def test_schedule():
    assert schedule(10) == [1, 2, 4, 8, 10]
    assert schedule(1) == [1]


def test_first_kind_scan_splits():
    seq = IntegerSequence.parse("poly:1,0")
    thetas = [CirclePoint.parse("sqrt2"), CirclePoint.from_fraction(Fraction(1, 2))]
    scan = first_kind_scan(seq, thetas, 5000, tol=0.05, harmonics=2, workers=2)
    assert [t.describe() for t in scan.undetermined] == ["1/2"]
    assert scan.heuristic


def test_reports_csv(tmp_path):
    reports = weyl_criterion_scan(IntegerSequence.parse("poly:1,0"), CirclePoint.parse("1/4"), 2, 8)
    path = tmp_path / "w.csv"
    write_reports_csv(path, reports)
    lines = path.read_text().splitlines()
    assert lines[0] == "harmonic,N,re,im,abs"
    assert len(lines) == 1 + 2 * len(schedule(8))
    # k/4 summed over k = 1..8 vanishes, as does 2k/4
    np.testing.assert_allclose([r.magnitude for r in reports], [0, 0], atol=1e-15)
