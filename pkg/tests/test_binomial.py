"""Log-space binomial survival function against an exact rational oracle."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from verselex.extraction import binom_sf_log10


def exact_tail_neg_log10(x: int, n: int, p0: Fraction) -> float:
    """Oracle: sum the upper tail in exact rational arithmetic, log at the end."""
    if x == 0:
        return 0.0
    if p0 == 0:
        return math.inf
    if p0 == 1:
        return 0.0
    q = 1 - p0
    pmf = q ** n
    tail = Fraction(0)
    for k in range(n + 1):
        if k >= x:
            tail += pmf
        if k < n:
            pmf = pmf * (n - k) * p0 / ((k + 1) * q)
    if tail > Fraction(1, 2):
        # -log10 of a near-one rational: take the exact complement first,
        # otherwise the two big-int log10 terms cancel catastrophically.
        return -math.log1p(-float(1 - tail)) / math.log(10)
    # math.log10 takes exact big ints, so the oracle keeps full precision
    # even when the tail's numerator/denominator run to hundreds of digits.
    return -(math.log10(tail.numerator) - math.log10(tail.denominator))


def exact_suffix_neg_log10(n: int, p0: Fraction) -> list[float]:
    """All upper-tail -log10 values for x = 0..n in one exact pass."""
    if p0 == 0:
        return [0.0] + [math.inf] * n
    if p0 == 1:
        return [0.0] * (n + 1)
    q = 1 - p0
    pmf = [q ** n]
    for k in range(n):
        pmf.append(pmf[-1] * (n - k) * p0 / ((k + 1) * q))
    out = [0.0] * (n + 1)
    tail = Fraction(0)
    for x in range(n, 0, -1):
        tail += pmf[x]
        if tail > Fraction(1, 2):
            out[x] = -math.log1p(-float(1 - tail)) / math.log(10)
        else:
            out[x] = -(math.log10(tail.numerator) - math.log10(tail.denominator))
    return out


def assert_matches_oracle(x, n, p0: Fraction, rel=1e-9):
    got = binom_sf_log10(x, n, float(p0))
    want = exact_tail_neg_log10(x, n, p0)
    if want == 0.0 or math.isinf(want):
        assert got == want, (x, n, p0)
    else:
        assert abs(got - want) <= rel * abs(want), (x, n, p0, got, want)


# Tail probabilities named in the worked example; p-values quoted to the
# paper's displayed precision.
@pytest.mark.parametrize("x, n, num, expected_p", [
    (2, 2, 6, 4.5e-6),
    (2, 2, 29, 1.04e-4),
    (1, 2, 4, 2.8e-3),
    (2, 2, 1916, 0.46),
])
def test_worked_example_tail_values(x, n, num, expected_p):
    nlp = binom_sf_log10(x, n, num / 2831)
    assert 10 ** -nlp == pytest.approx(expected_p, rel=0.05)
    assert_matches_oracle(x, n, Fraction(num, 2831))


def test_zero_successes_has_p_one():
    for n in (1, 5, 50):
        assert binom_sf_log10(0, n, 0.3) == 0.0


def test_degenerate_baselines():
    assert binom_sf_log10(3, 5, 0.0) == math.inf
    assert binom_sf_log10(3, 5, 1.0) == 0.0
    assert binom_sf_log10(0, 5, 0.0) == 0.0


def test_domain_violations_raise():
    with pytest.raises(ValueError):
        binom_sf_log10(3, 2, 0.5)
    with pytest.raises(ValueError):
        binom_sf_log10(-1, 2, 0.5)
    with pytest.raises(ValueError):
        binom_sf_log10(1, 0, 0.5)
    with pytest.raises(ValueError):
        binom_sf_log10(1, 2, 1.5)


def test_batched_oracle_matches_single():
    for n in (1, 4, 9):
        for k in (0, 3, 50, 97):
            p0 = Fraction(k, 97)
            batched = exact_suffix_neg_log10(n, p0)
            for x in range(n + 1):
                assert batched[x] == exact_tail_neg_log10(x, n, p0)


def test_oracle_agreement_small_grid():
    # Exhaustive check for n <= 12 over a denominator-97 baseline grid.
    for n in range(1, 13):
        for k in range(0, 98, 7):
            p0 = Fraction(k, 97)
            for x in range(0, n + 1):
                assert_matches_oracle(x, n, p0)


def test_extreme_tails_finite_and_monotone():
    # Far below the smallest positive double: the log value must stay
    # finite and strictly ordered along both ladders.
    values_x = [binom_sf_log10(x, 200, 1 / 97) for x in range(150, 201, 10)]
    assert all(math.isfinite(v) for v in values_x)
    assert all(a < b for a, b in zip(values_x, values_x[1:]))
    assert values_x[-1] > 300  # p below 1e-300

    ladders = [binom_sf_log10(50, 50, 10.0 ** -k) for k in range(1, 9)]
    assert all(math.isfinite(v) for v in ladders)
    assert all(a < b for a, b in zip(ladders, ladders[1:]))


def test_near_one_p_values_keep_log_precision():
    # p = 1 - (1/97)^n is indistinguishable from 1 in double precision,
    # but its -log10 is a perfectly representable tiny number.
    for n in (20, 50):
        p0 = Fraction(96, 97)
        want = exact_tail_neg_log10(1, n, p0)
        got = binom_sf_log10(1, n, float(p0))
        assert 0 < want < 1e-30
        assert abs(got - want) <= 1e-9 * want


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.data())
def test_monotone_in_baseline_and_successes(n, data):
    x = data.draw(st.integers(1, n))
    p_lo = data.draw(st.floats(0.0, 1.0, allow_nan=False))
    p_hi = data.draw(st.floats(p_lo, 1.0, allow_nan=False))
    # Larger baseline -> larger p-value -> smaller -log10 p.
    assert binom_sf_log10(x, n, p_hi) <= binom_sf_log10(x, n, p_lo) + 1e-9
    if x < n:
        p0 = data.draw(st.floats(1e-9, 1.0, allow_nan=False))
        assert binom_sf_log10(x + 1, n, p0) >= binom_sf_log10(x, n, p0) - 1e-9
