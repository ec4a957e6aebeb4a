import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_count, brute_weighted, members, periodic_exprs, set_exprs
from densitylab.counting import (
    STREAM_LIMIT, count, counting_profile, is_piecewise_periodic, nth_element, normalizer, normalizer_ratio,
    weighted_count, window_ratios,
)
from densitylab.errors import DomainError, HorizonExceeded
from densitylab.setexpr import (
    AP, Blocks, Compl, Diff, Empty, Finite, First, Inter, MCopy, Nat, Offset, Seeded, Union, contains, m_copy,
)


def test_count_examples(counterexample):
    assert count(AP(0, 3), 10) == 3
    assert count(Nat(), 100) == 100
    # the elements up to 8 are 2, 5, 6, 7, 8
    assert count(counterexample, 8) == brute_count(counterexample, 8) == 5


def test_weighted_examples():
    assert weighted_count(Nat(), 0, 5) == 5
    assert weighted_count(Empty(), 2, 10**6) == 0
    assert normalizer(0, 12345) == 12345
    assert normalizer(-1, 1) == 1


def test_harmonic_normaliser_against_log():
    # H_n = ln n + gamma + 1/(2n) - ...; the ratio H_n / ln n at 2^20 is 1 + gamma/ln n, not 1
    n = 2**20
    h = weighted_count(Nat(), -1, n)
    assert h == pytest.approx(float(mpmath.harmonic(n)), rel=1e-13)
    assert h / math.log(n) == pytest.approx(1 + float(mpmath.euler) / math.log(n), abs=1e-6)


def test_normaliser_ratio_alpha_one():
    assert normalizer_ratio(1, 2**20) == pytest.approx(2, abs=0.01)


@pytest.mark.parametrize("alpha", [-1.5, 40.5, float("nan")])
def test_alpha_range(alpha):
    with pytest.raises(DomainError):
        weighted_count(Nat(), alpha, 10)


def test_nth_element_examples(counterexample):
    assert nth_element(AP(0, 2), 3) == 6
    assert nth_element(counterexample, 1) == 2
    assert nth_element(Finite((5,)), 2) is None


def test_nth_element_cap():
    with pytest.raises(HorizonExceeded):
        nth_element(Blocks(2, 2, (0,)), 10**6, cap=2**16)


def test_mcopy_density_and_elements():
    e = m_copy(AP(0, 2), 3, First())
    assert [k for k in range(1, 26) if contains(e, k)] == [7, 13, 19, 25]
    assert count(e, 6 * 10**6) / (6 * 10**6) == pytest.approx(1 / 6, abs=0.01)


def test_mcopy_of_one_shifts_by_one():
    x = Union(AP(1, 5), Blocks(2, 2, (1,)))
    e = MCopy(x, 1)
    assert all(abs(count(e, n) - count(x, n)) <= 1 for n in range(1, 3000))
    assert all(count(e, n + 1) == count(x, n) for n in range(1, 3000))


@given(set_exprs(), st.integers(1, 400))
def test_count_matches_oracle(e, n):
    assert count(e, n) == brute_count(e, n)


@given(set_exprs(), st.integers(2, 300))
def test_count_steps_equal_membership(e, n):
    assert count(e, n) - count(e, n - 1) == int(contains(e, n))


@given(set_exprs(), set_exprs(), st.integers(1, 300))
def test_inclusion_exclusion(e, f, n):
    assert count(Compl(e), n) + count(e, n) == n
    assert count(Union(e, f), n) + count(Inter(e, f), n) == count(e, n) + count(f, n)


@given(set_exprs(), st.integers(1, 4), st.integers(0, 2**64 - 1), st.integers(1, 200))
def test_mcopy_counts_track_inner(e, m, seed, n):
    for rule in (First(), Offset(m), Seeded(seed)):
        assert abs(count(MCopy(e, m, rule), m * n + m) - count(e, n)) <= 1


@given(set_exprs(), st.sampled_from([-1.0, -0.5, 0.5, 1.0, 2.5]), st.integers(1, 300))
def test_weighted_matches_oracle(e, alpha, n):
    assert weighted_count(e, alpha, n) == pytest.approx(brute_weighted(e, alpha, n), rel=1e-12, abs=1e-12)


@given(set_exprs(), set_exprs(), st.sampled_from([-1.0, 0.0, 1.5]), st.integers(1, 300))
def test_weighted_additive_and_monotone(e, f, alpha, n):
    a, b = Diff(e, f), Inter(e, f)
    total = weighted_count(e, alpha, n)
    assert total == pytest.approx(weighted_count(a, alpha, n) + weighted_count(b, alpha, n), rel=1e-12, abs=1e-12)
    assert weighted_count(e, alpha, n + 1) >= total


@given(periodic_exprs(), st.sampled_from([-1.0, -0.3, 0.5, 2.0, 7.0]), st.integers(3000, 6000))
def test_closed_form_engine_matches_stream(e, alpha, n):
    s = weighted_count(e, alpha, n, engine="stream")
    c = weighted_count(e, alpha, n, engine="closed")
    assert c == pytest.approx(s, rel=1e-11, abs=1e-9)


@pytest.mark.parametrize("expr", [
    Blocks(2, 2, (0,)), Blocks(3, 3, (0, 2)), Union(AP(0, 4), Blocks(2, 2, (0,))),
    Diff(Compl(Blocks(2, 3, (1,))), AP(1, 1000)), MCopy(Blocks(2, 2, (0,)), 3), MCopy(AP(1, 3), 2, Offset(2)),
])
@pytest.mark.parametrize("alpha", [-1.0, 0.5, 2.0, 40.0])
def test_closed_form_engine_matches_stream_at_scale(expr, alpha):
    pts = [2**20 - 1, 2**20, 2**21 + 12345]
    prof_s = counting_profile(expr, alpha, pts, engine="stream")
    prof_c = counting_profile(expr, alpha, pts, engine="closed")
    for s, c in zip(prof_s.ratios(), prof_c.ratios()):
        assert c == pytest.approx(s, abs=1e-12)


def test_seeded_copy_falls_back_to_streaming():
    e = Union(MCopy(AP(0, 2), 3, Seeded(11)), AP(0, 7))
    assert not is_piecewise_periodic(e)
    assert weighted_count(e, 1.0, 1500) == pytest.approx(brute_weighted(e, 1.0, 1500), rel=1e-12)
    with pytest.raises(HorizonExceeded):
        weighted_count(e, 1.0, 2 * STREAM_LIMIT)


def test_huge_horizons_are_exact_for_periodic_sets():
    n = 10**40 + 7
    # the two progressions are disjoint (different parity)
    assert count(Union(AP(0, 4), AP(1, 6)), n) == n // 4 + (n - 1) // 6 + 1
    assert count(Compl(Blocks(2, 2, (0,))), 2**200) == 2**200 - count(Blocks(2, 2, (0,)), 2**200)
    assert count(Blocks(2, 2, (0,)), 2**201) == (4**101 - 1) // 3


def test_profile_invariants(counterexample):
    pts = list(range(1000, 1200, 7))
    for alpha in (-1.0, 0.0, 1.0):
        p = counting_profile(counterexample, alpha, pts)
        assert list(p.counts) == sorted(p.counts)
        assert all(0 <= c <= n for c, n in zip(p.counts, p.checkpoints))
        assert list(p.weighted) == sorted(p.weighted)
        assert all(0 <= a <= b for a, b in zip(p.weighted, p.normalizers))
    p0 = counting_profile(counterexample, 0.0, pts)
    assert p0.weighted == p0.counts


def test_window_ratio_definition():
    e = AP(0, 3)
    n, theta = 1000, 0.9
    lo = math.floor(theta * n)
    expected = (brute_count(e, n) - brute_count(e, lo)) / (n - lo)
    assert window_ratios(e, theta, [n]) == [expected]


def test_members_helper_agrees_on_finite():
    assert members(Finite((2, 9)), 10) == [2, 9]
