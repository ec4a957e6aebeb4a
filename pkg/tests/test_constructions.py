import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import members
from densitylab.constructions import (
    ConstructedSet, _induction, corollary_superset, counterexample_set, difference_matching_subset,
    intermediate_subset,
)
from densitylab.counting import count, stream_mask
from densitylab.errors import PreconditionFailed
from densitylab.setexpr import AP, Blocks, Compl, Empty, Nat


def reflected(a_prime, b_prime):
    """Oracle: D'(n) = B'(n) + min(0, min_{m <= n} (A'(m) - B'(m))), the closed form of the greedy rule."""
    a = np.cumsum(a_prime, dtype=np.int64)
    b = np.cumsum(b_prime, dtype=np.int64)
    return b + np.minimum(0, np.minimum.accumulate(a - b))


def check_subset_invariants(d, a, b, horizon):
    am, bm = stream_mask(a, horizon), stream_mask(b, horizon)
    c = am & bm
    assert not (c & ~d.mask).any(), "A∩B ⊄ D"
    assert not (d.mask & ~bm).any(), "D ⊄ B"
    a_prime = np.cumsum(am & ~c)
    d_prime = np.cumsum(d.mask & ~c)
    assert (d_prime <= a_prime).all()
    assert (d_prime == reflected(am & ~c, bm & ~c)).all()


def test_intermediate_example():
    a, b = AP(0, 3), AP(0, 2)
    t0 = time.perf_counter()
    d = intermediate_subset(a, b)
    elapsed = time.perf_counter() - t0
    assert d.horizon == 10**6
    check_subset_invariants(d, a, b, 10**6)
    assert abs(d.count(10**6) / 10**6 - 1 / 3) <= 0.02
    lo, hi = d.density_bounds()
    assert abs(lo - 1 / 3) <= 0.02 and abs(hi - 1 / 3) <= 0.02
    assert elapsed < 1.0


def test_intermediate_with_empty_a():
    d = intermediate_subset(Empty(), AP(0, 2), 2**16)
    assert not d.mask.any()
    assert d.to_rle() == ""


def test_intermediate_inside_nat():
    d = intermediate_subset(AP(0, 2), Nat(), 2**18)
    check_subset_invariants(d, AP(0, 2), Nat(), 2**18)
    assert all(d.contains(n) for n in range(2, 2**18 + 1, 2))
    assert d.count(2**18) / 2**18 == pytest.approx(0.5, abs=0.02)


@pytest.mark.parametrize("a,b", [(AP(0, 5), AP(1, 2)), (AP(1, 4), Compl(AP(0, 3))), (AP(0, 6), Nat())])
def test_intermediate_density_matches_smaller_set(a, b):
    h = 2**18
    d = intermediate_subset(a, b, h)
    check_subset_invariants(d, a, b, h)
    assert d.count(h) / h == pytest.approx(count(a, h) / h, abs=0.02)


def test_intermediate_preconditions(counterexample):
    with pytest.raises(PreconditionFailed):
        intermediate_subset(AP(0, 2), AP(0, 3), 2**16)
    with pytest.raises(PreconditionFailed):
        intermediate_subset(AP(0, 2), AP(1, 2), 2**16)
    with pytest.raises(PreconditionFailed):
        intermediate_subset(counterexample, Nat(), 2**16)


@given(arrays(bool, st.integers(1, 400)), arrays(bool, st.integers(1, 400)))
def test_induction_matches_reflection(a, b):
    n = min(len(a), len(b))
    a, b = a[:n].copy(), b[:n].copy()
    a[0] = b[0] = False
    b &= ~a  # the primed sets are disjoint
    d = _induction(a, b)
    assert not (d & ~b).any()
    assert (np.cumsum(d) == reflected(a, b)).all()


@given(st.integers(1, 12), st.integers(2, 12), st.data())
def test_intermediate_on_random_progressions(m1, m2, data):
    a = AP(data.draw(st.integers(0, m1 - 1)), m1)
    b = AP(data.draw(st.integers(0, m2 - 1)), m2)
    try:
        d = intermediate_subset(b, a, 2**14) if m1 < m2 else intermediate_subset(a, b, 2**14)
    except PreconditionFailed:
        return
    lo_set, hi_set = (b, a) if m1 < m2 else (a, b)
    check_subset_invariants(d, lo_set, hi_set, 2**14)


def test_prefix_determinism():
    small = intermediate_subset(AP(0, 3), AP(0, 2), 2**14)
    big = intermediate_subset(AP(0, 3), AP(0, 2), 2**16)
    assert (big.mask[: 2**14 + 1] == small.mask).all()


def test_constructed_set_accessors():
    mask = np.zeros(11, dtype=bool)
    mask[[2, 3, 4, 7, 10]] = True
    s = ConstructedSet(mask, 10, {"algorithm": "manual"})
    assert s.to_rle() == "2-4,7-7,10-10"
    assert s.count(10) == 5 and s.count(0) == 0
    assert s.elements().tolist() == [2, 3, 4, 7, 10]
    with pytest.raises(ValueError):
        s.contains(11)
    with pytest.raises(ValueError):
        s.count(-1)


def test_provenance():
    d = intermediate_subset(AP(0, 3), AP(0, 2), 2**14)
    assert d.provenance["algorithm"] == "intermediate_subset"
    assert d.provenance["A"] == "ap(0,3)" and d.provenance["horizon"] == 2**14
    assert set(d.parts) == {"C", "A'", "B'", "D'"}


# ---------------------------------------------------------------------------

def test_difference_matching_example():
    a, b, h = AP(0, 4), AP(0, 2), 10**6
    d = difference_matching_subset(a, b, h)
    check_subset_invariants(d, a, b, h)
    am = np.cumsum(stream_mask(a, h))
    n = np.arange(h // 2, h + 1)
    assert (np.abs(d.prefix[n] - am[n]) / n).max() <= 0.02


def test_difference_matching_degenerate_cases():
    a = AP(1, 3)
    d = difference_matching_subset(a, a, 2**16)
    assert all(d.count(n) == count(a, n) for n in range(0, 2**16 + 1, 1001))
    assert not difference_matching_subset(Empty(), AP(0, 2), 2**16).mask.any()


def test_difference_matching_precondition(counterexample):
    with pytest.raises(PreconditionFailed):
        difference_matching_subset(Empty(), counterexample, 2**16)
    with pytest.raises(PreconditionFailed):
        difference_matching_subset(AP(0, 2), AP(0, 4), 2**16)


# ---------------------------------------------------------------------------

def test_counterexample_set():
    a = counterexample_set()
    assert a == Blocks(2, 2, (0,))
    assert members(a, 20) == [2, 5, 6, 7, 8, 17, 18, 19, 20]
    assert count(a, 8) == 5
    assert all(count(a, n) + count(Compl(a), n) == n for n in (1, 8, 1000, 2**40 + 3))
    assert all(count(Compl(a), n) == count(Blocks(2, 2, (1,)), n) + 1 for n in (1, 8, 1000, 2**40 + 3))


def test_corollary_superset_example():
    a, b, h = AP(0, 4), AP(0, 2), 2**18
    d = corollary_superset(a, b, h)
    am, bm = stream_mask(a, h), stream_mask(b, h)
    assert not (am & ~d.mask).any() and not (d.mask & ~(am | bm)).any()
    assert not d.mask[0]
    assert d.count(h) / h == pytest.approx(0.5, abs=0.02)


def test_corollary_superset_from_empty():
    b, h = AP(1, 3), 2**18
    d = corollary_superset(Empty(), b, h)
    assert not (d.mask & ~stream_mask(b, h)).any()
    assert d.count(h) / h == pytest.approx(1 / 3, abs=0.02)


def test_corollary_superset_rejects_equal_sets():
    with pytest.raises(PreconditionFailed):
        corollary_superset(AP(0, 2), AP(0, 2), 2**16)
