"""Brute-force oracles and hypothesis strategies shared by the test modules.

The oracles only use the definitions: membership by interval/residue tests
written out here, counts by direct loops, weighted sums by math.fsum.
"""
import math

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from densitylab.setexpr import (
    AP, Blocks, Compl, Diff, Empty, Finite, First, Inter, MCopy, Nat, Offset, Seeded, Union, seeded_offset,
)

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def member(expr, n):
    """Independent membership oracle (no shared code with setexpr.contains)."""
    if isinstance(expr, Nat):
        return True
    if isinstance(expr, Empty):
        return False
    if isinstance(expr, Finite):
        return n in set(expr.elements)
    if isinstance(expr, AP):
        return (n - expr.r) % expr.m == 0
    if isinstance(expr, Blocks):
        j = 0
        while True:
            lo, hi = expr.base**j, expr.base ** (j + 1)
            if lo < n <= hi:
                return j % expr.period in expr.on
            if n <= lo:
                return False
            j += 1
    if isinstance(expr, Union):
        return member(expr.left, n) or member(expr.right, n)
    if isinstance(expr, Inter):
        return member(expr.left, n) and member(expr.right, n)
    if isinstance(expr, Diff):
        return member(expr.left, n) and not member(expr.right, n)
    if isinstance(expr, Compl):
        return not member(expr.inner, n)
    if isinstance(expr, MCopy):
        m, rule = expr.m, expr.rule
        for a in range(1, n // m + 1):
            t = 1 if isinstance(rule, First) else rule.t if isinstance(rule, Offset) else seeded_offset(rule.seed, a, m)
            if m * a + t == n:
                return member(expr.inner, a)
        return False
    raise TypeError(expr)


def members(expr, n):
    return [k for k in range(1, n + 1) if member(expr, k)]


def brute_count(expr, n):
    return len(members(expr, n))


def brute_weighted(expr, alpha, n):
    return math.fsum(k**alpha for k in members(expr, n))


@pytest.fixture
def counterexample():
    return Blocks(2, 2, (0,))


# ---------------------------------------------------------------------------
# strategies

def aps():
    return st.integers(1, 12).flatmap(lambda m: st.builds(AP, st.integers(0, m - 1), st.just(m)))


def blocks():
    return st.tuples(st.integers(2, 4), st.integers(1, 3)).flatmap(
        lambda bp: st.builds(
            Blocks, st.just(bp[0]), st.just(bp[1]),
            st.sets(st.integers(0, bp[1] - 1)).map(lambda s: tuple(sorted(s))),
        )
    )


def finites():
    return st.sets(st.integers(1, 200), max_size=6).map(lambda s: Finite(tuple(sorted(s))))


def rules(m):
    return st.one_of(st.just(First()), st.integers(1, m).map(Offset), st.integers(0, 2**64 - 1).map(Seeded))


def primitives():
    return st.one_of(st.just(Nat()), st.just(Empty()), finites(), aps(), blocks())


def set_exprs(max_leaves=4, with_copies=True):
    def extend(children):
        ops = [
            st.builds(Union, children, children),
            st.builds(Inter, children, children),
            st.builds(Diff, children, children),
            st.builds(Compl, children),
        ]
        if with_copies:
            ops.append(st.integers(1, 4).flatmap(lambda m: st.builds(MCopy, children, st.just(m), rules(m))))
        return st.one_of(*ops)

    return st.recursive(primitives(), extend, max_leaves=max_leaves)


def periodic_exprs(max_leaves=4):
    """Boolean combinations of Finite and AP sets (exact density known)."""
    leaves = st.one_of(st.just(Nat()), st.just(Empty()), finites(), aps())
    return st.recursive(
        leaves,
        lambda c: st.one_of(st.builds(Union, c, c), st.builds(Inter, c, c), st.builds(Diff, c, c), st.builds(Compl, c)),
        max_leaves=max_leaves,
    )


# ---------------------------------------------------------------------------
# acceptance summary: one pass/fail line per criterion

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
