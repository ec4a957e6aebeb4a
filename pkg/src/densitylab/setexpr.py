"""Symbolic subsets of N = {1, 2, 3, ...}.

Every node is a frozen dataclass, so expressions are hashable and can key
memo caches.  Membership is available both pointwise (:func:`contains`) and
vectorised over numpy index arrays (:func:`mask_at`).
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Union as _U

import numpy as np


class SetExprError(ValueError):
    """An expression node violates its invariants."""


# ---------------------------------------------------------------------------
# copy rules

@dataclass(frozen=True)
class First:
    """b_i = m*a_i + 1."""


@dataclass(frozen=True)
class Offset:
    t: int

    def __post_init__(self):
        if not isinstance(self.t, int) or self.t < 1:
            raise SetExprError(f"offset must be a positive integer, got {self.t!r}")


@dataclass(frozen=True)
class Seeded:
    seed: int

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise SetExprError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


CopyRule = _U[First, Offset, Seeded]

_M64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _splitmix64_np(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def seeded_offset(seed: int, a: int, m: int) -> int:
    """Offset t in 1..m chosen for element a under a Seeded rule."""
    return 1 + splitmix64(seed ^ splitmix64(a & _M64)) % m


def _seeded_offset_np(seed: int, a: np.ndarray, m: int) -> np.ndarray:
    h = _splitmix64_np(np.uint64(seed) ^ _splitmix64_np(a.astype(np.uint64)))
    return (h % np.uint64(m)).astype(np.int64) + 1


# ---------------------------------------------------------------------------
# expression nodes

class SetExpr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Nat(SetExpr):
    pass


@dataclass(frozen=True)
class Empty(SetExpr):
    pass


@dataclass(frozen=True)
class Finite(SetExpr):
    elements: tuple

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        if any(not isinstance(x, int) or x < 1 for x in els):
            raise SetExprError("finite elements must be positive integers")
        if any(a >= b for a, b in zip(els, els[1:])):
            raise SetExprError("finite elements must be strictly increasing")


@dataclass(frozen=True)
class AP(SetExpr):
    """{n >= 1 : n = r (mod m)}."""

    r: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise SetExprError(f"modulus must be >= 1, got {self.m}")
        if not 0 <= self.r < self.m:
            raise SetExprError(f"residue must satisfy 0 <= r < m, got r={self.r}, m={self.m}")


@dataclass(frozen=True)
class Blocks(SetExpr):
    """Union of the blocks (b^j, b^(j+1)] over j >= 0 with j mod p in `on`."""

    base: int
    period: int
    on: tuple

    def __post_init__(self):
        on = tuple(sorted(set(self.on)))
        object.__setattr__(self, "on", on)
        if self.base < 2:
            raise SetExprError(f"base must be >= 2, got {self.base}")
        if self.period < 1:
            raise SetExprError(f"period must be >= 1, got {self.period}")
        if any(not 0 <= j < self.period for j in on):
            raise SetExprError(f"block residues must lie in 0..{self.period - 1}")


@dataclass(frozen=True)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class Inter(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class Diff(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class Compl(SetExpr):
    inner: SetExpr


@dataclass(frozen=True)
class MCopy(SetExpr):
    inner: SetExpr
    m: int
    rule: CopyRule = First()

    def __post_init__(self):
        if self.m < 1:
            raise SetExprError(f"copy factor must be >= 1, got {self.m}")
        if isinstance(self.rule, Offset) and self.rule.t > self.m:
            raise SetExprError(f"offset {self.rule.t} exceeds copy factor {self.m}")


def m_copy(expr: SetExpr, m: int, rule: CopyRule = First()) -> MCopy:
    """An m-copy of `expr`: each element a is replaced by one of m*a+1..m*a+m."""
    return MCopy(expr, m, rule)


def finite(elements: Iterable[int]) -> Finite:
    return Finite(tuple(sorted(set(elements))))


# ---------------------------------------------------------------------------
# membership

def _copy_offset(rule: CopyRule, a: int, m: int) -> int:
    if isinstance(rule, First):
        return 1
    if isinstance(rule, Offset):
        return rule.t
    return seeded_offset(rule.seed, a, m)


def contains(expr: SetExpr, n: int) -> bool:
    """True iff n belongs to the set denoted by `expr` (n >= 1)."""
    if isinstance(expr, Nat):
        return n >= 1
    if isinstance(expr, Empty):
        return False
    if isinstance(expr, Finite):
        i = bisect.bisect_left(expr.elements, n)
        return i < len(expr.elements) and expr.elements[i] == n
    if isinstance(expr, AP):
        return n >= 1 and n % expr.m == expr.r
    if isinstance(expr, Blocks):
        j = block_index(expr.base, n)
        return j >= 0 and (j % expr.period) in expr.on
    if isinstance(expr, Union):
        return contains(expr.left, n) or contains(expr.right, n)
    if isinstance(expr, Inter):
        return contains(expr.left, n) and contains(expr.right, n)
    if isinstance(expr, Diff):
        return contains(expr.left, n) and not contains(expr.right, n)
    if isinstance(expr, Compl):
        return n >= 1 and not contains(expr.inner, n)
    if isinstance(expr, MCopy):
        a, t = divmod(n - 1, expr.m)
        t += 1
        return a >= 1 and t == _copy_offset(expr.rule, a, expr.m) and contains(expr.inner, a)
    raise TypeError(f"not a set expression: {expr!r}")


def block_index(base: int, n: int) -> int:
    """j with base^j < n <= base^(j+1); -1 for n <= 1."""
    if n <= 1:
        return -1
    j, p = 0, base
    while p < n:
        p *= base
        j += 1
    return j


def mask_at(expr: SetExpr, ks: np.ndarray) -> np.ndarray:
    """Vectorised membership for an int64 array of candidates (entries <= 0 are never members)."""
    ks = np.asarray(ks, dtype=np.int64)
    if isinstance(expr, Nat):
        return ks >= 1
    if isinstance(expr, Empty):
        return np.zeros(ks.shape, dtype=bool)
    if isinstance(expr, Finite):
        els = [x for x in expr.elements if x < 2**62]
        return np.isin(ks, np.array(els, dtype=np.int64))
    if isinstance(expr, AP):
        return (ks >= 1) & (ks % expr.m == expr.r)
    if isinstance(expr, Blocks):
        top = int(ks.max()) if ks.size else 1
        powers = [1]
        while powers[-1] < top:
            powers.append(powers[-1] * expr.base)
        j = np.searchsorted(np.array(powers, dtype=np.int64), ks, side="left") - 1
        on = np.zeros(expr.period, dtype=bool)
        on[list(expr.on)] = True
        return (ks >= 2) & on[np.maximum(j, 0) % expr.period]
    if isinstance(expr, Union):
        return mask_at(expr.left, ks) | mask_at(expr.right, ks)
    if isinstance(expr, Inter):
        return mask_at(expr.left, ks) & mask_at(expr.right, ks)
    if isinstance(expr, Diff):
        return mask_at(expr.left, ks) & ~mask_at(expr.right, ks)
    if isinstance(expr, Compl):
        return (ks >= 1) & ~mask_at(expr.inner, ks)
    if isinstance(expr, MCopy):
        m = expr.m
        a = (ks - 1) // m
        t = ks - m * a
        ok = a >= 1
        if isinstance(expr.rule, First):
            ok &= t == 1
        elif isinstance(expr.rule, Offset):
            ok &= t == expr.rule.t
        else:
            ok &= t == _seeded_offset_np(expr.rule.seed, np.maximum(a, 0), m)
        out = np.zeros(ks.shape, dtype=bool)
        if ok.any():
            out[ok] = mask_at(expr.inner, a[ok])
        return out
    raise TypeError(f"not a set expression: {expr!r}")


def mask_range(expr: SetExpr, horizon: int) -> np.ndarray:
    """Boolean array `m` of length horizon+1 with m[k] = (k in expr); m[0] is False."""
    return mask_at(expr, np.arange(horizon + 1, dtype=np.int64))


# ---------------------------------------------------------------------------
# structure helpers

def subterms(expr: SetExpr):
    yield expr
    if isinstance(expr, (Union, Inter, Diff)):
        yield from subterms(expr.left)
        yield from subterms(expr.right)
    elif isinstance(expr, (Compl, MCopy)):
        yield from subterms(expr.inner)


def has_blocks(expr: SetExpr) -> bool:
    return any(isinstance(e, Blocks) for e in subterms(expr))


def critical_points(expr: SetExpr, lo: int, hi: int) -> list[int]:
    """Block boundaries of every Blocks subterm inside [lo, hi], mapped through m-copies."""
    pts = set()
    for p in _boundaries(expr, hi):
        if lo <= p <= hi:
            pts.add(p)
    return sorted(pts)


def _boundaries(expr, hi):
    if isinstance(expr, Blocks):
        p = 1
        out = []
        while p <= hi:
            out.append(p)
            p *= expr.base
        return out
    if isinstance(expr, (Union, Inter, Diff)):
        return _boundaries(expr.left, hi) + _boundaries(expr.right, hi)
    if isinstance(expr, Compl):
        return _boundaries(expr.inner, hi)
    if isinstance(expr, MCopy):
        m = expr.m
        inner = _boundaries(expr.inner, hi // m + 1)
        if isinstance(expr.rule, Seeded):
            return [m * b + d for b in inner for d in (0, m)]
        t = _copy_offset(expr.rule, 0, m)
        return [m * b + t for b in inner]
    return []


def is_finite(expr: SetExpr) -> bool:
    """Conservative structural test: True only when the set is certainly finite."""
    return _finiteness(expr) == "finite"


def _finiteness(expr):
    if isinstance(expr, (Empty, Finite)):
        return "finite"
    if isinstance(expr, Nat):
        return "cofinite"
    if isinstance(expr, Blocks):
        if not expr.on:
            return "finite"
        if len(expr.on) == expr.period:
            return "cofinite"
        return "unknown"
    if isinstance(expr, Compl):
        f = _finiteness(expr.inner)
        return {"finite": "cofinite", "cofinite": "finite"}.get(f, "unknown")
    if isinstance(expr, MCopy):
        return "finite" if _finiteness(expr.inner) == "finite" else "unknown"
    if isinstance(expr, AP):
        return "cofinite" if expr.m == 1 else "unknown"
    a, b = _finiteness(expr.left), _finiteness(expr.right)
    if isinstance(expr, Union):
        if a == b == "finite":
            return "finite"
        return "cofinite" if "cofinite" in (a, b) else "unknown"
    if isinstance(expr, Inter):
        if "finite" in (a, b):
            return "finite"
        return "cofinite" if a == b == "cofinite" else "unknown"
    # Diff
    if a == "finite" or b == "cofinite":
        return "finite"
    return "cofinite" if a == "cofinite" and b == "finite" else "unknown"


def simplify(expr: SetExpr) -> SetExpr:
    """Light algebraic clean-up (identities with Nat/Empty, double complement)."""
    if isinstance(expr, (Union, Inter, Diff)):
        l, r = simplify(expr.left), simplify(expr.right)
        empty_l = isinstance(l, Empty) or (isinstance(l, Compl) and isinstance(l.inner, Nat))
        empty_r = isinstance(r, Empty) or (isinstance(r, Compl) and isinstance(r.inner, Nat))
        if isinstance(expr, Union):
            if empty_l:
                return r
            if empty_r:
                return l
            if isinstance(l, Nat) or isinstance(r, Nat):
                return Nat()
            return l if l == r else Union(l, r)
        if isinstance(expr, Inter):
            if empty_l or empty_r:
                return Empty()
            if isinstance(l, Nat):
                return r
            if isinstance(r, Nat):
                return l
            return l if l == r else Inter(l, r)
        if empty_l or isinstance(r, Nat) or l == r:
            return Empty()
        return l if empty_r else Diff(l, r)
    if isinstance(expr, Compl):
        inner = simplify(expr.inner)
        if isinstance(inner, Compl):
            return inner.inner
        if isinstance(inner, Nat):
            return Empty()
        if isinstance(inner, Empty):
            return Nat()
        return Compl(inner)
    if isinstance(expr, MCopy):
        return MCopy(simplify(expr.inner), expr.m, expr.rule)
    return expr


# ---------------------------------------------------------------------------
# canonical text

def to_text(expr: SetExpr) -> str:
    if isinstance(expr, Nat):
        return "nat"
    if isinstance(expr, Empty):
        return "empty"
    if isinstance(expr, Finite):
        return "finite{" + ",".join(map(str, expr.elements)) + "}"
    if isinstance(expr, AP):
        return f"ap({expr.r},{expr.m})"
    if isinstance(expr, Blocks):
        return f"blocks({expr.base},{expr.period},on=[{','.join(map(str, expr.on))}])"
    if isinstance(expr, Union):
        return f"union({to_text(expr.left)},{to_text(expr.right)})"
    if isinstance(expr, Inter):
        return f"inter({to_text(expr.left)},{to_text(expr.right)})"
    if isinstance(expr, Diff):
        return f"diff({to_text(expr.left)},{to_text(expr.right)})"
    if isinstance(expr, Compl):
        return f"compl({to_text(expr.inner)})"
    if isinstance(expr, MCopy):
        rule = expr.rule
        if isinstance(rule, First):
            r = "first"
        elif isinstance(rule, Offset):
            r = f"offset:{rule.t}"
        else:
            r = f"seed:{rule.seed}"
        return f"mcopy({to_text(expr.inner)},{expr.m},{r})"
    raise TypeError(f"not a set expression: {expr!r}")
