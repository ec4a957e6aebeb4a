"""Counting functions A(n), weighted sums A_alpha(n) and the normaliser N_alpha(n).

Two engines back every quantity:

* streaming: a membership mask over [1, H] (H <= STREAM_LIMIT) with exact
  prefix counts and exactly-rounded (``math.fsum``) chunk sums, accumulated in
  ascending order so results are bit-reproducible;
* closed form: expressions without seeded m-copies are piecewise periodic
  (constant residue pattern modulo M between consecutive breakpoints), so
  counts are exact integer formulas and power sums come from an
  Euler-Maclaurin evaluation in mpmath.  This one reaches horizons far
  beyond 2^24.

``engine="auto"`` streams up to STREAM_LIMIT and switches to closed forms
above it.  Counts (alpha = 0) are always exact integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .errors import DomainError, HorizonExceeded
from .setexpr import (
    AP, Blocks, Compl, Diff, Empty, Finite, Inter, MCopy, Nat, Seeded, SetExpr,
    Union, _copy_offset, contains, is_finite, mask_at,
)

STREAM_LIMIT = 1 << 24
ALPHA_MIN, ALPHA_MAX = -1.0, 40.0
MAX_MODULUS = 1 << 16
NTH_CAP = 1 << 64

_EM_START = 256       # direct summation below this abscissa
_EM_MIN_TERMS = 48    # short runs are summed directly
_EM_ORDER = 24


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (ALPHA_MIN <= alpha <= ALPHA_MAX) or math.isnan(alpha):
        raise DomainError(f"alpha={alpha} outside the supported range [{ALPHA_MIN}, {ALPHA_MAX}]")
    return alpha


def floor_theta(n: int, theta: float) -> int:
    """floor(theta * n) computed exactly for arbitrarily large n."""
    f = Fraction(theta)
    return (f.numerator * n) // f.denominator


# ---------------------------------------------------------------------------
# streaming engine

def _bucket(n: int) -> int:
    return max(1 << 12, 1 << (max(n, 1) - 1).bit_length())


@lru_cache(maxsize=8)
def _stream(expr: SetExpr, bucket: int):
    mask = mask_at(expr, np.arange(bucket + 1, dtype=np.int64))
    mask[0] = False
    return mask, np.cumsum(mask, dtype=np.int64)


def stream_mask(expr: SetExpr, horizon: int) -> np.ndarray:
    """Membership mask for k = 0..horizon (read-only view, index 0 unused)."""
    if horizon > STREAM_LIMIT:
        raise HorizonExceeded(f"streaming horizon {horizon} exceeds {STREAM_LIMIT}")
    mask, _ = _stream(expr, _bucket(horizon))
    view = mask[: horizon + 1]
    view.flags.writeable = False
    return view


def stream_prefix(expr: SetExpr, horizon: int) -> np.ndarray:
    if horizon > STREAM_LIMIT:
        raise HorizonExceeded(f"streaming horizon {horizon} exceeds {STREAM_LIMIT}")
    _, prefix = _stream(expr, _bucket(horizon))
    return prefix[: horizon + 1]


@lru_cache(maxsize=2)
def _weights(alpha: float, bucket: int) -> np.ndarray:
    k = np.arange(bucket + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        w = k**alpha
    w[0] = 0.0
    return w


def stream_weights(alpha: float, horizon: int) -> np.ndarray:
    return _weights(alpha, _bucket(horizon))[: horizon + 1]


def _stream_weighted_prefix(expr: SetExpr, alpha: float, points: Sequence[int]) -> list[float]:
    top = max(points)
    w = _weights(alpha, _bucket(top))
    mask = None if isinstance(expr, Nat) else _stream(expr, _bucket(top))[0]
    partials: list[float] = []
    out = {}
    prev = 0
    for p in sorted(set(points)):
        chunk = w[prev + 1 : p + 1]
        if mask is not None:
            chunk = chunk[mask[prev + 1 : p + 1]]
        partials.append(math.fsum(chunk.tolist()))
        out[p] = math.fsum(partials)
        prev = p
    return [out[p] for p in points]


# ---------------------------------------------------------------------------
# closed-form engine

def _structure(expr: SetExpr, hi):
    """(modulus, breakpoints) such that membership is periodic between breakpoints.

    `hi` bounds the breakpoints; None means unbounded (only possible without
    Blocks).  Returns None when the expression is not piecewise periodic or the
    modulus would exceed MAX_MODULUS.
    """
    if isinstance(expr, (Nat, Empty)):
        return 1, set()
    if isinstance(expr, Finite):
        return 1, {y for x in expr.elements for y in (x - 1, x) if hi is None or y < hi}
    if isinstance(expr, AP):
        return expr.m, set()
    if isinstance(expr, Blocks):
        if hi is None:
            return None
        bps, p = set(), 1
        while p < hi:
            bps.add(p)
            p *= expr.base
        return 1, bps
    if isinstance(expr, Compl):
        return _structure(expr.inner, hi)
    if isinstance(expr, MCopy):
        if isinstance(expr.rule, Seeded):
            return None
        m, t = expr.m, _copy_offset(expr.rule, 0, expr.m)
        inner = _structure(expr.inner, None if hi is None else (hi - t) // m + 1)
        if inner is None:
            return None
        mod = m * inner[0]
        if mod > MAX_MODULUS:
            return None
        return mod, {m * b + t for b in inner[1]} | {t}
    if isinstance(expr, (Union, Inter, Diff)):
        a = _structure(expr.left, hi)
        b = _structure(expr.right, hi) if a is not None else None
        if b is None:
            return None
        mod = math.lcm(a[0], b[0])
        if mod > MAX_MODULUS:
            return None
        return mod, a[1] | b[1]
    raise TypeError(f"not a set expression: {expr!r}")


def _pattern(expr: SetExpr, s: int, e: int, M: int) -> np.ndarray:
    """Residues mod M of the members of expr in the segment (s, e]."""
    base = s + 1
    offs = (np.arange(M, dtype=np.int64) - (base % M)) % M
    live = offs <= (e - base)
    residues = (np.arange(M, dtype=np.int64))[live]
    offs = offs[live]
    if e < (1 << 62):
        hit = mask_at(expr, base + offs)
    else:
        hit = np.array([contains(expr, base + int(o)) for o in offs], dtype=bool)
    return residues[hit]


class _Piecewise:
    def __init__(self, expr: SetExpr, hi: int, structure):
        M, bps = structure
        self.M = M
        self.cuts = sorted({0, hi} | {b for b in bps if 0 < b < hi})
        self.patterns = [_pattern(expr, s, e, M) for s, e in zip(self.cuts, self.cuts[1:])]
        self.hi = hi

    def _accumulate(self, points, piece, zero):
        out = {}
        total = zero
        pos, si = 0, 0
        for p in sorted(set(points)):
            while pos < p:
                end = self.cuts[si + 1]
                stop = min(end, p)
                total = total + piece(pos, stop, self.patterns[si])
                pos = stop
                if pos == end:
                    si += 1
            out[p] = total
        return [out[p] for p in points]

    def counts(self, points):
        M = self.M

        def piece(s, e, R):
            if len(R) == 0:
                return 0
            full, rem = divmod(e - s, M)
            total = full * len(R)
            if rem:
                start = (s + full * M + 1) % M
                total += int(np.count_nonzero((R - start) % M < rem))
            return total

        return self._accumulate(points, piece, 0)

    def weighted(self, points, alpha: float):
        M = self.M
        ctx = _context(self.hi)
        a = ctx.mpf(alpha)
        all_res = np.arange(M, dtype=np.int64)

        def residue_sum(s, e, r):
            k0 = s + 1 + ((r - s - 1) % M)
            if k0 > e:
                return ctx.zero
            n = (e - k0) // M + 1
            if M == 1:
                return _power_sum(ctx, a, ctx.mpf(k0), n)
            return ctx.mpf(M) ** a * _power_sum(ctx, a, ctx.mpf(k0) / M, n)

        def piece(s, e, R):
            if len(R) == 0:
                return ctx.zero
            if 2 * len(R) > M and M > 1:
                missing = np.setdiff1d(all_res, R)
                total = _power_sum(ctx, a, ctx.mpf(s + 1), e - s)
                return total - ctx.fsum(residue_sum(s, e, int(r)) for r in missing)
            return ctx.fsum(residue_sum(s, e, int(r)) for r in R)

        return self._accumulate(points, piece, ctx.zero)


@lru_cache(maxsize=64)
def _model(expr: SetExpr, hi: int):
    st = _structure(expr, hi)
    return None if st is None else _Piecewise(expr, hi, st)


def piecewise_model(expr: SetExpr, hi: int):
    return _model(expr, _bucket(hi))


def is_piecewise_periodic(expr: SetExpr) -> bool:
    return _structure(expr, 1 << 16) is not None


def _context(hi: int):
    ctx = mpmath.MPContext()
    ctx.dps = 30 + len(str(hi))
    return ctx


@lru_cache(maxsize=None)
def _bernoulli_ratio(k: int) -> Fraction:
    p, q = mpmath.bernfrac(2 * k)
    return Fraction(int(p), int(q)) / math.factorial(2 * k)


def _power_sum(ctx, alpha, u0, n: int):
    """sum_{i=0}^{n-1} (u0 + i)^alpha for u0 > 0, by Euler-Maclaurin past a direct prefix."""
    total = ctx.zero
    i = 0
    direct = n if n <= _EM_MIN_TERMS else 0
    while i < n and (i < direct or u0 + i < _EM_START):
        total += (u0 + i) ** alpha
        i += 1
    if i == n:
        return total
    lo, hi = u0 + i, u0 + (n - 1)
    if alpha == -1:
        integral = ctx.log(hi / lo)
    else:
        integral = (hi ** (alpha + 1) - lo ** (alpha + 1)) / (alpha + 1)
    total += integral + (lo**alpha + hi**alpha) / 2
    tiny = ctx.mpf(10) ** (-ctx.dps)
    falling = ctx.one
    for k in range(1, _EM_ORDER + 1):
        r = 2 * k - 1
        # falling factorial alpha (alpha-1) ... (alpha-r+1)
        for j in (r - 2, r - 1) if k > 1 else (0,):
            falling *= alpha - j
        if falling == 0:
            break
        b = _bernoulli_ratio(k)
        term = ctx.mpf(b.numerator) / b.denominator * falling * (hi ** (alpha - r) - lo ** (alpha - r))
        total += term
        if abs(term) <= tiny * abs(total):
            break
    return total


# ---------------------------------------------------------------------------
# public counting API

def count(expr: SetExpr, n: int) -> int:
    """|expr ∩ [1, n]| as an exact integer."""
    if n <= 0:
        return 0
    if isinstance(expr, Nat):
        return n
    if isinstance(expr, Empty):
        return 0
    if isinstance(expr, Finite):
        import bisect

        return bisect.bisect_right(expr.elements, n)
    if isinstance(expr, AP):
        return (n - expr.r) // expr.m - (-expr.r) // expr.m
    if isinstance(expr, Blocks):
        total, lo, j = 0, 1, 0
        on = set(expr.on)
        while lo < n:
            hi = lo * expr.base
            if j % expr.period in on:
                total += min(hi, n) - lo
            lo, j = hi, j + 1
        return total
    if isinstance(expr, Compl):
        return n - count(expr.inner, n)
    if isinstance(expr, MCopy):
        # b = m*a + t with t in 1..m, so every a <= q-1 is counted and a = q only when t <= r
        q, r = divmod(n - 1, expr.m)
        r += 1
        total = count(expr.inner, q - 1)
        if q >= 1 and contains(expr.inner, q) and _copy_offset(expr.rule, q, expr.m) <= r:
            total += 1
        return total
    return counts_at(expr, [n])[0]


def counts_at(expr: SetExpr, points: Sequence[int]) -> list[int]:
    points = [int(p) for p in points]
    if not points:
        return []
    if not isinstance(expr, (Union, Inter, Diff)):
        return [count(expr, p) for p in points]
    top = max(points)
    model = piecewise_model(expr, top)
    if model is not None:
        return model.counts(points)
    if top > STREAM_LIMIT:
        raise HorizonExceeded(
            f"{expr} has no closed-form count and n={top} exceeds the streaming limit {STREAM_LIMIT}"
        )
    prefix = stream_prefix(expr, top)
    return [int(prefix[p]) if p > 0 else 0 for p in points]


def _weighted_prefix(expr: SetExpr, alpha: float, points: Sequence[int], engine: str = "auto"):
    if alpha == 0:
        return counts_at(expr, points)
    top = max(points)
    if engine == "auto":
        engine = "stream" if top <= STREAM_LIMIT else "closed"
    if engine == "stream":
        if top > STREAM_LIMIT:
            raise HorizonExceeded(f"n={top} exceeds the streaming limit {STREAM_LIMIT}")
        return _stream_weighted_prefix(expr, alpha, points)
    if engine != "closed":
        raise ValueError(f"unknown engine {engine!r}")
    if isinstance(expr, Empty):
        return [0.0] * len(points)
    model = piecewise_model(expr, top)
    if model is None:
        raise HorizonExceeded(f"{expr} is not piecewise periodic; weighted sums need n <= {STREAM_LIMIT}")
    return model.weighted(points, alpha)


def weighted_count(expr: SetExpr, alpha: float, n: int, engine: str = "auto"):
    """A_alpha(n) = sum of k^alpha over members k <= n.  Exact for alpha = 0."""
    alpha = check_alpha(alpha)
    if n < 1:
        raise DomainError("n must be >= 1")
    return _weighted_prefix(expr, alpha, [n], engine)[0]


def normalizer(alpha: float, n: int, engine: str = "auto"):
    """N_alpha(n) = weighted_count(Nat, alpha, n)."""
    return weighted_count(Nat(), alpha, n, engine)


def normalizer_ratio(alpha: float, n: int) -> float:
    """Diagnostic n^(alpha+1)/N_alpha(n) (ln n / N_{-1}(n) at alpha = -1)."""
    alpha = check_alpha(alpha)
    N = normalizer(alpha, n)
    if alpha == -1:
        return float(mpmath.log(n) / N)
    return float(mpmath.mpf(n) ** (alpha + 1) / N)


def nth_element(expr: SetExpr, i: int, cap: int = NTH_CAP):
    """The i-th smallest element of expr, or None when the set has fewer than i elements."""
    if i < 1:
        raise DomainError("index must be >= 1")
    hi = i
    while count(expr, hi) < i:
        if hi >= cap:
            if is_finite(expr):
                return None
            raise HorizonExceeded(f"element #{i} of {expr} not found below {cap}")
        hi = min(2 * hi, cap)
    lo = hi // 2 if hi > i else 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if count(expr, mid) >= i:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class CountingProfile:
    expr: SetExpr
    alpha: float
    checkpoints: tuple
    counts: tuple
    weighted: tuple
    normalizers: tuple

    def ratios(self) -> list[float]:
        if self.alpha == 0:
            return [c / n for c, n in zip(self.counts, self.checkpoints)]
        return [float(a / n) for a, n in zip(self.weighted, self.normalizers)]


@lru_cache(maxsize=256)
def _profile(expr, alpha, checkpoints, engine):
    counts = tuple(counts_at(expr, checkpoints))
    if alpha == 0:
        return CountingProfile(expr, alpha, checkpoints, counts, counts, checkpoints)
    weighted = tuple(_weighted_prefix(expr, alpha, checkpoints, engine))
    norms = tuple(_weighted_prefix(Nat(), alpha, checkpoints, engine))
    return CountingProfile(expr, alpha, checkpoints, counts, weighted, norms)


def counting_profile(expr: SetExpr, alpha: float, checkpoints: Sequence[int], engine: str = "auto") -> CountingProfile:
    """Memoised prefix data A(n_j), A_alpha(n_j), N_alpha(n_j) at sorted checkpoints."""
    alpha = check_alpha(alpha)
    cps = tuple(sorted(set(int(c) for c in checkpoints)))
    if not cps or cps[0] < 1:
        raise DomainError("checkpoints must be positive integers")
    return _profile(expr, alpha, cps, engine)


def ratios_at(expr: SetExpr, alpha: float, points: Sequence[int], engine: str = "auto") -> list[float]:
    """A_alpha(n)/N_alpha(n) at each point (any order, duplicates allowed)."""
    prof = counting_profile(expr, alpha, points, engine)
    lookup = dict(zip(prof.checkpoints, prof.ratios()))
    return [lookup[int(p)] for p in points]


def window_ratios(expr: SetExpr, theta: float, points: Sequence[int]) -> list[float]:
    """(A(n) - A(floor(theta n))) / (n - floor(theta n)) at each point."""
    lows = [floor_theta(int(p), theta) for p in points]
    c = counts_at(expr, list(points) + [max(l, 1) for l in lows])
    k = len(points)
    out = []
    for j, (n, l) in enumerate(zip(points, lows)):
        upper = c[j]
        lower = c[k + j] if l >= 1 else 0
        out.append((upper - lower) / (n - l))
    return out


def dense_ratios(expr: SetExpr, alpha: float, lo: int, hi: int) -> np.ndarray:
    """A_alpha(n)/N_alpha(n) for every n in [lo, hi] (streaming only)."""
    alpha = check_alpha(alpha)
    if hi > STREAM_LIMIT:
        raise HorizonExceeded(f"dense scans need hi <= {STREAM_LIMIT}")
    n = np.arange(lo, hi + 1, dtype=np.float64)
    if alpha == 0:
        return stream_prefix(expr, hi)[lo : hi + 1] / n
    w = stream_weights(alpha, hi)
    mask = stream_mask(expr, hi)
    base_a = math.fsum(w[1:lo][mask[1:lo]].tolist())
    base_n = math.fsum(w[1:lo].tolist())
    a = base_a + np.cumsum(np.where(mask[lo : hi + 1], w[lo : hi + 1], 0.0))
    nn = base_n + np.cumsum(w[lo : hi + 1])
    return a / nn
