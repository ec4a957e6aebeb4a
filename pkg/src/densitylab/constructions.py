"""Explicit set constructions: the inductive intermediate-density subset and friends."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .counting import stream_mask
from .density import bounds_from_prefix, estimate_alpha_density
from .errors import PreconditionFailed
from .setexpr import Blocks, Compl, SetExpr

CONSTRUCTION_HORIZON = 10**6
DEFAULT_TOL = 1e-2


@dataclass
class ConstructedSet:
    """A set materialised on [1, horizon] as a boolean mask (index 0 unused)."""

    mask: np.ndarray
    horizon: int
    provenance: dict
    parts: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._prefix: Optional[np.ndarray] = None

    @property
    def prefix(self) -> np.ndarray:
        if self._prefix is None:
            self._prefix = np.cumsum(self.mask, dtype=np.int64)
        return self._prefix

    def contains(self, n: int) -> bool:
        if not 1 <= n <= self.horizon:
            raise ValueError(f"{n} outside [1, {self.horizon}]")
        return bool(self.mask[n])

    def count(self, n: int) -> int:
        if not 0 <= n <= self.horizon:
            raise ValueError(f"{n} outside [0, {self.horizon}]")
        return int(self.prefix[n])

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def density_bounds(self) -> tuple[float, float]:
        """(min, max) of D(n)/n over the tail checkpoints of the horizon."""
        return bounds_from_prefix(self.prefix, self.horizon)

    def to_rle(self) -> str:
        """Maximal runs of members as "a-b,c-d,..."."""
        m = self.mask[1 : self.horizon + 1].astype(np.int8)
        edges = np.diff(np.concatenate(([0], m, [0])))
        starts = np.flatnonzero(edges == 1) + 1
        ends = np.flatnonzero(edges == -1)
        return ",".join(f"{a}-{b}" for a, b in zip(starts.tolist(), ends.tolist()))


def _induction(a_prime: np.ndarray, b_prime: np.ndarray) -> np.ndarray:
    """D' subset of B': take n in B' exactly when D'(n-1) + 1 <= A'(n)."""
    a_count = np.cumsum(a_prime, dtype=np.int64).tolist()
    b = b_prime.tolist()
    out = bytearray(len(b))
    d = 0
    for n in range(1, len(b)):
        if b[n] and d + 1 <= a_count[n]:
            out[n] = 1
            d += 1
    return np.frombuffer(bytes(out), dtype=np.uint8).astype(bool)


def _build(a_mask: np.ndarray, b_mask: np.ndarray):
    c = a_mask & b_mask
    a_prime = a_mask & ~c
    b_prime = b_mask & ~c
    d_prime = _induction(a_prime, b_prime)
    return c | d_prime, {"C": c, "A'": a_prime, "B'": b_prime, "D'": d_prime}


def _density(expr: SetExpr, horizon: int, tol: float):
    est = estimate_alpha_density(expr, 0.0, horizon)
    if est.limsup_est - est.liminf_est > tol:
        raise PreconditionFailed(f"density of {expr} not resolved at horizon {horizon}")
    return (est.liminf_est + est.limsup_est) / 2


def _check_gap(a: SetExpr, b: SetExpr, horizon: int, tol: float):
    da, db = _density(a, horizon, tol), _density(b, horizon, tol)
    if db - da < 3 * tol:
        raise PreconditionFailed(f"need d(A) < d(B) by at least {3 * tol}; got {da:.4g} and {db:.4g}")
    return da, db


def intermediate_subset(a: SetExpr, b: SetExpr, horizon: int = CONSTRUCTION_HORIZON, tol: float = DEFAULT_TOL) -> ConstructedSet:
    """D with A∩B ⊆ D ⊆ B and d(D) = d(A), for d(A) < d(B).

    With C = A∩B, A' = A∖C, B' = B∖C the set D' ⊆ B' is built greedily so
    that D'(n) never exceeds A'(n); D = C ∪ D'.
    """
    da, db = _check_gap(a, b, horizon, tol)
    mask, parts = _build(stream_mask(a, horizon), stream_mask(b, horizon))
    prov = {"algorithm": "intermediate_subset", "A": str(a), "B": str(b), "horizon": horizon, "d_A": da, "d_B": db}
    return ConstructedSet(mask, horizon, prov, parts)


def difference_matching_subset(a: SetExpr, b: SetExpr, horizon: int = CONSTRUCTION_HORIZON, tol: float = DEFAULT_TOL) -> ConstructedSet:
    """D with A∩B ⊆ D ⊆ B and (D(n) - A(n))/n -> 0, when (B(n) - A(n))/n has a limit >= 0."""
    from .measures import difference_limit

    lo, hi = difference_limit(a, b, horizon)
    if hi - lo > tol or hi < -tol:
        raise PreconditionFailed(f"(B(n)-A(n))/n not resolved to a nonnegative limit: [{lo:.4g}, {hi:.4g}]")
    mask, parts = _build(stream_mask(a, horizon), stream_mask(b, horizon))
    prov = {"algorithm": "difference_matching_subset", "A": str(a), "B": str(b), "horizon": horizon,
            "limit": (lo + hi) / 2}
    return ConstructedSet(mask, horizon, prov, parts)


def counterexample_set() -> Blocks:
    """The union of the blocks (4^k, 2*4^k]."""
    return Blocks(2, 2, (0,))


def corollary_superset(a: SetExpr, b: SetExpr, horizon: int = CONSTRUCTION_HORIZON, tol: float = DEFAULT_TOL) -> ConstructedSet:
    """D with A ⊆ D ⊆ A∪B and d(D) = d(B), for d(A) < d(B).

    Runs intermediate_subset on (ℕ∖B, ℕ∖A) and complements the result.
    """
    inner = intermediate_subset(Compl(b), Compl(a), horizon, tol)
    mask = ~inner.mask
    mask[0] = False
    prov = {"algorithm": "corollary_superset", "A": str(a), "B": str(b), "horizon": horizon,
            "d_A": 1 - inner.provenance["d_B"], "d_B": 1 - inner.provenance["d_A"]}
    return ConstructedSet(mask, horizon, prov, {"E": inner.mask})
