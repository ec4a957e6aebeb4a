"""Asymptotic and alpha-densities: numerical estimates, closed forms and theorem checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .counting import (
    ALPHA_MAX, _pattern, _structure, check_alpha, dense_ratios, ratios_at,
)
from .errors import DomainError, InsufficientHorizon, PreconditionFailed
from .report import CheckReport, pmap
from .setexpr import Blocks, Compl, MCopy, SetExpr, critical_points, has_blocks

DEFAULT_HORIZON = 1 << 22
MIN_HORIZON = 1 << 10
TAIL_FRACTION = 64
MIN_TAIL_CHECKPOINTS = 32
TOL_EXIST = 5e-3
EPS_MONO = 1e-2
EPS_NUM = 1e-2


def geometric_grid(lo: int, hi: int) -> list[int]:
    """Integers lo = g_0 < g_1 < ... <= hi with g_{j+1} = ceil(1.05 g_j), plus hi."""
    pts = [lo]
    while pts[-1] < hi:
        x = pts[-1]
        pts.append(min(hi, max(x + 1, (x * 105 + 99) // 100)))
    return pts


def tail_checkpoints(expr: Optional[SetExpr], horizon: int) -> tuple:
    """Geometric grid on [horizon/64, horizon] merged with the expression's block boundaries."""
    if horizon < MIN_HORIZON:
        raise InsufficientHorizon(f"horizon {horizon} is below the minimum {MIN_HORIZON}")
    lo = max(1, horizon // TAIL_FRACTION)
    pts = set(geometric_grid(lo, horizon))
    if expr is not None:
        pts.update(critical_points(expr, lo, horizon))
    pts = tuple(sorted(pts))
    if len(pts) < MIN_TAIL_CHECKPOINTS:
        raise InsufficientHorizon(f"only {len(pts)} tail checkpoints at horizon {horizon}")
    return pts


@dataclass(frozen=True)
class DensityEstimate:
    liminf_est: float
    limsup_est: float
    exists: bool
    value: Optional[float]
    exact: Optional[Fraction]
    horizon: int
    alpha: float
    checkpoint_count: int

    def to_json(self) -> dict:
        doc = {"liminf": self.liminf_est, "limsup": self.limsup_est, "exists": self.exists}
        if self.value is not None:
            doc["value"] = self.value
        if self.exact is not None:
            doc["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        doc.update(alpha=self.alpha, horizon=self.horizon, checkpoints=self.checkpoint_count)
        return doc


def summarize(ratios: Sequence[float], *, horizon, alpha, exact=None, tol_exist=TOL_EXIST) -> DensityEstimate:
    lo = min(1.0, max(0.0, min(ratios)))
    hi = min(1.0, max(0.0, max(ratios)))
    exists = hi - lo <= tol_exist
    return DensityEstimate(lo, hi, exists, (lo + hi) / 2 if exists else None, exact, horizon, alpha, len(ratios))


def estimate_alpha_density(
    expr: SetExpr, alpha: float = 0.0, horizon: int = DEFAULT_HORIZON, *, tol_exist: float = TOL_EXIST,
    engine: str = "auto",
) -> DensityEstimate:
    """liminf/limsup of A_alpha(n)/N_alpha(n) over the tail checkpoints.

    The verdict ``exists`` is a heuristic: the tail spread is at most
    `tol_exist`.  For alpha = -1 the ratio converges like 1/ln n, so a
    meaningful verdict needs very large horizons (available for piecewise
    periodic expressions through the closed-form engine).
    """
    alpha = check_alpha(alpha)
    cps = tail_checkpoints(expr, horizon)
    ratios = ratios_at(expr, alpha, cps, engine)
    return summarize(ratios, horizon=horizon, alpha=alpha, exact=exact_density(expr), tol_exist=tol_exist)


def bounds_from_prefix(prefix: np.ndarray, horizon: int, extra: Sequence[int] = ()) -> tuple[float, float]:
    """(min, max) of prefix[n]/n over the tail checkpoints, for materialised sets."""
    cps = set(tail_checkpoints(None, horizon))
    lo = horizon // TAIL_FRACTION
    cps.update(p for p in extra if lo <= p <= horizon)
    cps = np.array(sorted(cps), dtype=np.int64)
    r = prefix[cps] / cps
    return float(r.min()), float(r.max())


# ---------------------------------------------------------------------------
# exact values

def exact_density(expr: SetExpr) -> Optional[Fraction]:
    """d(expr) for eventually periodic expressions (no Blocks subterm); None otherwise."""
    if has_blocks(expr):
        return None
    if isinstance(expr, Compl):
        inner = exact_density(expr.inner)
        return None if inner is None else 1 - inner
    if isinstance(expr, MCopy):
        inner = exact_density(expr.inner)
        return None if inner is None else inner / expr.m
    st = _structure(expr, None)
    if st is None:
        return None
    M, bps = st
    last = max(bps, default=0)
    return Fraction(len(_pattern(expr, last, last + M, M)), M)


def _phase_values(b: int, p: int, on: tuple, alpha: float):
    if float(alpha).is_integer():
        q = Fraction(b) ** (int(alpha) + 1)
    else:
        q = float(b) ** (alpha + 1)
    on = set(on)
    scale = (q - 1) / (1 - q ** (-p))
    return [scale * sum(q ** (-i) for i in range(1, p + 1) if (phi - i) % p in on) for phi in range(p)]


def exact_alpha_extremes(expr: SetExpr, alpha: float):
    """Closed-form (lower, upper) alpha-densities of a pure Blocks set, or None.

    The ratio rises inside "on" blocks and falls inside "off" blocks, so the
    extremes sit at block ends; at the end of block J-1 (J = phi mod p) the
    ratio tends to (q-1) sum_{i>=1} [J-i on] q^{-i} with q = base^(alpha+1).
    A complemented Blocks set is handled by duality.
    """
    alpha = float(alpha)
    if alpha <= -1 or alpha > ALPHA_MAX:
        raise DomainError(f"closed forms need -1 < alpha <= {ALPHA_MAX}, got {alpha}")
    if isinstance(expr, Compl) and isinstance(expr.inner, Blocks):
        lo, hi = exact_alpha_extremes(expr.inner, alpha)
        return 1 - hi, 1 - lo
    if not isinstance(expr, Blocks):
        return None
    vals = _phase_values(expr.base, expr.period, expr.on, alpha)
    clamp = lambda v: min(1.0, max(0.0, float(v)))  # noqa: E731
    return clamp(min(vals)), clamp(max(vals))


# ---------------------------------------------------------------------------
# theorem checks

def fuchs_consistency_check(expr: SetExpr, alpha_grid: Sequence[float], horizon: int = DEFAULT_HORIZON, tol: float = 1e-2) -> CheckReport:
    """For a set with density d, every alpha-density (alpha > -1) equals d."""
    d = exact_density(expr)
    if d is None:
        raise PreconditionFailed(f"{expr} has no exactly known asymptotic density")
    for a in alpha_grid:
        if a <= -1:
            raise DomainError("consistency check needs alpha > -1")
    ests = pmap(lambda a: estimate_alpha_density(expr, a, horizon), alpha_grid)
    rows = []
    for a, e in zip(alpha_grid, ests):
        resid = max(abs(e.liminf_est - float(d)), abs(e.limsup_est - float(d)))
        rows.append({"alpha": a, "liminf": e.liminf_est, "limsup": e.limsup_est, "residual": resid})
    return CheckReport("alpha_consistency", all(r["residual"] <= tol for r in rows), rows, f"d = {d}")


def rajagopal_monotonicity_check(expr: SetExpr, alpha: float, beta: float, horizon: int = DEFAULT_HORIZON, eps: float = EPS_MONO) -> CheckReport:
    """lda_beta <= lda_alpha <= uda_alpha <= uda_beta for -1 <= alpha <= beta, within eps."""
    if not -1 <= alpha <= beta:
        raise DomainError(f"need -1 <= alpha <= beta, got {alpha}, {beta}")
    ea, eb = pmap(lambda a: estimate_alpha_density(expr, a, horizon), [alpha, beta])
    chain = [eb.liminf_est, ea.liminf_est, ea.limsup_est, eb.limsup_est]
    ok = chain[0] <= chain[1] + eps and chain[1] <= chain[2] and chain[2] <= chain[3] + eps
    row = {"alpha": alpha, "beta": beta, "lda_beta": chain[0], "lda_alpha": chain[1], "uda_alpha": chain[2], "uda_beta": chain[3]}
    return CheckReport("alpha_monotonicity", ok, [row], str(expr))


def ggm_continuity_check(expr: SetExpr, alpha: float, delta: float, horizon: int = DEFAULT_HORIZON, eps: float = EPS_NUM) -> CheckReport:
    """Tail deviation between alpha- and (alpha +- delta)-ratios against 2 delta/(alpha+1) and 2 delta/(alpha-delta+1)."""
    if alpha <= -1 or not 0 < delta < alpha + 1:
        raise DomainError(f"need alpha > -1 and 0 < delta < alpha + 1, got alpha={alpha}, delta={delta}")
    check_alpha(alpha + delta)
    cps = tail_checkpoints(expr, horizon)
    base, up, down = pmap(lambda a: np.array(ratios_at(expr, a, cps)), [alpha, alpha + delta, alpha - delta])
    obs_up = float(np.max(np.abs(base - up)))
    obs_down = float(np.max(np.abs(base - down)))
    bound_up = 2 * delta / (alpha + 1)
    bound_down = 2 * delta / (alpha - delta + 1)
    rows = [
        {"direction": "+", "observed": obs_up, "bound": bound_up},
        {"direction": "-", "observed": obs_down, "bound": bound_down},
    ]
    ok = obs_up < bound_up + eps and obs_down < bound_down + eps
    return CheckReport("alpha_continuity", ok, rows, f"{expr}, alpha={alpha}, delta={delta}")


def oscillation_diagnostic(expr: SetExpr, alpha: float, horizon: int = 1 << 20) -> float:
    """max |x_n - x_{n+1}| over n in [horizon/2, horizon] for x_n = A_alpha(n)/N_alpha(n)."""
    x = dense_ratios(expr, alpha, max(1, horizon // 2), horizon + 1)
    return float(np.max(np.abs(np.diff(x))))
