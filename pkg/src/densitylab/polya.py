"""Polya minimal/maximal densities, gap density, alpha-envelopes and density-set samples."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .counting import STREAM_LIMIT, floor_theta, stream_mask, window_ratios
from .density import (
    DEFAULT_HORIZON, TAIL_FRACTION, bounds_from_prefix, estimate_alpha_density, exact_alpha_extremes,
    tail_checkpoints,
)
from .errors import DomainError, HorizonExceeded, InsufficientElements, InsufficientHorizon
from .report import CheckReport, pmap
from .setexpr import SetExpr, critical_points

DEFAULT_THETAS = (1 - 2**-4, 1 - 2**-6, 1 - 2**-8, 1 - 2**-10)
MIN_WINDOW = 16
PALETTE = (0.1, 0.25, 0.5, 0.75, 0.9)
INCREASING_RUN = 4   # at least this many strictly increasing tail ratios flag lambda = infinity
RUN_CAP = 10


@dataclass(frozen=True)
class ThetaRow:
    theta: float
    liminf: float
    limsup: float
    argmin: tuple   # checkpoints whose windowed ratio is within `slack` of the liminf estimate
    argmax: tuple

    def to_json(self) -> dict:
        return {"theta": self.theta, "liminf": self.liminf, "limsup": self.limsup,
                "argmin": list(self.argmin), "argmax": list(self.argmax)}


@dataclass(frozen=True)
class PolyaEstimate:
    lld_est: float
    uud_est: float
    theta_grid: tuple
    per_theta: tuple
    horizon: int
    lld_extrapolated: float = math.nan
    uud_extrapolated: float = math.nan

    def to_json(self) -> dict:
        return {
            "lld": self.lld_est, "uud": self.uud_est, "theta_grid": list(self.theta_grid),
            "per_theta": [r.to_json() for r in self.per_theta], "horizon": self.horizon,
            "extrapolated": {"lld": self.lld_extrapolated, "uud": self.uud_extrapolated},
        }


def _extrapolate(thetas, values) -> float:
    """Linear extrapolation to theta = 1 in h = 1 - theta from the last two grid values."""
    if len(values) < 2:
        return values[-1]
    h1, h2 = 1 - thetas[-2], 1 - thetas[-1]
    v1, v2 = values[-2], values[-1]
    return min(1.0, max(0.0, v2 - h2 * (v1 - v2) / (h1 - h2)))


def window_checkpoints(expr: SetExpr, theta: float, horizon: int) -> tuple:
    """Tail checkpoints plus the points where the window's left end meets a block boundary."""
    base = set(tail_checkpoints(expr, horizon))
    lo = max(1, horizon // TAIL_FRACTION)
    for c in critical_points(expr, lo, horizon):
        guess = int(c / theta)
        for n in range(guess - 1, guess + 3):
            if lo <= n <= horizon and floor_theta(n, theta) in (c, c - 1):
                base.add(n)
    return tuple(sorted(base))


def _theta_row(expr, theta, horizon, slack) -> ThetaRow:
    cps = window_checkpoints(expr, theta, horizon)
    r = np.array(window_ratios(expr, theta, cps))
    lo, hi = float(r.min()), float(r.max())
    cps = np.array(cps, dtype=object)
    return ThetaRow(theta, lo, hi, tuple(int(n) for n in cps[r <= lo + slack]),
                    tuple(int(n) for n in cps[r >= hi - slack]))


def polya_bounds(
    expr: SetExpr, theta_grid: Sequence[float] = DEFAULT_THETAS, horizon: int = DEFAULT_HORIZON,
    *, slack: float = 1e-2,
) -> PolyaEstimate:
    """Windowed liminf/limsup of (A(n) - A(theta n))/(n - theta n) for each theta.

    lld/uud are read off at the largest theta (no extrapolation); the linear
    extrapolation to theta -> 1 is reported alongside.
    """
    thetas = tuple(float(t) for t in theta_grid)
    if not thetas or any(not 0 < t < 1 for t in thetas) or any(a >= b for a, b in zip(thetas, thetas[1:])):
        raise DomainError("theta grid must be increasing inside (0, 1)")
    if horizon < 1 << 12:
        raise InsufficientHorizon(f"Polya windows need horizon >= 4096, got {horizon}")
    if (horizon // TAIL_FRACTION) * (1 - thetas[-1]) < MIN_WINDOW:
        raise InsufficientHorizon(f"theta={thetas[-1]} leaves windows shorter than {MIN_WINDOW} at horizon {horizon}")
    rows = tuple(pmap(lambda t: _theta_row(expr, t, horizon, slack), thetas))
    return PolyaEstimate(
        rows[-1].liminf, rows[-1].limsup, thetas, rows, horizon,
        _extrapolate(thetas, [r.liminf for r in rows]), _extrapolate(thetas, [r.limsup for r in rows]),
    )


# ---------------------------------------------------------------------------

def gap_ratios(expr: SetExpr, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Consecutive-element ratios a_{i+1}/a_i below the horizon, and the elements a_i."""
    if horizon > STREAM_LIMIT:
        raise HorizonExceeded(f"gap scans need horizon <= {STREAM_LIMIT}")
    els = np.flatnonzero(stream_mask(expr, horizon))
    if len(els) < 2:
        raise InsufficientElements(f"{expr} has fewer than 2 elements below {horizon}")
    return els[1:] / els[:-1], els[:-1]


def gap_density(expr: SetExpr, horizon: int = DEFAULT_HORIZON) -> float:
    """lambda(A) = limsup a_{i+1}/a_i, estimated over consecutive elements in the tail window.

    Returns math.inf when the last ratios below the horizon (at least 4, up
    to 10) increase strictly, the signature of super-geometric sets such as
    {k!}; such sets are usually too thin to leave pairs in the tail window.
    """
    r, lows = gap_ratios(expr, horizon)
    run = r[-min(RUN_CAP, len(r)):]
    if len(run) >= INCREASING_RUN and np.all(np.diff(run) > 0):
        return math.inf
    tail = r[lows >= max(1, horizon // TAIL_FRACTION)]
    if len(tail) == 0:
        raise InsufficientElements(f"{expr} has fewer than 2 elements in the tail window of {horizon}")
    return float(tail.max())


def alpha_envelopes(expr: SetExpr, alpha_grid: Sequence[float], horizon: int = DEFAULT_HORIZON) -> tuple[float, float]:
    """(upper bound on lda_inf, lower bound on uda_inf): min/max over the grid of alpha-extremes.

    Uses closed forms where available.  A finite grid can only overshoot
    lda_inf = inf_alpha lda_alpha and undershoot uda_inf.
    """
    def extremes(a):
        ex = exact_alpha_extremes(expr, a) if a > -1 else None
        if ex is not None:
            return ex
        e = estimate_alpha_density(expr, a, horizon)
        return e.liminf_est, e.limsup_est

    pairs = pmap(extremes, list(alpha_grid))
    return min(p[0] for p in pairs), max(p[1] for p in pairs)


def density_set_sample(
    expr: SetExpr, num_subsets: int, horizon: int = 1 << 20, seed: int = 0,
    probabilities: Optional[Sequence[float]] = None,
) -> list[tuple[float, float]]:
    """(ld, ud) estimates of random subsets of expr; keep-probabilities cycle through the palette."""
    if num_subsets < 1:
        raise DomainError("num_subsets must be >= 1")
    probs = tuple(probabilities) if probabilities is not None else PALETTE
    rng = np.random.default_rng(seed)
    mask = stream_mask(expr, horizon)
    crit = critical_points(expr, horizon // TAIL_FRACTION, horizon)
    points = []
    for i in range(num_subsets):
        keep = mask & (rng.random(horizon + 1) < probs[i % len(probs)])
        prefix = np.cumsum(keep, dtype=np.int64)
        points.append(bounds_from_prefix(prefix, horizon, crit))
    return points


def density_set_csv(points) -> str:
    buf = io.StringIO()
    buf.write("ld,ud\n")
    for ld, ud in points:
        buf.write(f"{ld!r},{ud!r}\n")
    return buf.getvalue()


def density_set_line_check(points, lam: float, eps_line: float = 0.05, min_ld: float = 0.0) -> CheckReport:
    """Every point with ld > min_ld lies above y = lam x - eps_line."""
    rows = [{"ld": ld, "ud": ud, "margin": ud - lam * ld} for ld, ud in points if ld > min_ld]
    ok = all(r["margin"] >= -eps_line for r in rows)
    return CheckReport("density_set_line", ok, rows, f"lambda={lam}")
