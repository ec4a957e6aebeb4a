"""Density measures built from filter-limit surrogates.

An ultrafilter F is replaced by an explicit increasing index sequence; the
F-limit of x_n is taken as the common value of x_n along the last indices of
that sequence below the horizon.  When those values do not settle the
surrogate does not pin a single cluster point and NonConvergent is raised.
"""
from __future__ import annotations

import json
import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union as TUnion

import numpy as np

from .counting import ALPHA_MAX, STREAM_LIMIT, count, is_piecewise_periodic, nth_element, ratios_at, window_ratios
from .density import DEFAULT_HORIZON, exact_density, geometric_grid
from .errors import DomainError, NonConvergent, NotDisjoint, OutOfRange, PreconditionFailed
from .polya import MIN_WINDOW, polya_bounds
from .report import CheckReport, pmap
from .setexpr import Inter, SetExpr, critical_points

CONVERGENCE_WINDOW = 16
DEFAULT_TOL = 1e-2
DEFAULT_MAX_TERMS = 64
CLOSED_HORIZON = 1 << 128
WITNESS_THETA = 1 - 2**-10


def default_horizon(*exprs: SetExpr) -> int:
    """2^128 when every expression has closed-form counts, else the streaming limit."""
    return CLOSED_HORIZON if all(is_piecewise_periodic(e) for e in exprs) else STREAM_LIMIT


# ---------------------------------------------------------------------------
# filter surrogates

@dataclass(frozen=True)
class ExplicitFilter:
    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx or idx[0] < 2 or any(a >= b for a, b in zip(idx, idx[1:])):
            raise DomainError("explicit filter indices must be strictly increasing and >= 2")

    def generate(self, horizon: int) -> list[int]:
        return [i for i in self.indices if i <= horizon]

    def to_json(self) -> dict:
        return {"kind": "explicit", "indices": list(self.indices)}


@dataclass(frozen=True)
class BlockBoundaryFilter:
    """Indices base^(stride k + phase), k >= 0, keeping those >= 2."""

    base: int
    phase: int
    stride: int

    def __post_init__(self):
        if self.base < 2 or self.stride < 1 or not 0 <= self.phase < self.stride:
            raise DomainError("need base >= 2, stride >= 1 and 0 <= phase < stride")

    def generate(self, horizon: int) -> list[int]:
        out, e = [], self.phase
        while self.base**e <= horizon:
            if self.base**e >= 2:
                out.append(self.base**e)
            e += self.stride
        return out

    def to_json(self) -> dict:
        return {"kind": "block_boundaries", "base": self.base, "phase": self.phase, "stride": self.stride}


@dataclass(frozen=True)
class PolyaWindowFilter:
    """Per dyadic segment [2^k, 2^(k+1)], the point where the theta-window ratio of `target` is extreme.

    Segments start once windows hold at least 16 integers.  Candidates are
    the geometric grid and block boundaries of `target` inside the segment.
    """

    theta: float
    target: SetExpr
    extreme: str = "min"

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise DomainError("theta must lie in (0, 1)")
        if self.extreme not in ("min", "max"):
            raise DomainError("extreme must be 'min' or 'max'")

    def generate(self, horizon: int) -> list[int]:
        return list(_polya_window_indices(self, horizon))

    def to_json(self) -> dict:
        return {"kind": "polya_windows", "theta": self.theta, "target": str(self.target), "extreme": self.extreme}


@lru_cache(maxsize=64)
def _polya_window_indices(filt: PolyaWindowFilter, horizon: int) -> tuple:
    # per-segment extreme of the target's window ratio
    k = max(1, math.ceil(math.log2(MIN_WINDOW / (1 - filt.theta))))
    out = []
    while 2 ** (k + 1) <= horizon:
        lo, hi = 2**k, 2 ** (k + 1)
        cands = sorted(set(geometric_grid(lo, hi)) | set(critical_points(filt.target, lo, hi)))
        r = np.array(window_ratios(filt.target, filt.theta, cands))
        j = int(np.argmin(r)) if filt.extreme == "min" else int(np.argmax(r))
        if not out or cands[j] > out[-1]:
            out.append(cands[j])
        k += 1
    return tuple(out)


FilterSurrogate = TUnion[ExplicitFilter, BlockBoundaryFilter, PolyaWindowFilter]


def filter_from_json(doc: dict) -> FilterSurrogate:
    kind = doc["kind"]
    if kind == "explicit":
        return ExplicitFilter(tuple(doc["indices"]))
    if kind == "block_boundaries":
        return BlockBoundaryFilter(doc["base"], doc["phase"], doc["stride"])
    if kind == "polya_windows":
        from .parse import parse_set_expr

        return PolyaWindowFilter(doc["theta"], parse_set_expr(doc["target"]), doc["extreme"])
    raise DomainError(f"unknown filter kind {kind!r}")


def even_boundaries(base: int = 2) -> BlockBoundaryFilter:
    return BlockBoundaryFilter(base, 0, 2)


def odd_boundaries(base: int = 2) -> BlockBoundaryFilter:
    return BlockBoundaryFilter(base, 1, 2)


# ---------------------------------------------------------------------------
# filter limits

def flim(
    values: TUnion[Sequence[float], Callable[[list[int]], Sequence[float]]],
    filt: FilterSurrogate,
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
    horizon: Optional[int] = None,
) -> float:
    """Numerical F-limit of x_n along the filter's indices.

    `values` is either a sequence indexed by n (x_n = values[n]) or a
    function mapping a list of indices to their values.  The last
    `max_terms` indices below the horizon are evaluated; the limit is the
    mean of the last 16 when all of them lie within `tol` of it.
    """
    if callable(values):
        evaluate = values
        cap = horizon
    else:
        seq = values
        evaluate = lambda idx: [seq[i] for i in idx]  # noqa: E731
        cap = len(seq) - 1 if horizon is None else min(horizon, len(seq) - 1)
    if cap is None:
        raise DomainError("a horizon is required when values is a function")
    idx = filt.generate(cap)[-max_terms:]
    if len(idx) < CONVERGENCE_WINDOW:
        raise NonConvergent(f"only {len(idx)} filter indices below {cap}; need {CONVERGENCE_WINDOW}")
    xs = [float(v) for v in evaluate(idx)]
    tail = xs[-CONVERGENCE_WINDOW:]
    mean = math.fsum(tail) / len(tail)
    spread = max(abs(x - mean) for x in tail)
    if spread > tol:
        raise NonConvergent(f"filter values spread {spread:.3g} > tol {tol}", spread=spread)
    return mean


def mu_alpha(expr: SetExpr, alpha: float, filt: FilterSurrogate, horizon: Optional[int] = None,
             tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """F-limit of A_alpha(n)/N_alpha(n)."""
    horizon = default_horizon(expr) if horizon is None else horizon
    return flim(lambda idx: ratios_at(expr, alpha, idx), filt, tol, max_terms, horizon)


def mu_theta(expr: SetExpr, theta: float, filt: FilterSurrogate, horizon: Optional[int] = None,
             tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """F-limit of the Polya window ratio (A(n) - A(theta n))/(n - theta n)."""
    if not 0 < theta < 1:
        raise DomainError("theta must lie in (0, 1)")
    horizon = default_horizon(expr) if horizon is None else horizon
    return flim(lambda idx: window_ratios(expr, theta, idx), filt, tol, max_terms, horizon)


# ---------------------------------------------------------------------------
# measure specs

@dataclass(frozen=True)
class AlphaAtom:
    alpha: float
    filter: FilterSurrogate

    kind = "alpha"

    @property
    def param(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class ThetaAtom:
    theta: float
    filter: FilterSurrogate

    kind = "theta"

    @property
    def param(self) -> float:
        return self.theta


@dataclass(frozen=True)
class MeasureSpec:
    """Finite convex combination of filter-limit densities."""

    atoms: tuple  # of (weight, AlphaAtom | ThetaAtom)

    def __post_init__(self):
        atoms = tuple((float(w), a) for w, a in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise DomainError("a measure needs at least one atom")
        if any(w <= 0 for w, _ in atoms):
            raise DomainError("atom weights must be positive")
        if abs(math.fsum(w for w, _ in atoms) - 1) > 1e-12:
            raise DomainError("atom weights must sum to 1")
        for _, a in atoms:
            if isinstance(a, AlphaAtom) and not -1 <= a.alpha <= ALPHA_MAX:
                raise DomainError(f"alpha {a.alpha} outside [-1, {ALPHA_MAX}]")
            if isinstance(a, ThetaAtom) and not 0 < a.theta < 1:
                raise DomainError(f"theta {a.theta} outside (0, 1)")

    @classmethod
    def single(cls, atom) -> "MeasureSpec":
        return cls(((1.0, atom),))

    def to_json(self) -> dict:
        return {"atoms": [{"w": w, "kind": a.kind, "param": a.param, "filter": a.filter.to_json()} for w, a in self.atoms]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc) -> "MeasureSpec":
        if isinstance(doc, str):
            doc = json.loads(doc)
        atoms = []
        for item in doc["atoms"]:
            make = {"alpha": AlphaAtom, "theta": ThetaAtom}.get(item["kind"])
            if make is None:
                raise DomainError(f"unknown atom kind {item['kind']!r}")
            atoms.append((item["w"], make(item["param"], filter_from_json(item["filter"]))))
        return cls(tuple(atoms))


def evaluate_atom(atom, expr: SetExpr, horizon=None, tol=DEFAULT_TOL) -> float:
    if isinstance(atom, AlphaAtom):
        return mu_alpha(expr, atom.alpha, atom.filter, horizon, tol)
    return mu_theta(expr, atom.theta, atom.filter, horizon, tol)


def evaluate_measure(spec: MeasureSpec, expr: SetExpr, horizon: Optional[int] = None, tol: float = DEFAULT_TOL) -> float:
    """sum_i w_i mu_i(expr); NonConvergent carries the index of the failing atom."""

    def one(i):
        try:
            return evaluate_atom(spec.atoms[i][1], expr, horizon, tol)
        except NonConvergent as exc:
            raise NonConvergent(f"atom {i}: {exc}", exc.spread, atom=i) from None

    vals = pmap(one, range(len(spec.atoms)))
    return math.fsum(w * v for (w, _), v in zip(spec.atoms, vals))


# ---------------------------------------------------------------------------
# checks

def first_common_element(x: SetExpr, y: SetExpr, horizon: int) -> Optional[int]:
    both = Inter(x, y)
    if count(both, horizon) == 0:
        return None
    return nth_element(both, 1)


def additivity_check(spec: MeasureSpec, pairs, horizon: Optional[int] = None, eps: float = 2e-2) -> CheckReport:
    """|mu(X u Y) - mu(X) - mu(Y)| <= eps for each disjoint pair."""
    from .setexpr import Union

    rows = []
    for x, y in pairs:
        h = default_horizon(x, y) if horizon is None else horizon
        common = first_common_element(x, y, h)
        if common is not None:
            raise NotDisjoint(f"{x} and {y} share {common}", common)
        mx, my, mxy = (evaluate_measure(spec, e, h) for e in (x, y, Union(x, y)))
        rows.append({"x": str(x), "y": str(y), "mu_x": mx, "mu_y": my, "mu_union": mxy, "defect": abs(mxy - mx - my)})
    return CheckReport("additivity", all(r["defect"] <= eps for r in rows), rows)


def extension_check(spec: MeasureSpec, exprs, horizon: Optional[int] = None, eps: float = 2e-2) -> CheckReport:
    """mu(e) = d(e) within eps for eventually periodic e."""
    rows = []
    for e in exprs:
        d = exact_density(e)
        if d is None:
            raise PreconditionFailed(f"{e} has no exactly known density")
        mu = evaluate_measure(spec, e, horizon)
        rows.append({"expr": str(e), "exact": f"{d.numerator}/{d.denominator}", "mu": mu, "error": abs(mu - float(d))})
    return CheckReport("extension", all(r["error"] <= eps for r in rows), rows)


def range_witness(expr: SetExpr, target: float, horizon: int = DEFAULT_HORIZON, theta: float = WITNESS_THETA,
                  eps: float = 2e-2) -> MeasureSpec:
    """A theta-atom mixture mu with mu(expr) = target, for target in [lld, uud].

    The two atoms follow the near-minimising and near-maximising window
    indices found by polya_bounds; the weight is solved from their values.
    """
    est = polya_bounds(expr, (theta,), horizon)
    if not est.lld_est - eps <= target <= est.uud_est + eps:
        raise OutOfRange(f"target {target} outside [{est.lld_est:.4g}, {est.uud_est:.4g}]")
    row = est.per_theta[-1]
    lo_atom = ThetaAtom(theta, ExplicitFilter(row.argmin))
    hi_atom = ThetaAtom(theta, ExplicitFilter(row.argmax))
    v_lo = evaluate_atom(lo_atom, expr, horizon)
    v_hi = evaluate_atom(hi_atom, expr, horizon)
    if v_hi - v_lo <= 1e-12:
        return MeasureSpec.single(lo_atom)
    lam = min(1.0, max(0.0, (v_hi - target) / (v_hi - v_lo)))
    if lam == 0.0:
        return MeasureSpec.single(hi_atom)
    if lam == 1.0:
        return MeasureSpec.single(lo_atom)
    return MeasureSpec(((lam, lo_atom), (1 - lam, hi_atom)))


def difference_limit(a: SetExpr, b: SetExpr, horizon: Optional[int] = None) -> tuple[float, float]:
    """Tail (min, max) of (B(n) - A(n))/n over the geometric tail checkpoints."""
    from .density import tail_checkpoints

    h = default_horizon(a, b) if horizon is None else horizon
    cps = tail_checkpoints(None, h)
    cps = sorted(set(cps) | set(critical_points(a, h // 64, h)) | set(critical_points(b, h // 64, h)))
    ra = ratios_at(a, 0, cps)
    rb = ratios_at(b, 0, cps)
    diffs = [y - x for x, y in zip(ra, rb)]
    return min(diffs), max(diffs)


def difference_limit_check(a: SetExpr, b: SetExpr, specs: Sequence[MeasureSpec], horizon: Optional[int] = None,
                           tol: float = DEFAULT_TOL, eps: float = 2e-2) -> CheckReport:
    """If (B(n) - A(n))/n -> L then mu(B) - mu(A) = L for every spec."""
    h = default_horizon(a, b) if horizon is None else horizon
    lo, hi = difference_limit(a, b, h)
    if hi - lo > tol:
        raise PreconditionFailed(f"(B(n)-A(n))/n does not settle: spread {hi - lo:.3g}")
    L = (lo + hi) / 2
    rows = []
    for i, spec in enumerate(specs):
        diff = evaluate_measure(spec, b, h) - evaluate_measure(spec, a, h)
        rows.append({"spec": i, "difference": diff, "limit": L, "error": abs(diff - L)})
    return CheckReport("difference_limit", all(r["error"] <= eps for r in rows), rows, f"L = {L:.6g}")
