"""The full invariant suite run by ``densitylab verify``."""
from __future__ import annotations

import time

import numpy as np

from .constructions import corollary_superset, difference_matching_subset, intermediate_subset
from .counting import count
from .density import (
    estimate_alpha_density, exact_alpha_extremes, exact_density, fuchs_consistency_check,
    ggm_continuity_check, oscillation_diagnostic, rajagopal_monotonicity_check,
)
from .fixtures import COUNTEREXAMPLE, disjoint_pairs, measure_specs, periodic_sets, random_blocks
from .measures import (
    MeasureSpec, additivity_check, evaluate_measure, extension_check, mu_alpha, odd_boundaries,
    range_witness,
)
from .parse import parse_set_expr
from .polya import alpha_envelopes, density_set_line_check, density_set_sample, gap_density, polya_bounds
from .report import CheckReport
from .setexpr import AP, Blocks, Compl, Diff, Finite, MCopy, Union, to_text

LOG_HORIZON = 1 << 256
H22 = 1 << 22


def _report(name, rows, key="ok", detail=""):
    return CheckReport(name, all(r[key] for r in rows), rows, detail)


def check_closed_forms():
    rows = []
    for a in (0, 0.5, 1, 2):
        q = 2.0 ** (a + 1)
        lo, hi = exact_alpha_extremes(COUNTEREXAMPLE, a)
        err = max(abs(lo - 1 / (q + 1)) * (q + 1), abs(hi - q / (q + 1)) * (q + 1) / q)
        rows.append({"alpha": a, "lower": lo, "upper": hi, "rel_error": err, "ok": err <= 1e-12})
    return _report("closed_forms", rows)


def check_numerical_agreement():
    rows = []
    for a in (0, 1):
        est = estimate_alpha_density(COUNTEREXAMPLE, a, H22)
        lo, hi = exact_alpha_extremes(COUNTEREXAMPLE, a)
        err = max(abs(est.liminf_est - lo), abs(est.limsup_est - hi))
        rows.append({"alpha": a, "liminf": est.liminf_est, "limsup": est.limsup_est, "error": err, "ok": err <= 1e-2})
    return _report("numerical_agreement", rows)


def check_log_density():
    est = estimate_alpha_density(COUNTEREXAMPLE, -1, LOG_HORIZON)
    ok = est.exists and abs(est.value - 0.5) <= 1e-2
    row = {"liminf": est.liminf_est, "limsup": est.limsup_est, "value": est.value, "ok": ok}
    return _report("log_density", [row], detail="horizon 2^256")


def check_polya_counterexample():
    est = polya_bounds(COUNTEREXAMPLE, (1 - 2**-10,), H22)
    return _report("polya_bounds", [{"lld": est.lld_est, "uud": est.uud_est,
                                     "ok": est.lld_est <= 0.02 and est.uud_est >= 0.98}])


def check_gap_density():
    rows = []
    for e, target in ((COUNTEREXAMPLE, 2.0), (AP(0, 5), 1.0)):
        g = gap_density(e, H22)
        rows.append({"expr": to_text(e), "gap": g, "ok": abs(g - target) <= 1e-3})
    return _report("gap_density", rows)


def check_alpha_measure_above_ud():
    mu = mu_alpha(COUNTEREXAMPLE, 1, odd_boundaries())
    ud = estimate_alpha_density(COUNTEREXAMPLE, 0, H22).limsup_est
    ok = abs(mu - 0.8) <= 0.02 and mu > 2 / 3 + 0.02 and mu > ud
    return _report("alpha_measure_above_ud", [{"mu": mu, "ud_est": ud, "ok": ok}])


def check_range_witness():
    rows = []
    for x in (0.1, 0.5, 0.9):
        spec = range_witness(COUNTEREXAMPLE, x)
        v = evaluate_measure(MeasureSpec.from_json(spec.dumps()), COUNTEREXAMPLE)
        rows.append({"target": x, "value": v, "ok": abs(v - x) <= 0.02})
    return _report("range_witness", rows)


def check_intermediate_subset():
    t0 = time.perf_counter()
    d = intermediate_subset(AP(0, 3), AP(0, 2), 10**6)
    elapsed = time.perf_counter() - t0
    p = d.parts
    inc = bool(np.all(~p["C"] | d.mask) and np.all(~d.mask | (p["C"] | p["B'"])))
    dom = bool(np.all(np.cumsum(p["D'"]) <= np.cumsum(p["A'"])))
    err = abs(d.count(10**6) / 10**6 - 1 / 3)
    return _report("intermediate_subset", [{"inclusions": inc, "dominated": dom, "error": err, "seconds": elapsed,
                                            "ok": inc and dom and err <= 0.02}])


def check_constructions():
    rows = []
    d = difference_matching_subset(AP(0, 4), AP(0, 2), 10**6)
    n = np.arange(500_000, 10**6 + 1)
    a = n // 4
    dev = float(np.max(np.abs(d.prefix[n] - a) / n))
    rows.append({"name": "difference_matching", "deviation": dev, "ok": dev <= 0.02})
    s = corollary_superset(AP(0, 4), AP(0, 2), 10**6)
    ks = np.arange(10**6 + 1)
    a_mask = (ks % 4 == 0) & (ks > 0)
    ab_mask = (ks % 2 == 0) & (ks > 0)
    inc = bool(np.all(~a_mask | s.mask) and np.all(~s.mask | ab_mask))
    err = abs(s.count(10**6) / 10**6 - 0.5)
    rows.append({"name": "corollary_superset", "inclusions": inc, "error": err, "ok": inc and err <= 0.02})
    return _report("constructions", rows)


def check_measure_axioms():
    rows = []
    for i, spec in enumerate(measure_specs()):
        add = additivity_check(spec, disjoint_pairs(), eps=2e-2)
        ext = extension_check(spec, periodic_sets(), eps=2e-2)
        rows.append({"spec": i, "additivity": add.passed, "extension": ext.passed, "ok": add.passed and ext.passed})
    return _report("measure_axioms", rows)


def _mono_horizon(alpha):
    return LOG_HORIZON if alpha == -1 else H22


def check_rajagopal():
    grid = (-1, 0, 1, 2, 4)
    rows = []
    for e in random_blocks(20):
        for a, b in zip(grid, grid[1:]):
            r = rajagopal_monotonicity_check(e, a, b, _mono_horizon(a))
            rows.append({"expr": to_text(e), "alpha": a, "beta": b, "ok": r.passed})
    return _report("alpha_monotone_chain", rows)


def check_ggm():
    rows = []
    for a, d in ((0, 0.1), (1, 0.5)):
        r = ggm_continuity_check(COUNTEREXAMPLE, a, d, H22)
        rows.append({"alpha": a, "delta": d, "rows": r.rows, "ok": r.passed})
    return _report("alpha_continuity", rows)


def check_complement_duality():
    rows = []
    for e in [COUNTEREXAMPLE, Union(AP(0, 4), COUNTEREXAMPLE), Blocks(3, 2, (0,)), AP(1, 3)]:
        p, q = polya_bounds(e), polya_bounds(Compl(e))
        a, b = estimate_alpha_density(e, 1), estimate_alpha_density(Compl(e), 1)
        gap = max(abs(p.uud_est - (1 - q.lld_est)), abs(a.limsup_est - (1 - b.liminf_est)))
        rows.append({"expr": to_text(e), "defect": gap, "ok": gap <= 2e-2})
    return _report("complement_duality", rows)


def check_density_set():
    pts = density_set_sample(COUNTEREXAMPLE, 50, 1 << 20, seed=7)
    lam = gap_density(COUNTEREXAMPLE, H22)
    return density_set_line_check(pts, lam, 0.05)


def check_oscillation():
    v = oscillation_diagnostic(COUNTEREXAMPLE, 1, 1 << 20)
    return _report("oscillation", [{"max_step": v, "ok": v <= 1e-3}])


def check_fuchs():
    rows = []
    for e in [AP(0, 2), AP(1, 3), Union(AP(0, 4), AP(1, 4)), MCopy(AP(0, 3), 2), Diff(AP(0, 2), Finite((2, 4, 6)))]:
        r = fuchs_consistency_check(e, (-0.5, 0, 1, 2))
        rows.append({"expr": to_text(e), "ok": r.passed})
    return _report("alpha_consistency", rows)


def check_extreme_shape():
    rows = []
    alphas = np.linspace(-0.9, 8, 25)
    for e in [COUNTEREXAMPLE, Blocks(3, 2, (0,)), Blocks(2, 3, (0, 2))]:
        vals = [exact_alpha_extremes(e, a) for a in alphas]
        lo = [v[0] for v in vals]
        hi = [v[1] for v in vals]
        ok = all(x >= y - 1e-12 for x, y in zip(lo, lo[1:])) and all(x <= y + 1e-12 for x, y in zip(hi, hi[1:]))
        if e == COUNTEREXAMPLE:
            ok = ok and all(abs(a + b - 1) <= 1e-12 for a, b in vals)
        rows.append({"expr": to_text(e), "ok": ok})
    return _report("closed_form_shape", rows)


def check_polya_ordering():
    rows = []
    for e in [COUNTEREXAMPLE, Blocks(3, 2, (0,)), AP(0, 2), Union(AP(0, 4), COUNTEREXAMPLE)]:
        p = polya_bounds(e)
        d = estimate_alpha_density(e, 0)
        lda, uda = alpha_envelopes(e, (0, 1, 2, 4, 8))
        tol = 1e-2
        ok = p.lld_est <= d.liminf_est + 2 * tol and d.limsup_est <= p.uud_est + 2 * tol
        ok = ok and p.lld_est <= lda + 3 * tol and lda <= uda and uda <= p.uud_est + 3 * tol
        rows.append({"expr": to_text(e), "lld": p.lld_est, "lda_inf": lda, "uda_inf": uda, "uud": p.uud_est, "ok": ok})
    for e in [AP(0, 2), Union(AP(0, 4), AP(1, 4))]:
        p = polya_bounds(e)
        d = float(exact_density(e))
        rows.append({"expr": to_text(e), "lld": p.lld_est, "uud": p.uud_est,
                     "ok": abs(p.lld_est - d) <= 2e-2 and abs(p.uud_est - d) <= 2e-2})
    return _report("polya_ordering", rows)


def check_gap_invariance():
    rows = []
    for e in [AP(0, 3), COUNTEREXAMPLE, Blocks(3, 2, (1,))]:
        g1 = gap_density(e, 1 << 20)
        g2 = gap_density(Diff(e, Finite((2, 3, 5, 6, 9))), 1 << 20)
        rows.append({"expr": to_text(e), "gap": g1, "ok": g1 == g2})
    return _report("gap_invariance", rows)


def check_measure_properties():
    rows = []
    b = COUNTEREXAMPLE
    for i, spec in enumerate(measure_specs()):
        nat = evaluate_measure(spec, parse_set_expr("nat"))
        sub, sup = evaluate_measure(spec, Union(AP(0, 4), b)), evaluate_measure(spec, Union(AP(0, 2), b))
        rows.append({"spec": i, "check": "nat_and_monotone", "ok": nat == 1.0 and sub <= sup + 2e-2})
    for a in (0.0, 1.0, 2.0):
        lo, hi = exact_alpha_extremes(b, a)
        for filt in (odd_boundaries(),):
            mu = mu_alpha(b, a, filt)
            rows.append({"alpha": a, "check": "sandwich", "ok": lo - 1e-2 <= mu <= hi + 1e-2})
    # a first-rule 2-copy has count A(n) at 2n + 2, so the filter {4^k} maps to {2*4^k + 2}
    from .measures import BlockBoundaryFilter, ExplicitFilter

    base = BlockBoundaryFilter(4, 0, 1).generate(1 << 120)
    for e in [COUNTEREXAMPLE, AP(1, 3)]:
        mu_a = mu_alpha(e, 0, ExplicitFilter(tuple(base)))
        mu_c = mu_alpha(MCopy(e, 2), 0, ExplicitFilter(tuple(2 * n + 2 for n in base)))
        rows.append({"expr": to_text(e), "check": "mcopy_scaling", "ok": abs(mu_a - 2 * mu_c) <= 2e-2})
    return _report("measure_properties", rows)


def check_parse_roundtrip():
    rows = []
    texts = ["blocks(2,2,on=[0])", "union(ap(0,4),compl(nat))", "mcopy(diff(ap(1,3),finite{4,7}),3,seed:17)",
             "inter(blocks(3,2,on=[1]),mcopy(nat,2,offset:2))"]
    for t in texts:
        e = parse_set_expr(t)
        rows.append({"text": t, "ok": parse_set_expr(to_text(e)) == e and to_text(e) == t})
    return _report("parse_roundtrip", rows)


def check_counterexample_counts():
    b = COUNTEREXAMPLE
    ok = count(b, 8) == 5 and all(count(b, n) + count(Compl(b), n) == n for n in (1, 8, 100, 12345))
    return _report("counterexample_counts", [{"count_8": count(b, 8), "ok": ok}])


ACCEPTANCE = [
    ("1", check_closed_forms), ("2", check_numerical_agreement), ("3", check_log_density),
    ("4", check_polya_counterexample), ("5", check_gap_density), ("6", check_alpha_measure_above_ud),
    ("7", check_range_witness), ("8", check_intermediate_subset), ("9", check_measure_axioms),
    ("10", check_rajagopal), ("10", check_ggm), ("10", check_complement_duality), ("10", check_density_set),
    ("10", check_oscillation),
]

INVARIANTS = [
    check_fuchs, check_extreme_shape, check_polya_ordering, check_gap_invariance, check_measure_properties,
    check_constructions, check_parse_roundtrip, check_counterexample_counts,
]


def run_suite(progress=None) -> list[tuple[str, CheckReport, float]]:
    """Run every check; returns (label, report, seconds) in a fixed order."""
    out = []
    jobs = [(f"criterion {c}", f) for c, f in ACCEPTANCE] + [("invariant", f) for f in INVARIANTS]
    for label, fn in jobs:
        t0 = time.perf_counter()
        try:
            rep = fn()
        except Exception as exc:  # a crashing check is a failing check
            rep = CheckReport(fn.__name__.removeprefix("check_"), False, [], f"{type(exc).__name__}: {exc}")
        out.append((label, rep, time.perf_counter() - t0))
        if progress is not None:
            progress(label, rep)
    return out


def format_table(results) -> str:
    width = max(len(r.name) for _, r, _ in results)
    lines = [f"{'check':<{width}}  {'group':<12}  result"]
    for label, rep, _ in results:
        lines.append(f"{rep.name:<{width}}  {label:<12}  {'PASS' if rep.passed else 'FAIL'}"
                     + (f"  {rep.detail}" if rep.detail and not rep.passed else ""))
    return "\n".join(lines)
