"""Evaluate a handful of density measures on the block set and show that they disagree.

Each measure agrees with asymptotic density on periodic sets, yet the
block set gets values spread over [lld, uud] = [0, 1].
"""
from densitylab.density import exact_alpha_extremes
from densitylab.fixtures import COUNTEREXAMPLE, measure_specs
from densitylab.measures import AlphaAtom, MeasureSpec, evaluate_measure, odd_boundaries, range_witness
from densitylab.setexpr import AP, to_text


def main():
    a = COUNTEREXAMPLE
    ld, ud = exact_alpha_extremes(a, 0)
    print(f"set {to_text(a)}: ld = {ld:.4f}, ud = {ud:.4f}")
    for i, spec in enumerate(measure_specs()):
        print(f"spec {i}: mu(A) = {evaluate_measure(spec, a):.4f}, mu(ap(0,3)) = {evaluate_measure(spec, AP(0, 3)):.4f}")

    mu = evaluate_measure(MeasureSpec.single(AlphaAtom(1.0, odd_boundaries())), a)
    print(f"alpha = 1 along odd boundaries: {mu:.4f} > ud = {ud:.4f}")

    for x in (0.05, 0.5, 0.95):
        spec = range_witness(a, x)
        print(f"witness for {x}: {evaluate_measure(spec, a):.4f} from {len(spec.atoms)} theta-atom(s)")


if __name__ == "__main__":
    main()
