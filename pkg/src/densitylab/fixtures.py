"""Shared fixtures: measure specs, disjoint pairs, periodic sets and random Blocks sets."""
from __future__ import annotations

import numpy as np

from .measures import (
    AlphaAtom, MeasureSpec, PolyaWindowFilter, ThetaAtom, even_boundaries, odd_boundaries,
)
from .setexpr import AP, Blocks, Compl, Diff, Empty, Finite, Inter, MCopy, Nat, SetExpr, Union

COUNTEREXAMPLE = Blocks(2, 2, (0,))


def measure_specs() -> list[MeasureSpec]:
    """Five specs: two alpha-atoms, two theta-atoms and one mixture."""
    polya_max = PolyaWindowFilter(1 - 2**-6, COUNTEREXAMPLE, "max")
    return [
        MeasureSpec.single(AlphaAtom(0.0, even_boundaries())),
        MeasureSpec.single(AlphaAtom(1.0, odd_boundaries())),
        MeasureSpec.single(ThetaAtom(1 - 2**-10, even_boundaries())),
        MeasureSpec.single(ThetaAtom(1 - 2**-6, polya_max)),
        MeasureSpec((
            (0.25, AlphaAtom(2.0, even_boundaries())),
            (0.25, ThetaAtom(1 - 2**-8, odd_boundaries())),
            (0.5, AlphaAtom(0.0, odd_boundaries())),
        )),
    ]


def disjoint_pairs() -> list[tuple[SetExpr, SetExpr]]:
    b = COUNTEREXAMPLE
    return [
        (AP(0, 2), AP(1, 2)),
        (b, Blocks(2, 2, (1,))),
        (AP(0, 4), AP(2, 4)),
        (AP(0, 3), AP(1, 3)),
        (Inter(AP(0, 2), b), Diff(AP(0, 2), b)),
        (MCopy(AP(0, 2), 2), MCopy(AP(1, 2), 2)),
        (Finite((1, 2, 3)), Diff(AP(0, 5), Finite((5,)))),
        (Diff(Nat(), AP(0, 7)), AP(0, 7)),
        (Inter(AP(1, 3), Blocks(2, 2, (1,))), b),
        (Empty(), Union(AP(0, 6), b)),
    ]


def periodic_sets() -> list[SetExpr]:
    return [
        AP(0, 3),
        Diff(AP(0, 2), Finite((2, 4, 6))),
        Union(AP(0, 4), AP(1, 4)),
        Nat(),
        Empty(),
        AP(1, 5),
        MCopy(AP(0, 3), 2),
        Compl(AP(0, 6)),
        Inter(AP(0, 2), AP(0, 3)),
        Finite((1, 5, 9)),
    ]


def random_blocks(count: int, seed: int = 2024, max_period_span: int = 64) -> list[Blocks]:
    """Random Blocks(b, p, on) with b^p <= max_period_span and `on` a proper nonempty subset.

    The span bound keeps one full period inside the tail window [H/64, H].
    """
    rng = np.random.default_rng(seed)
    shapes = [(b, p) for b in range(2, 9) for p in range(2, 7) if b**p <= max_period_span]
    out = []
    while len(out) < count:
        b, p = shapes[rng.integers(len(shapes))]
        on = tuple(int(j) for j in np.flatnonzero(rng.random(p) < 0.5))
        if 0 < len(on) < p:
            out.append(Blocks(b, p, on))
    return out
