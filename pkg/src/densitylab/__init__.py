"""densitylab: densities, Polya densities and density measures of sets of positive integers."""

from .constructions import (
    ConstructedSet, corollary_superset, counterexample_set, difference_matching_subset, intermediate_subset,
)
from .counting import count, counting_profile, nth_element, normalizer, weighted_count
from .density import (
    DensityEstimate, estimate_alpha_density, exact_alpha_extremes, exact_density, fuchs_consistency_check,
    ggm_continuity_check, oscillation_diagnostic, rajagopal_monotonicity_check,
)
from .errors import (
    DensityLabError, DomainError, HorizonExceeded, InsufficientElements, InsufficientHorizon, NonConvergent,
    NotDisjoint, OutOfRange, ParseError, PreconditionFailed,
)
from .measures import (
    AlphaAtom, BlockBoundaryFilter, ExplicitFilter, MeasureSpec, PolyaWindowFilter, ThetaAtom, additivity_check,
    difference_limit_check, evaluate_measure, extension_check, flim, mu_alpha, mu_theta, range_witness,
)
from .parse import parse_set_expr
from .polya import PolyaEstimate, alpha_envelopes, density_set_sample, gap_density, polya_bounds
from .setexpr import (
    AP, Blocks, Compl, Diff, Empty, Finite, First, Inter, MCopy, Nat, Offset, Seeded, SetExpr, Union, contains,
    m_copy, simplify, to_text,
)

__version__ = "0.1.0"

__all__ = [
    "additivity_check",
    "alpha_envelopes",
    "AlphaAtom",
    "AP",
    "BlockBoundaryFilter",
    "Blocks",
    "Compl",
    "ConstructedSet",
    "contains",
    "corollary_superset",
    "count",
    "counterexample_set",
    "counting_profile",
    "density_set_sample",
    "DensityEstimate",
    "DensityLabError",
    "Diff",
    "difference_limit_check",
    "difference_matching_subset",
    "DomainError",
    "Empty",
    "estimate_alpha_density",
    "evaluate_measure",
    "exact_alpha_extremes",
    "exact_density",
    "ExplicitFilter",
    "extension_check",
    "Finite",
    "First",
    "flim",
    "fuchs_consistency_check",
    "gap_density",
    "ggm_continuity_check",
    "HorizonExceeded",
    "InsufficientElements",
    "InsufficientHorizon",
    "Inter",
    "intermediate_subset",
    "m_copy",
    "MCopy",
    "MeasureSpec",
    "mu_alpha",
    "mu_theta",
    "Nat",
    "NonConvergent",
    "normalizer",
    "NotDisjoint",
    "nth_element",
    "Offset",
    "oscillation_diagnostic",
    "OutOfRange",
    "parse_set_expr",
    "ParseError",
    "polya_bounds",
    "PolyaEstimate",
    "PolyaWindowFilter",
    "PreconditionFailed",
    "rajagopal_monotonicity_check",
    "range_witness",
    "Seeded",
    "SetExpr",
    "simplify",
    "ThetaAtom",
    "to_text",
    "Union",
    "weighted_count",
]
