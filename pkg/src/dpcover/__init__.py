"""Exact-arithmetic toolkit for (Z/2)^3-covers of del Pezzo surfaces."""

from .picard import (
    DivClass,
    NamedCurve,
    SurfaceContext,
    canonical_class,
    h0,
    h0_oracle,
    is_nef,
    pairing,
    surface_context,
    template_class,
)
from .chargroup import Character, GroupElement, Subgroup, automorphisms, chi_value, negative_set, perp
from .cover import (
    BuildingData,
    CoverInvariants,
    DeclaredPoint,
    IncidenceSpec,
    invariants,
    nef_big_check,
    relabel,
    smoothness_check,
    validate,
)
from .canonical import (
    CanonicalReport,
    canonical_degree,
    factors_through_quotient,
    fiber_genus,
    fixed_part,
    generator_set,
    half_pullback_pairing,
)
from .resolve import (
    BlowupPlan,
    PlanPoint,
    SingularityType,
    blow_up_surface,
    classify_singularity,
    search_parity_fix,
    transform_building_data,
)
from .catalog import CatalogEntry, load_catalog, load_entry, reproduce
from .search import SearchTargets, canonical_candidate_filter, canonical_form, enumerate_covers

__version__ = "0.1.0"
