"""Finite causal sets, operadic gluing, and algebra translation toolkit."""

from .causal_core import (
    CausalEmbedding,
    CausalSet,
    GluingResult,
    MonotoneMap,
    are_causally_disjoint,
    causal_future,
    causal_past,
    chronological_future,
    chronological_past,
    convex_hull,
    glue_pushout,
    is_antichain,
    is_causally_convex,
    is_cauchy_antichain,
    is_cauchy_embedding,
    max_antichain,
)
from .errors import (
    AdditivityRequired,
    FragmentCapExceeded,
    GluingCycle,
    InvalidComposite,
    NoLaterSurface,
    NonConvexCocone,
    NotFibrant,
    NotFiltered,
    TimeSliceRequired,
)
from .report import DEGENERATE, FAIL, PASS, SKIP, Report, ReportEntry

__version__ = "0.1.0"

__all__ = [
    "CausalSet",
    "MonotoneMap",
    "CausalEmbedding",
    "GluingResult",
    "causal_past",
    "causal_future",
    "chronological_past",
    "chronological_future",
    "convex_hull",
    "is_causally_convex",
    "is_antichain",
    "is_cauchy_antichain",
    "max_antichain",
    "is_cauchy_embedding",
    "are_causally_disjoint",
    "glue_pushout",
    "Report",
    "ReportEntry",
    "PASS",
    "FAIL",
    "DEGENERATE",
    "SKIP",
    "GluingCycle",
    "NonConvexCocone",
    "NotFibrant",
    "FragmentCapExceeded",
    "InvalidComposite",
    "NotFiltered",
    "TimeSliceRequired",
    "AdditivityRequired",
    "NoLaterSurface",
    "__version__",
]
