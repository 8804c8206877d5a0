"""Protected accounts of sensitive directed graphs.

Nodes a consumer may not see are replaced by registered surrogates, and paths
through hidden structure are summarised by surrogate edges, so the released
graph stays as connected as the markings allow. Utility and opacity measures
score the result.
"""

__version__ = "0.1.0"

from .errors import (
    CorrespondenceError,
    FormatError,
    InfeasibleSpecError,
    SurrogateError,
    UnknownPredicateError,
    ValidationError,
)
from .graph import (
    Mark,
    NodeRecord,
    SensitiveGraph,
    SurrogateSpec,
    high_water_set,
    is_high_water_set,
    lint_markings,
    mark_of,
    null_surrogate,
)
from .lattice import PUBLIC, PrivilegeLattice, dominates
from .metrics import (
    OpacityConfig,
    edge_opacity,
    graph_opacity,
    node_utility,
    path_percentage,
    path_utility,
    utility_report,
)
from .protection import (
    GenerationConfig,
    ProtectedAccount,
    generate_hide_only,
    generate_protected_account,
    is_hw_permitted_path,
    verify_maximally_informative,
    verify_protected_account,
)

__all__ = [
    "PUBLIC",
    "CorrespondenceError",
    "FormatError",
    "GenerationConfig",
    "InfeasibleSpecError",
    "Mark",
    "NodeRecord",
    "OpacityConfig",
    "PrivilegeLattice",
    "ProtectedAccount",
    "SensitiveGraph",
    "SurrogateError",
    "SurrogateSpec",
    "UnknownPredicateError",
    "ValidationError",
    "dominates",
    "edge_opacity",
    "generate_hide_only",
    "generate_protected_account",
    "graph_opacity",
    "high_water_set",
    "is_high_water_set",
    "is_hw_permitted_path",
    "lint_markings",
    "mark_of",
    "node_utility",
    "null_surrogate",
    "path_percentage",
    "path_utility",
    "utility_report",
    "verify_maximally_informative",
    "verify_protected_account",
]
