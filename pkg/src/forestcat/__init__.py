"""forestcat: finite-set combinatorics of inert/active factorization
patterns, level forests, Segal conditions, and monoidal envelopes.

Everything here is exact and finite: exhaustive checks on bounded
windows, union-find colimits, matching-family limits.
"""

__version__ = "0.1.0"

from .fincat import (  # noqa: F401
    FinCategory,
    FinSetMap,
    SetDiagram,
    colimit_set,
    is_cartesian_square,
    limit_over_cone,
    pullback_finset,
)
from .gamma import (  # noqa: F401
    GammaClass,
    PointedMap,
    classify_gamma,
    enumerate_gamma_maps,
    factorize_gamma,
    lam,
    rho,
)
from .simplex import (  # noqa: F401
    SimplexMap,
    classify_delta,
    factorize_delta,
    underlying_gamma,
)
from .forests import (  # noqa: F401
    Forest,
    ForestClass,
    ForestMap,
    classify_forest_map,
    corolla,
    corolla_count,
    edge_forest,
    enumerate_trees,
    eta,
    factorize_forest_map,
    forest_maps,
    level_tree_oracle,
    make_forest,
    underlying_gamma_forest,
    validate_forest_map,
)
from .segal import (  # noqa: F401
    OperadSpec,
    Presheaf,
    SegalReport,
    Window,
    check_level,
    check_root,
    check_segal,
    check_shrub,
    nerve_of_operad,
)
from .envelope import (  # noqa: F401
    CocartLift,
    EnvelopeValue,
    GroupedWord,
    check_envelope_segal,
    check_triangles,
    cocartesian_lift,
    env_corolla,
    envelope_slice,
    envelope_value,
    tensor_colours,
)
