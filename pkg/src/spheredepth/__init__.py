"""Non-parametric depth-based clustering of directional data.

Angular data depths (arc, cosine and chord distance depths) on the unit
hypersphere, a depth-based medoids clustering algorithm with depth-weighted
seeding and silhouette model selection, von Mises-Fisher simulation tooling,
crisp and fuzzy partition-agreement indices and sparse text-data ingestion.
"""

__version__ = "0.1.0"

from ._kernels import USING_NUMBA
from .dbmca import (
    ClusterModel,
    Partition,
    SilhouetteReport,
    assign,
    fit,
    init_medoids,
    refine,
    select_k,
    silhouette,
    spherical_kmeans,
)
from .depth import (
    AlphaRegion,
    DepthKind,
    DepthValue,
    alpha_region,
    deepest_point_index,
    depth_matrix,
    pairwise_similarity,
    sample_depth,
    sample_depths,
)
from .sphere_core import (
    SparseUnitVector,
    apply_rotation,
    chord_distance,
    cosine_distance,
    geodesic_distance,
    normalize,
    random_rotation,
    rotation_matrix,
    sparse_dot,
    unit_vector,
    unit_vectors,
)
from .validation import (
    PairCounts,
    aci,
    adjusted_rand_index,
    fuzzy_equivalence,
    membership_matrix,
    ndc,
    one_hot,
    pair_counts,
    pair_counts_brute,
    rand_index,
)
from .vmf import (
    VmfParams,
    expected_resultant_length,
    log_density,
    log_normalizing_constant,
    mean_resultant_length,
    sample,
    uniform_sphere,
)

__all__ = [
    "USING_NUMBA",
    "__version__",
    # sphere_core
    "SparseUnitVector",
    "normalize",
    "unit_vector",
    "unit_vectors",
    "cosine_distance",
    "geodesic_distance",
    "chord_distance",
    "sparse_dot",
    "random_rotation",
    "rotation_matrix",
    "apply_rotation",
    # vmf
    "VmfParams",
    "log_normalizing_constant",
    "log_density",
    "sample",
    "uniform_sphere",
    "mean_resultant_length",
    "expected_resultant_length",
    # depth
    "DepthKind",
    "DepthValue",
    "AlphaRegion",
    "sample_depth",
    "sample_depths",
    "pairwise_similarity",
    "deepest_point_index",
    "alpha_region",
    "depth_matrix",
    # dbmca
    "Partition",
    "ClusterModel",
    "SilhouetteReport",
    "init_medoids",
    "assign",
    "refine",
    "fit",
    "silhouette",
    "select_k",
    "spherical_kmeans",
    # validation
    "PairCounts",
    "pair_counts",
    "pair_counts_brute",
    "rand_index",
    "adjusted_rand_index",
    "fuzzy_equivalence",
    "membership_matrix",
    "one_hot",
    "ndc",
    "aci",
]
