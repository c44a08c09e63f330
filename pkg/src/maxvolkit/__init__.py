"""Maximal-volume row selection and its applications.

Square ``maxvol`` and rectangular ``rect_maxvol`` submatrix search, the
pseudo-skeleton (CUR) approximation built on them, and three applications:
locating large entries of low-rank matrices, preconditioning overdetermined
least squares, and choosing representative users/items from ratings.
"""

__version__ = "0.1.0"

from .errors import (
    CombinatorialLimit,
    DimensionError,
    EmptyDataset,
    InvalidBounds,
    IterationLimit,
    MaxvolError,
    ParseError,
    RankDeficient,
)
from .matrix_core import (
    LowRankFactors,
    as_matrix,
    brute_force_best_rows,
    is_dominant_2vol,
    least_squares_min_norm,
    lemma1_sides,
    log_vol2,
    lu_top_rows,
    spectral_norm,
    svd,
    vol2,
)
from .maxvol import SelectionResult, maxvol
from .rect_maxvol import rect_maxvol
from .skeleton import (
    SkeletonApprox,
    build_pseudo_skeleton,
    find_max_element,
    select_skeleton,
)
from .precond import (
    AugmentedSystem,
    build_augmented,
    compare_methods,
    cond_formula,
    solve_via_augmented,
)
from .recsys import (
    RatingsDataset,
    coverage,
    diversity,
    load_ratings,
    precision_at_n,
    representatives,
)
