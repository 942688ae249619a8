"""Consensus bucket orders and weighted sets of bucket orders for pair order matrices."""

from .core import (
    BucketOrder,
    WeightedEnsemble,
    aggregate,
    canonicalize,
    format_bucket_order,
    from_matrix,
    parse_bucket_order,
    to_matrix,
    validate_pair_order_matrix,
)
from .errors import (
    BudgetExceeded,
    InvalidBucketOrder,
    InvalidEnsemble,
    InvalidMatrix,
    MutationNotApplicable,
    PreflibParseError,
)
from .exact import (
    ExactResult,
    SpaceSize,
    enumerate_bucket_orders,
    exact_obop,
    exact_osbop_equal,
    fubini,
    space_size,
)
from .ingest import Profile, build_matrix, parse_preflib, read_matrix, write_matrix
from .objective import UtopiaReport, distance, fitness, round_to_grid, utopia
from .sls import (
    Mutation,
    SlsConfig,
    SlsTrace,
    initial_solution,
    mutate_order,
    mutate_solution,
    sls_osbop,
    tune_weights,
)

__version__ = "0.1.0"
