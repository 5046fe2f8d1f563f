"""Distributional comparison of hard, rough, fuzzy, possibilistic and evidential clusterings."""

from .distributional import (
    DEFAULT_BUDGET,
    ExpectationSummary,
    IntervalSummary,
    RCDistribution,
    ValueDistribution,
    ValueSet,
    ValueSetMass,
    compatible_hcs,
    distribution_over_rcs,
    distributional_evidential,
    distributional_fuzzy,
    distributional_possibilistic,
    distributional_rough,
    evidential_expectations,
    expectation_summary,
    fuzzy_rand_expectation_fast,
    interval_summary,
    possibilistic_rc_distribution,
    rough_interval,
    total_compatibility,
)
from .errors import BudgetExceeded, SoftCompareError, ValidationError
from .io import EvaluationReport, load_dataset, load_iris, read_clustering, write_clustering
from .metrics import (
    PARTITION,
    RAND,
    AxiomReport,
    check_axioms,
    hausdorff,
    mutual_information,
    partition_distance,
    rand_evidential,
    rand_index,
)
from .model import (
    Frame,
    HardClustering,
    MassFunction,
    RoughClustering,
    SCKind,
    SoftClustering,
    classify,
    validate_soft_clustering,
)
from .sampling import ApproxResult, SamplePlan, approximate, required_samples

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
