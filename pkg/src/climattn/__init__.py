"""Ancestral climate variability, costly attention, and synthetic verification."""

__version__ = "0.1.0"

from .attention import (
    AttentionSolution,
    BracketError,
    CostSpec,
    CurvePoint,
    PriorScaleFamily,
    QuadratureError,
    StakesSpec,
    Thresholds,
    TroughReport,
    attention_curve,
    brute_force_attention,
    expected_stakes,
    find_thresholds,
    gaussian_mutual_information,
    optimal_attention,
    solve,
    verify_single_trough,
)
from .econometrics import (
    FitResult,
    MarginsCurve,
    RegressionSpec,
    UShapeReport,
    cluster_vcov,
    margins,
    normalized_margins,
    ols,
    quadratic_fit,
    u_shape_test,
    within_transform,
)
from .folklore import (
    FolkloreScore,
    MotifCatalog,
    TermDictionary,
    classify_motif,
    read_catalog,
    score_catalog,
    score_group,
    seed_dictionary,
    tokenize,
    write_scores,
)
from .simulate import (
    CohortConfig,
    GroupSpec,
    SyntheticDataset,
    build_dataset,
    default_groups,
    group_seed,
    simulate_climate,
    simulate_folklore,
    simulate_response,
    snap_response,
    transmit_prior,
)
from .utils import SchemaError
from .variability import (
    AncestralVariability,
    GenerationVariability,
    Measure,
    TemperatureSeries,
    VariabilityConfig,
    attach_to_groups,
    average_variability,
    deviation_intensity,
    empirical_quantile,
    generation_variability,
    partition_generations,
    read_anomalies,
    read_link_table,
    write_index,
)
