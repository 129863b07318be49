"""Binary classification from sparse samples over large alphabets."""

__version__ = "0.1.0"

from .alphabet_model import (
    BiUniformSpec,
    Distribution,
    ModelClassParams,
    bi_uniform,
    check_class_membership,
    l1_distance,
    read_distribution,
    uniform,
    write_distribution,
)
from .classifiers import (
    JointCounts,
    Profile,
    classify_f,
    classify_t,
    event_A,
    event_B,
    f_statistic,
    oracle_lrt,
    profile,
    t_statistic,
)
from .exact_analysis import (
    achievability_exponent,
    chernoff_lambda_bound,
    exact_error_bruteforce,
    lemma_A_rate,
    normalization_r,
    prob_all_distinct,
    prob_all_distinct_uniform,
    prob_C_n,
    prob_event_A,
    prob_event_B_given_xy,
)
from .experiments import (
    SweepConfig,
    canonical_pair,
    conditional_false_alarm_experiment,
    consistency_boundary_sweep,
    estimate_error,
    sweep_and_fit,
)
from .sampling import (
    Histogram,
    SeedSpec,
    StreamLabel,
    inflate_alphabet,
    poissonized_histogram,
    sample_conditioned_count,
    sample_histogram,
)
