"""Sparse low-order random Fourier features pruned by iterative magnitude pruning."""
from .baselines import (
    BpdnProblem,
    additive_kernel_matrix,
    bpdn_solve,
    min_l2_sweep,
    naive_prune_run,
    random_prune_run,
    salsa_fit,
    srfe_s_run,
    threshold_top_s,
)
from .diagnostics import (
    coherence,
    prop1_bounds,
    spectrum_through_pruning,
    support_report,
    theorem1_components,
    verify_prop1,
)
from .errors import DataError, ParameterError, RegimeError
from .features import FeatureBank, design, sparse_bank
from .imp import ImpTrace, PrunedModel, imp_run, predict, schedule, select_model
from .sampling import make_rng, plan_subsets
from .synthetic import make_dataset

__version__ = "0.1.0"
