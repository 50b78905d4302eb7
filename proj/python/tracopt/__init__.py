"""Parameter-free meta-optimizer for lifelong learning.

Thin python surface over the C++ core: the erfi decision rule, the
discounted tuner, the meta-optimizer and its baselines, the shifting
CartPole PPO bench, and the online-convex-optimization suite.
"""

from tracopt._core import (
    Adam,
    CartPole,
    DiscountedTuner,
    L2Init,
    MlpSpec,
    Optimizer,
    QuadraticLossSeq,
    Sgd,
    SimplifiedTrac,
    Trac,
    best_fixed_comparator,
    default_config_json,
    erfi,
    erfi_norm,
    init_params,
    lifelong_train,
    mlp_backward,
    mlp_forward,
    run_experiment_json,
    run_oco,
    simplified_equivalence_report,
    softmax,
)

__all__ = [
    "Adam",
    "CartPole",
    "DiscountedTuner",
    "L2Init",
    "MlpSpec",
    "Optimizer",
    "QuadraticLossSeq",
    "Sgd",
    "SimplifiedTrac",
    "Trac",
    "best_fixed_comparator",
    "default_config_json",
    "erfi",
    "erfi_norm",
    "init_params",
    "lifelong_train",
    "mlp_backward",
    "mlp_forward",
    "run_experiment_json",
    "run_oco",
    "simplified_equivalence_report",
    "softmax",
]
