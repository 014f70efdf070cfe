"""Branching-time active inference with exact Bayesian filtering."""

from ._accel import BACKEND
from .agent import (
    AgentModel,
    CycleRecord,
    TrialResult,
    perceive_initial,
    plan,
    run_trial,
    transition_root,
)
from .categorical import (
    ambiguity,
    bayes_update,
    expected_free_energy,
    kl_divergence,
    normalize,
    predict_observation,
    predict_state,
)
from .env import DeepRewardConfig, DeepRewardEnv, EnvState, build_model, state_index
from .errors import (
    BTAIError,
    ConfigError,
    ContractViolationError,
    ImpossibleEvidenceError,
    InfiniteDivergenceError,
    PlanningError,
)
from .tree import (
    PlannerConfig,
    PlanningTree,
    TreeNode,
    average_cost,
    backpropagate,
    best_action,
    expand_children,
    select_node,
    to_dot,
    uct_score,
)

__all__ = [
    "BACKEND",
    "AgentModel",
    "BTAIError",
    "ConfigError",
    "ContractViolationError",
    "CycleRecord",
    "DeepRewardConfig",
    "DeepRewardEnv",
    "EnvState",
    "ImpossibleEvidenceError",
    "InfiniteDivergenceError",
    "PlannerConfig",
    "PlanningError",
    "PlanningTree",
    "TreeNode",
    "TrialResult",
    "ambiguity",
    "average_cost",
    "backpropagate",
    "bayes_update",
    "best_action",
    "build_model",
    "expand_children",
    "expected_free_energy",
    "kl_divergence",
    "normalize",
    "perceive_initial",
    "plan",
    "predict_observation",
    "predict_state",
    "run_trial",
    "select_node",
    "state_index",
    "to_dot",
    "transition_root",
    "uct_score",
]
