"""Group-based feature-model configuration engine.

Parses feature models, reasons about consistency with a built-in SAT
solver, predicts and fairly aggregates stakeholder preferences, recommends
the next constraint to visit, diagnoses and repairs conflicting group
decisions, and drives a negotiation workflow — as a library, HTTP service
and CLI.
"""

from .analysis import ModelSat, enumerate_configurations, is_consistent
from .cnf import CnfFormula, to_cnf
from .diagnosis import (
    ConflictSet,
    Diagnosis,
    DiagnosisReport,
    apply_diagnosis,
    enumerate_diagnoses,
    quickxplain,
    rank_diagnoses,
)
from .errors import FmgcError
from .evaluation import EvalResult, eval_loo
from .grouprec import (
    AggregationStrategy,
    NextConstraintRecommendation,
    TieBreak,
    aggregate_preferences,
    predict_constraint_order,
    predict_feature_preference,
    predict_rating,
    recommend_next_constraint,
    similarity,
)
from .model import (
    Constraint,
    Decision,
    FeatureModel,
    Pref,
    constraint_importance,
    parse_expr,
    parse_model,
    serialize_model,
)
from .negotiation import (
    AddConstraintChange,
    AddFeatureChange,
    NegotiationPattern,
    Proposal,
    SetPreferenceChange,
    accept,
    detect_conflicts,
    generate_patterns,
    propose,
    reconfigure,
    step,
)
from .preferences import (
    ConflictRecord,
    EffectivePref,
    InteractionMatrix,
    ItemKind,
    Session,
    SessionPhase,
    effective_preferences,
    load_interactions,
    set_preference,
)
from .sat import solve

__version__ = "0.1.0"

__all__ = [
    "AggregationStrategy",
    "AddConstraintChange",
    "AddFeatureChange",
    "CnfFormula",
    "ConflictRecord",
    "ConflictSet",
    "Constraint",
    "Decision",
    "Diagnosis",
    "DiagnosisReport",
    "EffectivePref",
    "EvalResult",
    "FeatureModel",
    "FmgcError",
    "InteractionMatrix",
    "ItemKind",
    "ModelSat",
    "NegotiationPattern",
    "NextConstraintRecommendation",
    "Pref",
    "Proposal",
    "Session",
    "SessionPhase",
    "SetPreferenceChange",
    "TieBreak",
    "accept",
    "aggregate_preferences",
    "apply_diagnosis",
    "constraint_importance",
    "detect_conflicts",
    "effective_preferences",
    "enumerate_configurations",
    "enumerate_diagnoses",
    "eval_loo",
    "generate_patterns",
    "is_consistent",
    "load_interactions",
    "parse_expr",
    "parse_model",
    "predict_constraint_order",
    "predict_feature_preference",
    "predict_rating",
    "propose",
    "quickxplain",
    "rank_diagnoses",
    "recommend_next_constraint",
    "reconfigure",
    "serialize_model",
    "set_preference",
    "similarity",
    "solve",
    "step",
    "to_cnf",
]
