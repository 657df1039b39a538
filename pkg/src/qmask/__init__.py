"""Rate-leakage regions for quantum state-dependent channels with state masking."""

from .errors import (
    DimensionError,
    InfeasibleBudgetError,
    InvalidStateError,
    QMaskError,
    RegisterError,
    SizeLimitError,
    SpecError,
)
from .qstate import (
    DensityOperator,
    HybridState,
    Povm,
    Register,
    conditional_entropy,
    entropy_of,
    mutual_information,
    partial_trace,
    purify,
    shannon_entropy,
    validate,
    von_neumann_entropy,
)
from .channels import (
    MeasurementChannel,
    RandomParameterChannel,
    StateDependentChannel,
    StateSource,
    apply,
    lift_random_parameter,
    parse_channel_spec,
    product_channel,
    validate_channel,
)
from .region import (
    RateLeakagePoint,
    Strategy,
    evaluate_strategy,
    induced_joint_state,
    multiletter_point,
    trivial_leakage_threshold,
)
from .optimize import OptimizerOptions, optimize_rate, region_boundary

__version__ = "0.1.0"

__all__ = [
    "apply",
    "conditional_entropy",
    "DensityOperator",
    "DimensionError",
    "entropy_of",
    "evaluate_strategy",
    "HybridState",
    "induced_joint_state",
    "InfeasibleBudgetError",
    "InvalidStateError",
    "lift_random_parameter",
    "MeasurementChannel",
    "multiletter_point",
    "mutual_information",
    "optimize_rate",
    "OptimizerOptions",
    "parse_channel_spec",
    "partial_trace",
    "Povm",
    "product_channel",
    "purify",
    "QMaskError",
    "RandomParameterChannel",
    "RateLeakagePoint",
    "region_boundary",
    "Register",
    "RegisterError",
    "shannon_entropy",
    "SizeLimitError",
    "SpecError",
    "StateDependentChannel",
    "StateSource",
    "Strategy",
    "trivial_leakage_threshold",
    "validate",
    "validate_channel",
    "von_neumann_entropy",
]
