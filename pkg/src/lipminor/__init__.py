"""Lipschitz minorants of sampled paths and Levy-process contact-set statistics."""

__version__ = "0.1.0"

from .path_core import (
    CadlagPath,
    ContaminationError,
    MinorantResult,
    PathError,
    RecipePreconditionError,
    StraddleInterval,
    compute_minorant,
    extract_contact_set,
    recipe_D,
    sawtooth_check,
    straddle_interval,
)
from .levy_sim import (
    CompoundPoisson,
    GaussianJumps,
    LevyModel,
    SimConfig,
    SymmetricExponentialJumps,
    SymmetricStable,
    TwoPointJumps,
    brownian_model,
    eval_mean,
    eval_psi,
    marginal_interval_prob,
    simulate_path,
)
from .brownian_oracle import BrownianParams

__all__ = [
    "__version__",
    "CadlagPath",
    "MinorantResult",
    "StraddleInterval",
    "PathError",
    "ContaminationError",
    "RecipePreconditionError",
    "compute_minorant",
    "extract_contact_set",
    "straddle_interval",
    "recipe_D",
    "sawtooth_check",
    "LevyModel",
    "SimConfig",
    "CompoundPoisson",
    "TwoPointJumps",
    "GaussianJumps",
    "SymmetricExponentialJumps",
    "SymmetricStable",
    "brownian_model",
    "simulate_path",
    "eval_mean",
    "eval_psi",
    "marginal_interval_prob",
    "BrownianParams",
]
