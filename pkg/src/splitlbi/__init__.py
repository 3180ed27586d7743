"""Split Linearized Bregman Iteration.

Sparse regularization paths for parameters that are sparse under a linear
transform: the discrete damped iteration, its exact event-driven limit path,
model-selection condition diagnostics, early-stopping estimators, design
builders, and a seeded simulation harness.
"""

from . import conditions, designs, estimators, iss, lbi, linalg, metrics, model
from .errors import SplitLbiError
from .iss import IssPath, IssSegment, sample_path, solve_path
from .lbi import Path, PathPoint, run, run_lbiss_reference, run_rho_form, shrink, step
from .linalg import (
    CompactSvd,
    SpectralBounds,
    compact_svd,
    projection_onto_kernel,
    pseudoinverse,
    spectral_bounds,
)
from .metrics import (
    EntryTimes,
    SimulationSpec,
    auc_support,
    entry_times,
    replicate_harness,
)
from .model import Hyperparams, Problem, Truth, a_and_sigma, default_step_size
from .model import grad as loss_grad
from .model import hessian, loss

__version__ = "0.1.0"

__all__ = [
    "CompactSvd",
    "EntryTimes",
    "Hyperparams",
    "IssPath",
    "IssSegment",
    "Path",
    "PathPoint",
    "Problem",
    "SimulationSpec",
    "SpectralBounds",
    "SplitLbiError",
    "Truth",
    "a_and_sigma",
    "auc_support",
    "compact_svd",
    "conditions",
    "default_step_size",
    "designs",
    "entry_times",
    "estimators",
    "hessian",
    "iss",
    "lbi",
    "linalg",
    "loss",
    "loss_grad",
    "metrics",
    "model",
    "projection_onto_kernel",
    "pseudoinverse",
    "replicate_harness",
    "run",
    "run_lbiss_reference",
    "run_rho_form",
    "sample_path",
    "shrink",
    "solve_path",
    "spectral_bounds",
    "step",
]
