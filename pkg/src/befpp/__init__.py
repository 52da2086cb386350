"""Bernoulli-exponential first passage percolation: samplers, exact law and Tracy-Widom tools."""
from .errors import AccuracyError, ConfigurationError, DomainError, NumericRangeError, ResourceLimitError
from .exact import ExactLawRequest, ExactLawResult, prob_height_below
from .kernels import BACKEND_NAME
from .scaling import ModelParams, scaling_constants
from .tracy_widom import F_gue, TWRequest, gue_cdf

__version__ = "0.1.0"
