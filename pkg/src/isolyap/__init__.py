"""Lyapunov exponents and determinant moments for products of isotropic random matrices."""

from .ensembles import BetaI, BetaII, EnsembleSpec, FieldIndex, Gaussian, ShiftedGaussianSpec, spec_from_json
from .errors import (
    ConvergenceError,
    DivergentMomentError,
    DomainError,
    IsolyapError,
    NormalizationError,
    VarianceGateError,
)
from .exact import (
    TwoBlockGaussianSpec,
    det_distribution,
    det_moment,
    lyapunov_partial_sum_gaussian,
    lyapunov_sum,
    mu1,
)
from .montecarlo import MCEstimate, estimate_det_moment, estimate_mu1_column, estimate_spectrum

__version__ = "0.1.0"
