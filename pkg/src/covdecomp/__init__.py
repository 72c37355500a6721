"""Decompose a covariance matrix into a sparse Markov part and a sparse residual.

``Sigma = inv(J_M) + Sigma_R``: ``J_M`` is a sparse precision matrix
(Gaussian Markov model) and ``Sigma_R`` a sparse, zero-diagonal residual
covariance (independence model).
"""
from ._backend import BACKEND
from .assumptions import AssumptionReport, check_all, check_exact, hessian_submatrix, incoherence
from .inference import InfoModel, LbpTrace, exact_moments, gabp_run, lbp_compare, walk_summable
from .metrics import composite_precision, consistency, edit_distance, linf_error
from .model import (
    DecompositionEstimate,
    GroundTruthModel,
    SupportPartition,
    SupportSet,
    build_partition,
    compose,
    max_degree,
    support_off,
)
from .sampling import SampleSet, sample_covariance, sample_gaussian
from .solver import (
    KktReport,
    ScheduleConfig,
    SolverOptions,
    decompose,
    decompose_exact,
    gradient,
    kkt_residual,
    objective,
    recover_dual,
    regularization_schedule,
    solve_primal,
)
from .synth import SynthConfig, gen_model, grid_graph

__version__ = "0.1.0"
