"""Identify degree-bounded, strongly separable and generalized-FVS Gaussian graphical models."""

from .cioracle import (
    CiDecision,
    CiOracle,
    ScatterData,
    cached,
    default_alpha,
    empirical_oracle,
    exact_oracle,
    sample_cond_cov,
)
from .covlinalg import cond_cov, invert_pd, schur_complement, submatrix
from .graphcore import Graph
from .identify import (
    FvsReport,
    IdentificationReport,
    PairStatus,
    identify_degree_bounded,
    identify_generalized_fvs,
    identify_strongly_separable,
)
from .synthmodel import GroundTruthModel, ModelSpec, build_model, sample_gaussian

__version__ = "0.1.0"
