"""Diffusion bridges by truncated chaos expansion.

Library layout:
  indices      multi-index sets and the published enumeration
  basis        orthonormal sine basis of L^2(0, T)
  chaos        Hermite functionals and reproducible Gaussian draws
  models       the four SDE models and their coefficient closures
  propagator   deterministic integration of the coefficient ODE system
  bridge       bridge coefficients and pinned path sampling
  baselines    exact OU, Doob h-transform, and coupling reference samplers
  stats        two-sample KS test, QQ quantiles, marginals
  experiments  experiment configuration and the CLI-facing runners
"""

__version__ = "0.1.0"

from .basis import SineBasis
from .bridge import (
    BridgeCoefficients,
    BridgePath,
    BridgeSpec,
    bridge_coefficients,
    sample_bridge,
    sample_bridge_batch,
    transform_to_bridge,
    truncated_solution,
    truncated_solution_batch,
)
from .baselines import (
    BladtSorensenResult,
    DoobResult,
    RejectionExhaustedError,
    bladt_sorensen_acceptance_rate,
    bladt_sorensen_bridge_batch,
    doob_h_bridge_batch,
    exact_ou_bridge_batch,
    exact_ou_bridge_moments,
)
from .chaos import ChaosDraw, eval_xi, eval_xi_batch, hermite, lane_seed, sample_chi
from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_benchmark,
    run_min_l,
    run_simulate,
    run_validate,
)
from .indices import IndexSet, MultiIndex, enumerate_full, enumerate_table_a
from .models import (
    GeometricBrownianMotion,
    LogisticSde,
    OrnsteinUhlenbeck,
    ProteinKinetics,
    make_model,
)
from .propagator import (
    DivergenceError,
    PropagatorSolution,
    TimeGrid,
    solve_propagator,
    wce_error_bound,
)
from .stats import KsResult, SampleSet, ks_two_sample, marginal_at, qq_pairs

__all__ = [name for name in dir() if not name.startswith("_")]
