"""Naive Bayesian learning on directed social networks.

Agents multiply their neighbors' beliefs (normalized by a common prior) and
renormalize every round. Beliefs concentrate on the maximizers of a
likelihood weighted by eigenvector centrality, except where the hypotheses
behind that fail; this package simulates the dynamics, predicts the
consensus and checks those hypotheses.
"""

from .dynamics import (
    InitialCondition,
    Trajectory,
    check_bounded_g,
    check_nondegenerate,
    closed_form_beliefs,
    simulate,
    update_step,
)
from .exceptions import (
    AllZero,
    BBCMNotConverged,
    ConfigError,
    DegenerateUpdate,
    ModelError,
    NoConvergence,
    NonFinite,
    NotStronglyConnected,
    PrecisionWarning,
    SpaceMismatch,
    SpecOutsideCatalog,
    TailMassWarning,
    TruncationError,
)
from .feasibility import FeasibilityClass, PowerLawSpec, classify_power_law
from .graph import (
    CentralityData,
    DirectedGraph,
    PathCountMatrix,
    build_ab_graph,
    build_graph,
    complete_graph,
    cycle_graph,
    path_counts,
    perron,
    perron_projection_error,
)
from .likelihood import (
    ConsensusReport,
    GaussianConsensus,
    WeightedLikelihood,
    binary_consensus,
    estimate_consensus_variance,
    gaussian_consensus,
    poisson_consensus,
    precision_effect,
    predict_consensus,
    weighted_likelihood,
)
from .scenarios import (
    BBCMState,
    SeedingWeights,
    ab_example_ic,
    bbcm_simulate,
    catalog,
    counterexample_ic,
    extract_seeding_weights,
)
from .statespace import (
    BINARY,
    FiniteDiscrete,
    Grid,
    LogBelief,
    LogPrior,
    NormalizedBelief,
    TruncatedIntegers,
    belief_from_density,
    bernoulli_belief,
    flat_prior,
    gaussian_belief,
    normalize_against_prior,
    poisson_belief,
)

__version__ = "0.1.0"
