"""Naive Bayesian belief dynamics.

Each round, agent ``i`` multiplies the normalized beliefs ``g_j = f_j / f*``
of all its in-neighbors (itself included), multiplies by the prior and
renormalizes. Internally everything runs on ``log g`` so that the prior's
log-values never have to be subtracted from the beliefs' log-values.
"""

import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .exceptions import DegenerateUpdate, PrecisionWarning, SpaceMismatch, TailMassWarning
from .graph import DirectedGraph, path_counts, perron
from .statespace import (
    FiniteDiscrete,
    Grid,
    LogBelief,
    LogPrior,
    NormalizedBelief,
    normalize_against_prior,
)

TAIL_TOL = 1e-6
ARGMAX_REL_TOL = 1e-9
EXACT_COUNT_LIMIT = 2**512


@dataclass(frozen=True, eq=False)
class InitialCondition:
    """Graph, common prior and each agent's initial normalized belief."""

    graph: DirectedGraph
    prior: LogPrior
    normalized: Tuple[NormalizedBelief, ...]

    def __post_init__(self):
        object.__setattr__(self, "normalized", tuple(self.normalized))
        if len(self.normalized) != self.graph.n:
            raise ValueError(f"need {self.graph.n} beliefs, got {len(self.normalized)}")
        for g in self.normalized:
            if g.space != self.prior.space:
                raise SpaceMismatch("every belief must live on the prior's space")

    @classmethod
    def from_beliefs(cls, graph, prior, beliefs):
        return cls(graph, prior, tuple(normalize_against_prior(b, prior) for b in beliefs))

    @property
    def space(self):
        return self.prior.space

    @property
    def n(self):
        return self.graph.n

    @property
    def beliefs(self) -> Tuple[LogBelief, ...]:
        return tuple(g.belief(self.prior) for g in self.normalized)

    def log_g(self):
        """``(n, m)`` array of initial ``log g`` values, up to per-agent constants."""
        return np.array([g.logg for g in self.normalized])

    def permute(self, perm):
        """Relabel agents so that old agent ``perm[k]`` becomes agent ``k``."""
        return InitialCondition(self.graph.permute(perm), self.prior, tuple(self.normalized[p] for p in perm))


def _normalize_round(prior_logf, log_w, numerators, round_index):
    out = np.empty_like(numerators)
    for i, num in enumerate(numerators):
        with np.errstate(invalid="ignore"):
            total = prior_logf + num + log_w
        k = int(np.argmax(total))
        if not np.isfinite(total[k]):
            what = "vanishes" if total[k] == -np.inf else "diverges"
            raise DegenerateUpdate(
                f"normalizing integral {what} for agent {i} in round {round_index}",
                round=round_index,
                agent=i,
            )
        # re-center on the dominant point first so a huge common offset
        # cannot swallow the O(1) part of the normalizer
        shifted = num - num[k]
        out[i] = shifted - logsumexp(prior_logf + shifted + log_w)
    return out


def _canonical_sum(rows):
    """Column sums taken in sorted order.

    The result depends only on the multiset of rows, so agents whose
    neighborhoods hold the same values get bit-identical sums regardless of
    neighbor labels. Without this, rounding breaks exact symmetries that the
    dynamics then amplify by ``r`` per round.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        # overflow to inf surfaces as a divergent normalizer downstream
        return np.sort(rows, axis=0).sum(axis=0)


def _step_log_g(adjacency, prior_logf, log_w, log_g, round_index=1):
    numerators = np.array([_canonical_sum(log_g[adjacency[:, i]]) for i in range(len(log_g))])
    return _normalize_round(prior_logf, log_w, numerators, round_index)


def update_step(g: DirectedGraph, prior: LogPrior, beliefs: Sequence[LogBelief]) -> Tuple[LogBelief, ...]:
    """One round of the naive Bayesian update for every agent.

    Raises :class:`DegenerateUpdate` when some agent's product of in-neighbor
    beliefs has zero integral against the prior.
    """
    if len(beliefs) != g.n:
        raise ValueError(f"need {g.n} beliefs, got {len(beliefs)}")
    space = prior.space
    for b in beliefs:
        if b.space != space:
            raise SpaceMismatch("beliefs and prior live on different spaces")
    log_g = np.array([b.logf for b in beliefs]) - prior.logf
    new = _step_log_g(g.adjacency, prior.logf, np.log(space.weights), log_g)
    return tuple(LogBelief(space, prior.logf + row) for row in new)


def log_likelihood_values(log_g, v):
    """``sum_i v_i log g_i`` pointwise, summed exactly.

    Exact summation keeps terms like ``+X`` and ``-X`` from different agents
    cancelling cleanly even when ``X`` is huge.
    """
    log_g = np.asarray(log_g, dtype=float)
    out = np.empty(log_g.shape[1])
    for k in range(log_g.shape[1]):
        column = log_g[:, k]
        if np.any(column == -np.inf):
            out[k] = -np.inf
        else:
            out[k] = math.fsum(float(x) for x in v * column)
    return out


def argmax_set(values, rel_tol=ARGMAX_REL_TOL):
    """Indices whose value is within ``rel_tol`` (relative) of the maximum."""
    values = np.asarray(values, dtype=float)
    top = np.max(values)
    if top == -np.inf:
        return np.arange(len(values))
    return np.flatnonzero(values >= top - rel_tol * max(1.0, abs(top)))


def boundary_band(space):
    """Indices of points near the truncation edge (empty for finite spaces)."""
    if isinstance(space, FiniteDiscrete):
        return np.array([], dtype=int)
    k = max(1, math.ceil(0.01 * space.size))
    upper = np.arange(space.size - k, space.size)
    if isinstance(space, Grid):
        return np.concatenate([np.arange(k), upper])
    return upper


def _entropy(masses):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(masses > 0, masses * np.log(masses), 0.0)
    return -terms.sum(axis=-1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Beliefs for rounds ``0..T`` plus per-round diagnostics.

    ``log_f[t, i]`` is agent ``i``'s log-density in round ``t``. Diagnostics
    are ``(T+1, n)`` arrays: entropy of the per-point masses, mass on the
    maximizer set of the weighted likelihood, and mass in the truncation
    boundary band.
    """

    space: object
    log_f: np.ndarray
    entropy: np.ndarray
    mass_at_max: np.ndarray
    tail_mass: np.ndarray
    maximizers: np.ndarray
    trusted: bool = True

    @property
    def T(self):
        return len(self.log_f) - 1

    @property
    def rounds(self) -> List[Tuple[LogBelief, ...]]:
        return [self.beliefs(t) for t in range(self.T + 1)]

    def beliefs(self, t) -> Tuple[LogBelief, ...]:
        return tuple(LogBelief(self.space, row) for row in self.log_f[t])

    def masses(self, t):
        """``(n, m)`` per-point probabilities in round ``t``."""
        return np.exp(self.log_f[t]) * self.space.weights

    def diagnostics(self):
        return [
            {
                "round": t,
                "entropy": self.entropy[t].tolist(),
                "mass_at_max": self.mass_at_max[t].tolist(),
                "tail_mass": self.tail_mass[t].tolist(),
            }
            for t in range(self.T + 1)
        ]


def _trajectory(space, log_f_rounds, maximizers, tail_tol):
    log_f = np.array(log_f_rounds)
    masses = np.exp(log_f) * space.weights
    band = boundary_band(space)
    tail = masses[..., band].sum(axis=-1) if len(band) else np.zeros(masses.shape[:2])
    trusted = bool(np.all(tail <= tail_tol))
    return Trajectory(
        space=space,
        log_f=log_f,
        entropy=_entropy(masses),
        mass_at_max=masses[..., maximizers].sum(axis=-1),
        tail_mass=tail,
        maximizers=maximizers,
        trusted=trusted,
    )


def simulate(ic: InitialCondition, T: int, tail_tol: float = TAIL_TOL, centrality=None) -> Trajectory:
    """Run ``T`` rounds of updates from ``ic``.

    On :class:`DegenerateUpdate` the exception carries the partial
    trajectory. If boundary-band mass exceeds ``tail_tol`` a
    :class:`TailMassWarning` is issued and the trajectory is marked untrusted.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    report = check_nondegenerate(ic)
    if not report.nondegenerate:
        raise DegenerateUpdate("initial condition is degenerate: no state has positive belief from every agent", round=0)
    space = ic.space
    c = centrality if centrality is not None else perron(ic.graph)
    log_g = ic.log_g()
    maximizers = argmax_set(log_likelihood_values(log_g, c.v))
    log_w = np.log(space.weights)
    prior_logf = ic.prior.logf

    # round 0 gets the same renormalization as later rounds
    rounds = [prior_logf + _normalize_round(prior_logf, log_w, log_g, 0)]
    for t in range(1, T + 1):
        try:
            log_g = _step_log_g(ic.graph.adjacency, prior_logf, log_w, log_g, round_index=t)
        except DegenerateUpdate as exc:
            exc.trajectory = _trajectory(space, rounds, maximizers, tail_tol)
            raise
        rounds.append(prior_logf + log_g)
    traj = _trajectory(space, rounds, maximizers, tail_tol)
    if not traj.trusted:
        warnings.warn(
            f"boundary mass up to {traj.tail_mass.max():.3g} exceeds {tail_tol:g}; enlarge the truncated space",
            TailMassWarning,
            stacklevel=2,
        )
    return traj


def closed_form_beliefs(ic: InitialCondition, t: int) -> Tuple[LogBelief, ...]:
    """Round-``t`` beliefs straight from the path counts.

    ``log g_i(t) = sum_j P_ji(t) log g_j(0)`` up to normalization, where
    ``P_ji(t)`` is the number of length-``t`` paths from ``j`` to ``i``.
    """
    counts = path_counts(ic.graph, t)
    if counts.max_count() > EXACT_COUNT_LIMIT:
        warnings.warn(
            f"path counts exceed 2**512 at t={t}; exponents are used as floats",
            PrecisionWarning,
            stacklevel=2,
        )
    p = counts.as_float()
    log_g = ic.log_g()
    space = ic.space
    numerators = []
    for i in range(ic.n):
        sources = np.flatnonzero(p[:, i] > 0)
        numerators.append(_canonical_sum(p[sources, i][:, None] * log_g[sources]))
    out = _normalize_round(ic.prior.logf, np.log(space.weights), np.array(numerators), t)
    return tuple(LogBelief(space, ic.prior.logf + row) for row in out)


@dataclass(frozen=True)
class NondegeneracyReport:
    nondegenerate: bool
    witness: Optional[float] = None
    witness_index: Optional[int] = None

    def __bool__(self):
        return self.nondegenerate


def check_nondegenerate(ic: InitialCondition) -> NondegeneracyReport:
    """Is there a state every agent gives positive density? Returns a witness."""
    support = np.all(np.isfinite(ic.log_g()), axis=0)
    if not support.any():
        return NondegeneracyReport(False)
    k = int(np.flatnonzero(support)[0])
    return NondegeneracyReport(True, float(ic.space.points[k]), k)


@dataclass(frozen=True)
class BoundednessReport:
    """``sup g`` for one agent.

    On truncated spaces every sup is finite, so ``bounded`` comes from a
    heuristic: ``log g`` rising toward the truncation edge (least-squares
    slope over the last five points) flags the agent as likely unbounded.
    """

    agent: int
    log_sup: float
    bounded: bool
    heuristic: bool
    edge_slopes: Tuple[float, ...] = ()

    @property
    def sup(self):
        return math.exp(self.log_sup) if self.log_sup < 709 else math.inf


def _outward_slope(x, y):
    if np.any(~np.isfinite(y)):
        # zero density at the edge: no growth there
        return -np.inf
    return float(np.polyfit(x - x[0], y - y[0], 1)[0])


def check_bounded_g(ic: InitialCondition, window: int = 5) -> List[BoundednessReport]:
    space = ic.space
    points = space.points
    reports = []
    for i, g in enumerate(ic.normalized):
        values = g.values
        log_sup = float(np.max(values))
        if not space.stands_for_infinite:
            reports.append(BoundednessReport(i, log_sup, True, heuristic=False))
            continue
        edges = [(points[-window:], values[-window:])]
        if isinstance(space, Grid):
            # walk outward from the lower edge too
            edges.append((-points[:window][::-1], values[:window][::-1]))
        slopes = tuple(_outward_slope(x, y) for x, y in edges)
        scale = 1e-9 * max(1.0, float(np.max(np.abs(values[np.isfinite(values)]))))
        rising = any(s > scale for s in slopes)
        reports.append(BoundednessReport(i, log_sup, not rising, heuristic=True, edge_slopes=slopes))
    return reports
