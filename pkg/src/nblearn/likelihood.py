"""The weighted likelihood and the consensus it predicts.

``L(theta) = prod_i g_i(theta) ** v_i`` where ``v`` is eigenvector
centrality. Agents' beliefs concentrate on the maximizers of ``L`` under
hypotheses that depend on the kind of space; those hypotheses are checked
numerically and reported, never enforced.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .dynamics import ARGMAX_REL_TOL, argmax_set, boundary_band, check_bounded_g, log_likelihood_values
from .graph import CentralityData, perron
from .statespace import FiniteDiscrete, Grid

GAP_TOL = 1e-6
TIE_TOL = 1e-12
DECAY_RADIUS = 0.75


@dataclass(frozen=True, eq=False)
class WeightedLikelihood:
    space: object
    logL: np.ndarray
    centrality: CentralityData

    def maximizer_indices(self, rel_tol=ARGMAX_REL_TOL):
        return argmax_set(self.logL, rel_tol)


def weighted_likelihood(ic, c: Optional[CentralityData] = None) -> WeightedLikelihood:
    """``log L = sum_i v_i log g_i`` pointwise; ``-inf`` wherever some agent has zero density."""
    c = c if c is not None else perron(ic.graph)
    raw = log_likelihood_values(ic.log_g(), c.v)
    offset = math.fsum(vi * g.log_scale for vi, g in zip(c.v, ic.normalized))
    # identical raw values stay identical after the shift, so ties survive
    return WeightedLikelihood(ic.space, raw - offset, c)


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    detail: str = ""
    heuristic: bool = False


def _json_float(x):
    return float(x) if math.isfinite(x) else None


@dataclass(frozen=True, eq=False)
class ConsensusReport:
    maximizers: Tuple[float, ...]
    indices: Tuple[int, ...]
    gap: float
    predicted_point: Optional[float]
    conditions: Tuple[HypothesisCheck, ...] = field(default_factory=tuple)

    @property
    def hypotheses_hold(self):
        return all(c.passed for c in self.conditions)

    def condition(self, name):
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self):
        return {
            "maximizers": list(self.maximizers),
            "indices": list(self.indices),
            "gap": _json_float(self.gap),
            "predicted_point": self.predicted_point,
            "conditions": [
                {"name": c.name, "passed": c.passed, "detail": c.detail, "heuristic": c.heuristic}
                for c in self.conditions
            ],
        }

    def table(self):
        """Human-readable hypothesis-check table."""
        lines = []
        for c in self.conditions:
            tag = "PASS" if c.passed else "FAIL"
            note = c.detail + (" (heuristic)" if c.heuristic else "")
            lines.append(f"{c.name + ':':<16} {tag}  {note}")
        return "\n".join(lines)


def _gap(log_l, indices):
    top = float(np.max(log_l))
    rest = np.delete(log_l, indices)
    if len(rest) == 0:
        return 0.0
    return top - float(np.max(rest))


def _bounded_check(ic):
    reports = check_bounded_g(ic)
    flagged = [r.agent for r in reports if not r.bounded]
    detail = "log g rises toward the edge for agents " + str(flagged) if flagged else "no agent's log g rises toward the edge"
    heuristic = any(r.heuristic for r in reports)
    return HypothesisCheck("bounded g", not flagged, detail, heuristic)


def predict_consensus(L: WeightedLikelihood, ic=None, rel_tol=ARGMAX_REL_TOL) -> ConsensusReport:
    """Maximizers of ``L`` and the hypothesis checks that back them.

    * finite spaces need nothing beyond the maximizer set;
    * truncated integers need a positive gap (at least ``1e-6`` in log units,
      with the maximizers clear of the truncation edge) and bounded ``g``;
    * grids need ``L`` to stay below its maximum outside a ball of radius
      3/4 of the grid half-width, and bounded ``g``.

    Bounded-``g`` checks need ``ic``; they are skipped when it is omitted.
    """
    space = L.space
    log_l = np.asarray(L.logL)
    idx = L.maximizer_indices(rel_tol)
    points = space.points
    gap = _gap(log_l, idx)
    top = float(np.max(log_l))
    checks = []
    if isinstance(space, FiniteDiscrete):
        checks.append(HypothesisCheck("finite space", True, "no further hypotheses needed"))
    elif isinstance(space, Grid):
        center = 0.5 * (space.lo + space.hi)
        radius = DECAY_RADIUS * 0.5 * (space.hi - space.lo)
        outer = np.abs(points - center) > radius
        sup_out = float(np.max(log_l[outer])) if outer.any() else -math.inf
        margin = rel_tol * max(1.0, abs(top))
        checks.append(HypothesisCheck(
            "decay", sup_out < top - margin,
            f"sup log L beyond radius {radius:g} is {sup_out:.6g} vs max {top:.6g}",
        ))
    else:
        band = set(boundary_band(space).tolist())
        at_edge = bool(band & set(idx.tolist()))
        ok = gap >= GAP_TOL and not at_edge
        detail = f"gap {gap:.3g}" + ("; maximizers reach the truncation edge" if at_edge else "")
        checks.append(HypothesisCheck("positive gap", ok, detail))
    if ic is not None and not isinstance(space, FiniteDiscrete):
        checks.append(_bounded_check(ic))
    predicted = float(points[idx[0]]) if len(idx) == 1 else None
    return ConsensusReport(
        maximizers=tuple(float(points[k]) for k in idx),
        indices=tuple(int(k) for k in idx),
        gap=gap,
        predicted_point=predicted,
        conditions=tuple(checks),
    )


def _weights(v):
    if isinstance(v, CentralityData):
        v = v.v
    return np.asarray(v, dtype=float)


@dataclass(frozen=True)
class BinaryConsensus:
    verdict: object  # 0, 1 or "tie"
    tally: float

    def to_json(self):
        return {"verdict": self.verdict, "tally": self.tally}


def binary_consensus(x, v) -> BinaryConsensus:
    """Centrality-weighted log-odds vote on whether state 1 holds."""
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError("every x_i must lie strictly between 0 and 1")
    v = _weights(v)
    tally = math.fsum(v * (np.log(x) - np.log1p(-x)))
    if abs(tally) <= TIE_TOL:
        return BinaryConsensus("tie", tally)
    return BinaryConsensus(1 if tally > 0 else 0, tally)


@dataclass(frozen=True)
class PoissonConsensus:
    lambda_star: float
    point: object  # int, or a pair of ints when lambda_star is an integer
    arithmetic_mean: float

    @property
    def points(self):
        return self.point if isinstance(self.point, tuple) else (self.point,)

    def to_json(self):
        p = list(self.point) if isinstance(self.point, tuple) else self.point
        return {"lambda_star": self.lambda_star, "point": p, "arithmetic_mean": self.arithmetic_mean}


def poisson_consensus(lam, v, int_tol=1e-9) -> PoissonConsensus:
    """Geometric-mean rate ``lambda* = prod lambda_i ** v_i`` and its consensus point.

    The consensus is ``floor(lambda*)``, or ``{lambda*-1, lambda*}`` when
    ``lambda*`` is an integer (within ``int_tol`` relative). The arithmetic
    mean is reported as a contrast.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("rates must be positive")
    v = _weights(v)
    lam_star = math.exp(math.fsum(v * np.log(lam)))
    nearest = round(lam_star)
    if nearest >= 1 and abs(lam_star - nearest) <= int_tol * max(1.0, lam_star):
        point = (nearest - 1, nearest)
    else:
        point = math.floor(lam_star)
    return PoissonConsensus(lam_star, point, float(np.mean(lam)))


def _check_rho(rho, n):
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (n, n):
        raise ValueError(f"correlation matrix must be {n}x{n}")
    if not np.allclose(rho, rho.T, atol=1e-12, rtol=0):
        raise ValueError("correlation matrix must be symmetric")
    if not np.allclose(np.diag(rho), 1.0, atol=1e-12, rtol=0):
        raise ValueError("correlation matrix must have unit diagonal")
    if np.any(np.abs(rho) > 1):
        raise ValueError("correlations must lie in [-1, 1]")
    return rho


@dataclass(frozen=True, eq=False)
class GaussianConsensus:
    theta_max: float
    c: np.ndarray
    S: float
    V: np.ndarray

    def to_json(self):
        return {"theta_max": self.theta_max, "c": self.c.tolist(), "S": self.S, "V": self.V.tolist()}


def consensus_variance(tau, v, rho=None):
    """Variance of the consensus point when signals are drawn around the truth."""
    tau = np.asarray(tau, dtype=float)
    v = _weights(v)
    denom = float(np.dot(v, tau)) ** 2
    if rho is None:
        return float(np.dot(v**2, tau)) / denom
    rho = _check_rho(rho, len(tau))
    a = v * np.sqrt(tau)
    # the full quadratic form; its diagonal is sum v_i^2 tau_i
    return float(a @ rho @ a) / denom


def gaussian_consensus(mu, tau, v, rho=None) -> GaussianConsensus:
    """Consensus point, weights, variance and precision thresholds for Gaussian beliefs."""
    mu = np.asarray(mu, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("precisions must be positive")
    v = _weights(v)
    if not (len(mu) == len(tau) == len(v)):
        raise ValueError("mu, tau and v must have equal length")
    vt = v * tau
    c = vt / vt.sum()
    theta_max = math.fsum(c * mu)
    S = consensus_variance(tau, v, rho)
    V = np.array([_threshold(tau, v, k) for k in range(len(v))])
    return GaussianConsensus(theta_max, c, S, V)


def _threshold(tau, v, k):
    others = np.arange(len(v)) != k
    return 2 * float(np.dot(v[others] ** 2, tau[others])) / float(np.dot(v[others], tau[others]))


@dataclass(frozen=True, eq=False)
class PrecisionEffect:
    tau_k: np.ndarray
    S: np.ndarray
    V_k: float
    v_k: float
    monotone_decreasing: bool
    turning_point: Optional[float]  # analytic maximizer of S over tau_k > 0
    located_extremum: Optional[float]  # grid maximizer of S when interior


def precision_effect(tau, v, k, tau_k_grid) -> PrecisionEffect:
    """How ``S`` responds to agent ``k``'s precision, others fixed.

    ``S`` falls with ``tau_k`` throughout when ``v_k <= V_k``; otherwise it
    rises up to ``(v_k - V_k) * sum_{i != k} v_i tau_i / v_k**2`` and falls
    after.
    """
    tau = np.asarray(tau, dtype=float)
    v = _weights(v)
    grid = np.asarray(tau_k_grid, dtype=float)
    S = np.empty(len(grid))
    for j, t in enumerate(grid):
        trial = tau.copy()
        trial[k] = t
        S[j] = consensus_variance(trial, v)
    V_k = _threshold(tau, v, k)
    v_k = float(v[k])
    others = np.arange(len(v)) != k
    turning = (v_k - V_k) * float(np.dot(v[others], tau[others])) / v_k**2 if v_k > V_k else None
    top = int(np.argmax(S))
    located = float(grid[top]) if 0 < top < len(grid) - 1 else None
    return PrecisionEffect(grid, S, V_k, v_k, bool(np.all(np.diff(S) < 0)), turning, located)


@dataclass(frozen=True)
class MonteCarloVariance:
    mean: float
    variance: float
    draws: int
    seed: int


def estimate_consensus_variance(theta_star, tau, v, draws=100_000, seed=0, rho=None) -> MonteCarloVariance:
    """Sample mean and variance of the consensus point over simulated signals.

    Signals are ``mu_i ~ N(theta*, 1/tau_i)``, independent unless ``rho`` gives
    their correlations.
    """
    if draws < 1000:
        raise ValueError("use at least 1000 draws")
    tau = np.asarray(tau, dtype=float)
    v = _weights(v)
    c = gaussian_consensus(np.zeros(len(tau)), tau, v).c
    rng = np.random.default_rng(seed)
    sd = 1.0 / np.sqrt(tau)
    if rho is None:
        mu = theta_star + rng.standard_normal((draws, len(tau))) * sd
    else:
        rho = _check_rho(rho, len(tau))
        if np.min(np.linalg.eigvalsh(rho)) < -1e-12:
            raise ValueError("correlation matrix must be positive semidefinite")
        cov = rho * np.outer(sd, sd)
        mu = rng.multivariate_normal(np.full(len(tau), float(theta_star)), cov, size=draws, method="eigh")
    theta = mu @ c
    return MonteCarloVariance(float(theta.mean()), float(theta.var(ddof=1)), draws, seed)
