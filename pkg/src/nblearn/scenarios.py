"""Prebuilt initial conditions, the informed-averaging baseline and the scenario catalog."""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .dynamics import InitialCondition
from .exceptions import BBCMNotConverged
from .feasibility import catalog_rows
from .graph import DirectedGraph, build_ab_graph, perron
from .statespace import (
    BINARY,
    TruncatedIntegers,
    belief_from_density,
    flat_prior,
    normalized_from_log_values,
    prior_from_log_values,
)

BBCM_SPREAD_TOL = 1e-6


def _counterexample_logs(variant, alpha, theta):
    """Exact ``log f*`` and unnormalized ``log g_x``, ``log g_y`` on ``0..theta_max``.

    ``g`` is written as a multiple of ``|log alpha|`` so that the huge
    ``4**theta`` terms in ``f*`` and ``f`` never have to cancel numerically.
    """
    la = math.log(alpha)
    k = theta[1:]
    log_prior = np.empty(len(theta))
    log_gx = np.empty(len(theta))
    log_gy = np.empty(len(theta))
    if variant == 1:
        # f* = alpha, alpha**(4**t); f_x ~ 1, alpha**(4**t - 2**(t+1)); f_y ~ 1, alpha**(4**t + 2**(t+1))
        log_prior[0], log_prior[1:] = la, 4.0**k * la
        log_gx[0], log_gx[1:] = -la, -(2.0 ** (k + 1)) * la
        log_gy[0], log_gy[1:] = -la, 2.0 ** (k + 1) * la
    elif variant == 2:
        # f* = 1, alpha**(2**t); f_x ~ 1, alpha**(4**-t + 2**t - 1); f_y ~ 1, alpha**(4**-t + 2**t + 1)
        log_prior[0], log_prior[1:] = 0.0, 2.0**k * la
        log_gx[0], log_gx[1:] = 0.0, (4.0**-k - 1) * la
        log_gy[0], log_gy[1:] = 0.0, (4.0**-k + 1) * la
    else:
        raise ValueError("variant must be 1 or 2")
    return log_prior, log_gx, log_gy


def counterexample_ic(variant: int, alpha: float, theta_max: int = 60) -> InitialCondition:
    """Initial conditions on the (3,1)-graph whose beliefs fail to settle on the maximizer of ``L``.

    Variant 1 has a positive gap but unbounded ``g``; variant 2 has bounded
    ``g`` but no positive gap. In both, ``theta = 0`` uniquely maximizes ``L``.
    ``theta_max`` must lie in ``[40, 500]``: below that the tested horizon
    runs into the truncation and above it ``4**theta`` overflows.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if not 40 <= theta_max <= 500:
        raise ValueError("theta_max must lie in [40, 500]")
    space = TruncatedIntegers(theta_max)
    log_prior, log_gx, log_gy = _counterexample_logs(variant, alpha, space.points)
    # proper: the prior's mass is dominated by a geometric series
    prior = prior_from_log_values(space, log_prior, proper=True)
    graph = build_ab_graph(3, 1)
    c = graph.n // 2
    gx = normalized_from_log_values(prior, log_gx)
    gy = normalized_from_log_values(prior, log_gy)
    return InitialCondition(graph, prior, (gx,) * c + (gy,) * c)


def ab_example_ic(a: int, b: int, alpha: float) -> InitialCondition:
    """Binary beliefs on the (a,b)-graph: x-agents give state 0 mass ``alpha``, y-agents ``1 - alpha``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    graph = build_ab_graph(a, b)
    c = graph.n // 2
    fx = belief_from_density(BINARY, [alpha, 1 - alpha])
    fy = belief_from_density(BINARY, [1 - alpha, alpha])
    return InitialCondition.from_beliefs(graph, flat_prior(BINARY), [fx] * c + [fy] * c)


@dataclass(frozen=True, eq=False)
class BBCMState:
    """Scalar opinions; ``values`` is NaN where the agent is uninformed."""

    values: np.ndarray
    informed: np.ndarray

    def __post_init__(self):
        for name in ("values", "informed"):
            arr = np.array(getattr(self, name), copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _bbcm_step(a, values, informed):
    # a[j, i] is true when j is an in-neighbor of i
    counts = a.T @ informed
    sums = a.T @ np.where(informed, values, 0.0)
    reached = counts > 0
    new_values = np.full_like(values, np.nan)
    new_values[reached] = sums[reached] / counts[reached]
    return new_values, reached


def bbcm_simulate(g: DirectedGraph, seeds: Sequence[int], signals: Sequence[float], T: int) -> List[BBCMState]:
    """Informed-only averaging for ``T`` rounds; returns states for rounds ``0..T``.

    In each round every agent with an informed in-neighbor (itself counting
    only once informed) takes the mean of its informed in-neighbors' values
    and becomes informed. Informed agents keep averaging.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    if len(signals) != len(seeds):
        raise ValueError("need one signal per seed")
    a = g.matrix
    values = np.full(g.n, np.nan)
    values[seeds] = signals
    informed = np.zeros(g.n, dtype=bool)
    informed[seeds] = True
    states = [BBCMState(values, informed)]
    for _ in range(T):
        values, informed = _bbcm_step(a, values, informed.astype(float))
        states.append(BBCMState(values, informed))
    return states


@dataclass(frozen=True, eq=False)
class SeedingWeights:
    model: str
    seeds: Tuple[int, ...]
    weights: np.ndarray
    spread: float = 0.0

    def to_json(self):
        return {"model": self.model, "seeds": list(self.seeds), "weights": self.weights.tolist(), "spread": self.spread}


def extract_seeding_weights(model: str, g: DirectedGraph, seeds: Sequence[int], tau=None, T: int = 10_000) -> SeedingWeights:
    """Weight of each seed's signal in the eventual consensus.

    ``naive_bayes`` uses ``c_i = v_i tau_i / sum v_j tau_j`` over the seeds
    (non-seeds carry flat beliefs and no weight). ``bbcm`` runs the averaging
    baseline once per basis signal and averages each agent's final value;
    agents must agree to within ``1e-6`` or :class:`BBCMNotConverged` is raised.
    """
    seeds = tuple(int(s) for s in seeds)
    if model == "naive_bayes":
        tau = np.ones(len(seeds)) if tau is None else np.asarray(tau, dtype=float)
        v = perron(g).v[list(seeds)]
        vt = v * tau
        return SeedingWeights(model, seeds, vt / vt.sum())
    if model != "bbcm":
        raise ValueError(f"unknown model {model!r}")
    weights = []
    spread = 0.0
    for j in range(len(seeds)):
        basis = np.zeros(len(seeds))
        basis[j] = 1.0
        final = bbcm_simulate(g, seeds, basis, T)[-1].values
        if np.any(np.isnan(final)):
            raise BBCMNotConverged(f"some agents are still uninformed after {T} rounds")
        spread = max(spread, float(final.max() - final.min()))
        weights.append(float(final.mean()))
    if spread > BBCM_SPREAD_TOL:
        raise BBCMNotConverged(f"agents disagree by {spread:.3g} after {T} rounds")
    return SeedingWeights(model, seeds, np.array(weights), spread)


def _ab_entry(name, a, b, pattern, reference):
    return {
        "name": name,
        "reference": reference,
        "config": {"builtin": {"kind": "ab", "a": a, "b": b, "alpha": 0.3}, "rounds": 20},
        "expected": {"pattern": pattern},
    }


def _feasibility_entries():
    out = []
    for i, (region, spec) in enumerate(catalog_rows(k=2), start=1):
        first_fail = {1: 1, 2: 1, 3: 3, 4: 3}.get(i)
        out.append({
            "name": f"feasibility-row-{i}",
            "reference": "power-law feasibility table",
            "config": {"builtin": {
                "kind": "power_law",
                "prior_exponent": str(spec.prior_exponent),
                "f1_exponent": str(spec.f1_exponent),
                "f2_exponent": str(spec.f2_exponent),
                "prior_flat_on_even": spec.prior_flat_on_even,
            }},
            "expected": {"region": region, "first_failing_round": first_fail},
        })
    return out


def catalog() -> List[dict]:
    """Named, JSON-ready scenarios, each with the outcome it should reproduce."""
    two = {"n": 2, "edges": [[0, 1], [1, 0]]}
    entries = [
        {
            "name": "poisson-floods",
            "reference": "Poisson consensus: floor(sqrt(2000)) = 44 floods, not 501",
            "config": {
                "space": {"kind": "integers", "theta_max": 2000},
                "graph": two,
                "prior": {"family": "flat"},
                "beliefs": [
                    {"family": "poisson", "params": {"lambda": 2}},
                    {"family": "poisson", "params": {"lambda": 1000}},
                ],
                "rounds": 25,
            },
            "expected": {"consensus": 44, "min_mass": 0.99},
        },
        {
            "name": "gaussian-pair",
            "reference": "Gaussian consensus at the precision-weighted mean",
            "config": {
                "space": {"kind": "grid", "lo": -10, "hi": 10, "m": 2001},
                "graph": two,
                "prior": {"family": "flat"},
                "beliefs": [
                    {"family": "gaussian", "params": {"mu": 0, "tau": 1}},
                    {"family": "gaussian", "params": {"mu": 1, "tau": 1}},
                ],
                "rounds": 20,
            },
            "expected": {"theta_max": 0.5, "tol": 0.01, "min_mass": 0.99},
        },
        {
            "name": "binary-vote",
            "reference": "log-odds vote",
            "config": {
                "space": {"kind": "finite", "labels": [0, 1]},
                "graph": two,
                "prior": {"family": "flat"},
                "beliefs": [
                    {"family": "bernoulli", "params": {"x": 0.9}},
                    {"family": "bernoulli", "params": {"x": 0.2}},
                ],
                "rounds": 30,
            },
            "expected": {"verdict": 1, "min_mass": 0.99},
        },
        _ab_entry("oscillate-21", 2, 1, "constant", "(2,1)-graph: f_x(0) stays at alpha"),
        _ab_entry("oscillate-12", 1, 2, "alternate", "(1,2)-graph: f_x(0) alternates alpha, 1 - alpha"),
        _ab_entry("converge-31", 3, 1, "converge", "(3,1)-graph: f_x(0) tends to 0 for alpha < 1/2"),
        _ab_entry("split-13", 1, 3, "split", "(1,3)-graph: even rounds tend to 0, odd rounds to 1"),
    ]
    for variant, gap, bounded in ((1, True, False), (2, False, True)):
        entries.append({
            "name": f"counterexample-{variant}",
            "reference": f"counterexample {variant}: unique maximizer 0 without convergence to it",
            "config": {
                "builtin": {"kind": "counterexample", "variant": variant, "alpha": 0.5, "theta_max": 60},
                "rounds": 8,
            },
            "expected": {
                "bound": 1 / (1 + 2.0) if variant == 1 else 1 / (1 + 0.5),
                "positive_gap": gap,
                "bounded_g": bounded,
            },
        })
    entries += _feasibility_entries()
    entries.append({
        "name": "clustered-seeding-51",
        "reference": "clustered seeding: equal thirds vs. the middle seed blocked",
        "config": {"builtin": {"kind": "clustered_seeding", "n": 51, "seeds": [24, 25, 26], "compare_n": 9}},
        "expected": {"naive_bayes": 1 / 3, "tol": 1e-6, "bbcm_middle_max": 0.05, "bbcm_outer_min": 0.45},
    })
    return entries


def catalog_entry(name: str) -> dict:
    for entry in catalog():
        if entry["name"] == name:
            return entry
    raise KeyError(name)
