"""Parameter spaces, priors and beliefs stored as log-densities.

Three kinds of space are supported:

* :class:`FiniteDiscrete` -- an ordered list of labels with counting measure.
* :class:`TruncatedIntegers` -- ``{lo, ..., theta_max}`` standing in for an
  infinite set of integers, with counting measure.
* :class:`Grid` -- ``m`` equally spaced points on ``[lo, hi]`` standing in for
  the real line; integrals use the trapezoid rule (end weights ``h/2``).

All densities live in log-space. ``-inf`` marks a point of zero density.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import norm, poisson

from .exceptions import AllZero, NonFinite, SpaceMismatch, TruncationError

NORMALIZATION_TOL = 1e-9


def _frozen(values):
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class FiniteDiscrete:
    labels: Tuple

    kind = "finite"

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 2:
            raise ValueError("a finite space needs at least 2 labels")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self):
        return len(self.labels)

    @property
    def points(self):
        return np.array([float(x) for x in self.labels])

    @property
    def weights(self):
        return np.ones(self.size)

    @property
    def stands_for_infinite(self):
        return False

    def to_json(self):
        return {"kind": self.kind, "labels": list(self.labels)}


@dataclass(frozen=True)
class TruncatedIntegers:
    theta_max: int
    lo: int = 0

    kind = "integers"

    def __post_init__(self):
        if self.theta_max < 1 or self.theta_max <= self.lo:
            raise ValueError("theta_max must be at least 1 and above lo")

    @property
    def size(self):
        return self.theta_max - self.lo + 1

    @property
    def points(self):
        return np.arange(self.lo, self.theta_max + 1, dtype=float)

    @property
    def weights(self):
        return np.ones(self.size)

    @property
    def stands_for_infinite(self):
        return True

    def to_json(self):
        out = {"kind": self.kind, "theta_max": self.theta_max}
        if self.lo:
            out["lo"] = self.lo
        return out


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    m: int

    kind = "grid"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        if self.m < 3:
            raise ValueError("grid needs at least 3 points")

    @property
    def size(self):
        return self.m

    @property
    def h(self):
        return (self.hi - self.lo) / (self.m - 1)

    @property
    def points(self):
        return np.linspace(self.lo, self.hi, self.m)

    @property
    def weights(self):
        w = np.full(self.m, self.h)
        w[0] = w[-1] = self.h / 2
        return w

    @property
    def stands_for_infinite(self):
        return True

    def to_json(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi, "m": self.m}


def space_from_json(obj):
    kind = obj["kind"]
    if kind == "finite":
        return FiniteDiscrete(tuple(obj["labels"]))
    if kind == "integers":
        return TruncatedIntegers(int(obj["theta_max"]), int(obj.get("lo", 0)))
    if kind == "grid":
        return Grid(float(obj["lo"]), float(obj["hi"]), int(obj["m"]))
    raise ValueError(f"unknown space kind {kind!r}")


def log_integrate(space, logf):
    """``log`` of the quadrature of ``exp(logf)`` over ``space``."""
    return float(logsumexp(np.asarray(logf) + np.log(space.weights)))


@dataclass(frozen=True, eq=False)
class LogPrior:
    """A common prior ``f*``; ``proper`` says whether it integrates finitely.

    A flat prior on a truncated space is recorded as improper because the
    space stands in for an infinite one.
    """

    space: object
    logf: np.ndarray
    proper: bool

    def __post_init__(self):
        object.__setattr__(self, "logf", _frozen(self.logf))
        if self.logf.shape != (self.space.size,):
            raise ValueError("prior has the wrong number of points")
        if not np.all(np.isfinite(self.logf)):
            raise NonFinite("prior log-values must be finite (the prior is positive everywhere)")

    def to_json(self):
        return {"space": self.space.to_json(), "log_values": self.logf.tolist(), "proper": self.proper}


def flat_prior(space) -> LogPrior:
    return LogPrior(space, np.zeros(space.size), proper=not space.stands_for_infinite)


def prior_from_log_values(space, logf, proper: Optional[bool] = None) -> LogPrior:
    """A prior from raw log-values; ``proper`` defaults to the space's own finiteness."""
    if proper is None:
        proper = not space.stands_for_infinite
    return LogPrior(space, logf, proper)


@dataclass(frozen=True, eq=False)
class LogBelief:
    """A normalized density on ``space`` stored as ``log f``."""

    space: object
    logf: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "logf", _frozen(self.logf))
        if self.logf.shape != (self.space.size,):
            raise ValueError("belief has the wrong number of points")
        if np.any(np.isnan(self.logf)) or np.any(self.logf == np.inf):
            raise NonFinite("belief log-values must be finite or -inf")
        if not np.any(np.isfinite(self.logf)):
            raise AllZero("belief has no mass")
        total = math.exp(log_integrate(self.space, self.logf))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"belief integrates to {total!r}, not 1")

    @property
    def density(self):
        return np.exp(self.logf)

    @property
    def masses(self):
        """Probability carried by each point (density times quadrature weight)."""
        return np.exp(self.logf) * self.space.weights

    def to_json(self):
        return {"space": self.space.to_json(), "log_values": _json_floats(self.logf)}


def _json_floats(values):
    return [None if v == -np.inf else float(v) for v in values]


def normalize_log(space, logf):
    """Shift ``logf`` so that it integrates to one."""
    logf = np.asarray(logf, dtype=float)
    if np.any(np.isnan(logf)) or np.any(logf == np.inf):
        raise NonFinite("log-values must be finite or -inf")
    if not np.any(np.isfinite(logf)):
        raise AllZero("all values are zero")
    return logf - log_integrate(space, logf)


def belief_from_log_values(space, logf) -> LogBelief:
    return LogBelief(space, normalize_log(space, logf))


def belief_from_density(space, values) -> LogBelief:
    """Normalize nonnegative per-point values into a belief."""
    values = np.asarray(values, dtype=float)
    if values.shape != (space.size,):
        raise ValueError("wrong number of values for this space")
    if not np.all(np.isfinite(values)):
        raise NonFinite("density values must be finite")
    if np.any(values < 0):
        raise ValueError("density values must be nonnegative")
    if not np.any(values > 0):
        raise AllZero("all density values are zero")
    with np.errstate(divide="ignore"):
        logf = np.log(values)
    return belief_from_log_values(space, logf)


def gaussian_belief(space: Grid, mu: float, tau: float, tail_tol: float = 1e-8) -> LogBelief:
    """``N(mu, 1/tau)`` restricted to the grid and renormalized.

    Raises :class:`TruncationError` when the Gaussian puts more than
    ``tail_tol`` of its mass outside ``[lo, hi]``.
    """
    if not isinstance(space, Grid):
        raise TypeError("gaussian beliefs need a Grid space")
    if tau <= 0:
        raise ValueError("precision tau must be positive")
    sd = 1.0 / math.sqrt(tau)
    outside = norm.cdf(space.lo, mu, sd) + norm.sf(space.hi, mu, sd)
    if outside > tail_tol:
        raise TruncationError(f"N({mu}, 1/{tau}) leaves mass {outside:.3g} outside [{space.lo}, {space.hi}]")
    logf = -0.5 * tau * (space.points - mu) ** 2
    return belief_from_log_values(space, logf)


def poisson_belief(space: TruncatedIntegers, lam: float) -> LogBelief:
    """``Pois(lam)`` on ``{0..theta_max}``, renormalized over the truncation.

    Requires ``theta_max >= lam + 10 sqrt(lam)`` so the dropped tail is tiny.
    """
    if not isinstance(space, TruncatedIntegers) or space.lo != 0:
        raise TypeError("poisson beliefs need TruncatedIntegers starting at 0")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if space.theta_max < lam + 10 * math.sqrt(lam):
        tail = poisson.sf(space.theta_max, lam)
        raise TruncationError(f"Pois({lam}) truncated at {space.theta_max} drops tail mass {tail:.3g}")
    k = space.points
    logf = k * math.log(lam) - lam - gammaln(k + 1)
    return belief_from_log_values(space, logf)


BINARY = FiniteDiscrete((0, 1))


def bernoulli_belief(x: float) -> LogBelief:
    """Belief on ``{0, 1}`` with probability ``x`` on state 1.

    State 1 reads as "the statement is true". Code that needs probability
    ``x`` on state 0 should build the belief with :func:`belief_from_density`.
    """
    if not 0 < x < 1:
        raise ValueError("x must lie strictly between 0 and 1")
    return LogBelief(BINARY, np.log([1.0 - x, x]))


@dataclass(frozen=True, eq=False)
class NormalizedBelief:
    """``log g = log f - log f*`` for one agent.

    ``logg`` may carry an additive constant: the true normalized belief is
    ``logg - log_scale``. Keeping the constant apart lets exact values (such
    as ``2**k * log(alpha)``) survive without rounding against it.
    """

    space: object
    logg: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "logg", _frozen(self.logg))

    @property
    def values(self):
        return self.logg - self.log_scale

    def belief(self, prior: LogPrior) -> LogBelief:
        _same_space(self.space, prior.space)
        with np.errstate(invalid="ignore"):
            return belief_from_log_values(self.space, prior.logf + self.logg)


def _same_space(a, b):
    if a != b:
        raise SpaceMismatch(f"{a} and {b} differ")


def normalized_from_log_values(prior: LogPrior, logg) -> NormalizedBelief:
    """Normalized belief from unnormalized ``log g`` values.

    The normalizing constant is folded into ``log_scale``, not into the values.
    """
    logg = np.asarray(logg, dtype=float)
    total = log_integrate(prior.space, prior.logf + logg)
    if not np.isfinite(total):
        raise AllZero("g has zero (or infinite) prior-weighted integral")
    return NormalizedBelief(prior.space, logg, total)


def normalize_against_prior(b: LogBelief, p: LogPrior) -> NormalizedBelief:
    """``g = f / f*``; integrates to one against the prior by construction."""
    _same_space(b.space, p.space)
    return NormalizedBelief(b.space, b.logf - p.logf)


def belief_from_json(obj, space=None):
    """Parse ``{"space":..., "log_values": [...]}`` or a parametric shorthand.

    Shorthands: ``{"family": "gaussian", "params": {"mu", "tau"}}``,
    ``{"family": "poisson", "params": {"lambda"}}``,
    ``{"family": "bernoulli", "params": {"x"}}``. ``space`` supplies the
    space for shorthands and for entries without their own.
    """
    if "family" in obj:
        family, params = obj["family"], obj.get("params", {})
        if family == "bernoulli":
            return bernoulli_belief(float(params["x"]))
        if space is None:
            raise KeyError("space")
        if family == "gaussian":
            return gaussian_belief(space, float(params["mu"]), float(params["tau"]),
                                   tail_tol=float(params.get("tail_tol", 1e-8)))
        if family == "poisson":
            return poisson_belief(space, float(params["lambda"]))
        raise ValueError(f"unknown belief family {family!r}")
    if "space" in obj:
        space = space_from_json(obj["space"])
    if space is None:
        raise KeyError("space")
    values = [-np.inf if v is None else float(v) for v in obj["log_values"]]
    return belief_from_log_values(space, values)


def prior_from_json(obj, space=None) -> LogPrior:
    if obj is None or obj.get("family") == "flat":
        if space is None:
            raise KeyError("space")
        return flat_prior(space)
    if "space" in obj:
        space = space_from_json(obj["space"])
    if space is None:
        raise KeyError("space")
    return prior_from_log_values(space, obj["log_values"], obj.get("proper"))
