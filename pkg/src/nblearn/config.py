"""Scenario configuration files.

A scenario is a JSON object::

    {
      "space":   {"kind": "finite" | "integers" | "grid", ...},
      "graph":   {"n": 3, "edges": [[0, 1], ...], "undirected": false}
                 or {"family": "complete" | "cycle" | "ab", ...},
      "prior":   {"family": "flat"} or {"log_values": [...], "proper": bool},
      "beliefs": [{"family": "gaussian", "params": {"mu": 0, "tau": 1}}, ...],
      "rounds":  20
    }

``space`` may be omitted when the prior carries its own space or when every
belief is Bernoulli. Prebuilt initial conditions use
``{"builtin": {"kind": "ab" | "counterexample", ...}, "rounds": T}``.
"""

import json
from dataclasses import dataclass
from typing import Optional, Tuple

from .dynamics import InitialCondition
from .exceptions import ConfigError, ModelError
from .graph import graph_family, graph_from_json
from .likelihood import binary_consensus, gaussian_consensus, poisson_consensus
from .scenarios import ab_example_ic, counterexample_ic
from .statespace import BINARY, belief_from_json, prior_from_json, space_from_json

SIMULATABLE_BUILTINS = ("ab", "counterexample")


@dataclass(frozen=True, eq=False)
class Scenario:
    ic: InitialCondition
    rounds: Optional[int]
    families: Tuple[Optional[dict], ...] = ()
    flat_prior: bool = False


def _field(path, fn, *args):
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError, IndexError, ModelError) as exc:
        detail = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        raise ConfigError(path, detail) from None


def _require(obj, key, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected a JSON object")
    if key not in obj:
        raise ConfigError(f"{path}.{key}" if path else key, "required field is missing")
    return obj[key]


def _rounds(obj):
    if "rounds" not in obj:
        return None
    t = obj["rounds"]
    if not isinstance(t, int) or isinstance(t, bool) or t < 0:
        raise ConfigError("rounds", "must be a nonnegative integer")
    return t


def _builtin(obj):
    spec = obj["builtin"]
    kind = _require(spec, "kind", "builtin")
    if kind == "ab":
        ic = _field("builtin", lambda: ab_example_ic(int(spec["a"]), int(spec["b"]), float(spec["alpha"])))
    elif kind == "counterexample":
        ic = _field("builtin", lambda: counterexample_ic(
            int(spec["variant"]), float(spec["alpha"]), int(spec.get("theta_max", 60))))
    else:
        raise ConfigError("builtin.kind", f"{kind!r} does not describe an initial condition")
    return Scenario(ic, _rounds(obj))


def _space(obj, beliefs):
    if "space" in obj:
        return _field("space", space_from_json, obj["space"])
    prior = obj.get("prior")
    if isinstance(prior, dict) and "space" in prior:
        return _field("prior.space", space_from_json, prior["space"])
    if beliefs and all(isinstance(b, dict) and b.get("family") == "bernoulli" for b in beliefs):
        return BINARY
    raise ConfigError("space", "required field is missing")


def _graph(obj):
    g = _require(obj, "graph", "")
    if isinstance(g, dict) and "family" in g:
        params = {k: v for k, v in g.items() if k != "family"}
        return _field("graph", lambda: graph_family(g["family"], **params))
    return _field("graph", graph_from_json, g)


def parse_scenario(obj) -> Scenario:
    """Build a :class:`Scenario`; malformed input raises :class:`ConfigError` naming the field."""
    if not isinstance(obj, dict):
        raise ConfigError("$", "scenario must be a JSON object")
    if "builtin" in obj:
        return _builtin(obj)
    graph = _graph(obj)
    beliefs = _require(obj, "beliefs", "")
    if not isinstance(beliefs, list):
        raise ConfigError("beliefs", "must be a list")
    space = _space(obj, beliefs)
    prior_obj = obj.get("prior")
    prior = _field("prior", prior_from_json, prior_obj, space)
    if prior.space != space:
        raise ConfigError("prior.space", "differs from the scenario space")
    if len(beliefs) != graph.n:
        raise ConfigError("beliefs", f"need {graph.n} beliefs (one per node), got {len(beliefs)}")
    parsed = [_field(f"beliefs[{i}]", belief_from_json, b, space) for i, b in enumerate(beliefs)]
    for i, b in enumerate(parsed):
        if b.space != space:
            raise ConfigError(f"beliefs[{i}].space", "differs from the scenario space")
    families = tuple(
        {"family": b["family"], "params": b.get("params", {})} if isinstance(b, dict) and "family" in b else None
        for b in beliefs
    )
    flat = prior_obj is None or prior_obj.get("family") == "flat"
    ic = InitialCondition.from_beliefs(graph, prior, parsed)
    return Scenario(ic, _rounds(obj), families, flat)


def load_scenario(path) -> Tuple[Scenario, bytes]:
    """Read and parse a scenario file; returns the scenario and the raw bytes."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        obj = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError("$", f"not valid JSON: {exc}") from None
    return parse_scenario(obj), raw


def analytic_consensus(scenario: Scenario, v):
    """Closed-form consensus when every belief comes from one parametric family under a flat prior."""
    fams = scenario.families
    if not scenario.flat_prior or not fams or any(f is None for f in fams):
        return None
    names = {f["family"] for f in fams}
    if len(names) != 1:
        return None
    name = names.pop()
    params = [f["params"] for f in fams]
    if name == "bernoulli":
        return {"family": name, **binary_consensus([p["x"] for p in params], v).to_json()}
    if name == "poisson":
        return {"family": name, **poisson_consensus([p["lambda"] for p in params], v).to_json()}
    if name == "gaussian":
        res = gaussian_consensus([p["mu"] for p in params], [p["tau"] for p in params], v)
        return {"family": name, **res.to_json()}
    return None
