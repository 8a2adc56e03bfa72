"""Run catalog scenarios and check them against their expected outcomes."""

from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from .config import analytic_consensus, parse_scenario
from .dynamics import simulate
from .feasibility import PowerLawSpec, classify_power_law
from .graph import cycle_graph, perron
from .likelihood import predict_consensus, weighted_likelihood
from .scenarios import catalog, catalog_entry, extract_seeding_weights
from .statespace import Grid

PATTERN_TOL = 1e-9
CONVERGED = 1e-6


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    checks: List[Check]

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        return [f"{'PASS' if c.passed else 'FAIL'} {self.name}: {c.label} ({c.detail})" for c in self.checks]


def _mass_near(traj, point, t=-1, cells=5):
    space = traj.space
    masses = traj.masses(traj.T if t == -1 else t)
    k = int(np.argmin(np.abs(space.points - point)))
    width = cells if isinstance(space, Grid) else 0
    return masses[:, max(0, k - width): k + width + 1].sum(axis=1)


def _run_family(entry):
    exp = entry["expected"]
    scenario = parse_scenario(entry["config"])
    ic = scenario.ic
    c = perron(ic.graph)
    report = predict_consensus(weighted_likelihood(ic, c), ic)
    analytic = analytic_consensus(scenario, c.v)
    checks = []
    if "consensus" in exp:
        checks.append(Check("predicted consensus", report.predicted_point == exp["consensus"],
                            f"predicted {report.predicted_point}, analytic {analytic['point']}"))
        target = exp["consensus"]
    elif "theta_max" in exp:
        ok = abs(analytic["theta_max"] - exp["theta_max"]) <= 1e-12 and report.predicted_point is not None \
            and abs(report.predicted_point - analytic["theta_max"]) <= exp["tol"]
        checks.append(Check("theta_max", ok, f"analytic {analytic['theta_max']:.6g}, grid argmax {report.predicted_point}"))
        target = analytic["theta_max"]
    else:
        ok = analytic["verdict"] == exp["verdict"] and report.predicted_point == exp["verdict"]
        checks.append(Check("vote", ok, f"log-odds verdict {analytic['verdict']}, argmax {report.predicted_point}"))
        target = exp["verdict"]
    traj = simulate(ic, scenario.rounds)
    mass = _mass_near(traj, target)
    checks.append(Check("concentration", bool(np.all(mass >= exp["min_mass"])),
                        f"min mass near {target:g} after {traj.T} rounds: {mass.min():.6f}"))
    return checks


def _run_ab(entry):
    alpha = entry["config"]["builtin"]["alpha"]
    scenario = parse_scenario(entry["config"])
    ic, T = scenario.ic, scenario.rounds
    traj = simulate(ic, T)
    half = ic.n // 2
    f = np.array([traj.masses(t)[0, 0] for t in range(T + 1)])
    pattern = entry["expected"]["pattern"]
    if pattern == "constant":
        err = np.max(np.abs(f - alpha))
        ok, detail = err <= PATTERN_TOL, f"max |f_x(0) - alpha| = {err:.2e}"
    elif pattern == "alternate":
        target = np.where(np.arange(T + 1) % 2 == 0, alpha, 1 - alpha)
        err = np.max(np.abs(f - target))
        ok, detail = err <= PATTERN_TOL, f"max deviation from alternation = {err:.2e}"
    elif pattern == "converge":
        ok, detail = f[15] <= CONVERGED, f"f_x(0) at t=15 is {f[15]:.2e}"
    else:
        even, odd = f[T - T % 2], f[T - 1 + T % 2]
        ok = even <= CONVERGED and odd >= 1 - CONVERGED
        detail = f"last even round {even:.2e}, last odd round {odd:.6f}"
    log_f = traj.log_f
    same = np.max(np.abs(log_f[:, :half] - log_f[:, :1])) <= PATTERN_TOL
    return [Check(pattern, bool(ok), detail), Check("x-agents agree", bool(same), "identical x-group beliefs every round")]


def _run_counterexample(entry):
    spec = entry["config"]["builtin"]
    exp = entry["expected"]
    scenario = parse_scenario(entry["config"])
    ic = scenario.ic
    L = weighted_likelihood(ic)
    report = predict_consensus(L, ic)
    traj = simulate(ic, scenario.rounds)
    f = traj.masses(traj.T)[0, 0]
    fx0 = np.array([traj.masses(t)[0, 0] for t in range(1, traj.T + 1)])
    return [
        Check("0 maximizes L", int(np.argmax(L.logL)) == 0 and 0.0 in report.maximizers,
              f"maximizer set {_short(report.maximizers)}"),
        Check("bound on f_x(0)", bool(np.all(fx0 <= exp["bound"] + 1e-6)),
              f"max over t=1..{traj.T} is {fx0.max():.6f}, bound {exp['bound']:.6f}; alpha={spec['alpha']}, final {f:.6f}"),
        Check("positive gap verdict", report.condition("positive gap").passed == exp["positive_gap"],
              report.condition("positive gap").detail),
        Check("bounded g verdict", report.condition("bounded g").passed == exp["bounded_g"],
              report.condition("bounded g").detail),
    ]


def _short(points):
    pts = list(points)
    return str(pts) if len(pts) <= 4 else f"[{pts[0]}, {pts[1]}, ..., {pts[-1]}] ({len(pts)} points)"


def _run_power_law(entry):
    spec = entry["config"]["builtin"]
    exp = entry["expected"]
    cls = classify_power_law(PowerLawSpec(
        Fraction(spec["prior_exponent"]), Fraction(spec["f1_exponent"]), Fraction(spec["f2_exponent"]),
        bool(spec.get("prior_flat_on_even", False)),
    ))
    return [
        Check("region", cls.region == exp["region"], f"classified as {cls.region}"),
        Check("first failing round", cls.first_failing_round == exp["first_failing_round"],
              f"got {cls.first_failing_round}"),
    ]


def _centered_seeds(n):
    m = n // 2
    return [m - 1, m, m + 1]


def _run_seeding(entry):
    spec = entry["config"]["builtin"]
    exp = entry["expected"]
    g = cycle_graph(spec["n"])
    seeds = spec["seeds"]
    nb = extract_seeding_weights("naive_bayes", g, seeds)
    bb = extract_seeding_weights("bbcm", g, seeds)
    small = extract_seeding_weights("bbcm", cycle_graph(spec["compare_n"]), _centered_seeds(spec["compare_n"]))
    outer = min(bb.weights[0], bb.weights[2])
    return [
        Check("naive Bayes thirds", bool(np.all(np.abs(nb.weights - exp["naive_bayes"]) <= exp["tol"])),
              f"weights {np.round(nb.weights, 9).tolist()}"),
        Check("baseline middle seed", bb.weights[1] <= exp["bbcm_middle_max"], f"middle weight {bb.weights[1]:.4f}"),
        Check("baseline outer seeds", outer >= exp["bbcm_outer_min"], f"smallest outer weight {outer:.4f}"),
        Check("middle weight shrinks with n", bb.weights[1] < small.weights[1],
              f"n={spec['compare_n']}: {small.weights[1]:.4f}, n={spec['n']}: {bb.weights[1]:.4f}"),
    ]


def run_experiment(name: str) -> ExperimentResult:
    """Run one catalog scenario; raises ``KeyError`` for unknown names."""
    entry = catalog_entry(name)
    config = entry["config"]
    kind = config.get("builtin", {}).get("kind")
    runner = {
        None: _run_family,
        "ab": _run_ab,
        "counterexample": _run_counterexample,
        "power_law": _run_power_law,
        "clustered_seeding": _run_seeding,
    }[kind]
    return ExperimentResult(name, runner(entry))


def run_all() -> List[ExperimentResult]:
    return [run_experiment(e["name"]) for e in catalog()]
