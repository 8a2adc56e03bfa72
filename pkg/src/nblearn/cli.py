"""Command-line front end.

Exit codes: 0 success, 1 experiment check failed, 2 degenerate update,
3 tail-mass warning under ``--strict``, 64 malformed input, 74 I/O error.
"""

import argparse
import hashlib
import json
import os
import sys
import warnings

from .config import analytic_consensus, load_scenario
from .dynamics import TAIL_TOL, simulate
from .exceptions import ConfigError, DegenerateUpdate, TailMassWarning
from .experiments import run_experiment
from .graph import perron
from .likelihood import predict_consensus, weighted_likelihood
from .scenarios import catalog

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_DEGENERATE = 2
EXIT_TAIL = 3
EXIT_USAGE = 64
EXIT_IO = 74


def _fmt(x):
    return repr(float(x))


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def trajectory_csv(traj, sha, seed):
    lines = [f"# config_sha256={sha} seed={seed}", "round,agent,state_index,state_value,probability"]
    points = [_fmt(p) for p in traj.space.points]
    for t in range(traj.T + 1):
        masses = traj.masses(t)
        for i, row in enumerate(masses):
            lines += [f"{t},{i},{k},{points[k]},{_fmt(p)}" for k, p in enumerate(row)]
    return "\n".join(lines) + "\n"


def trajectory_json(traj, sha, seed):
    return _dump_json({
        "config_sha256": sha,
        "seed": seed,
        "space": traj.space.to_json(),
        "probabilities": [traj.masses(t).tolist() for t in range(traj.T + 1)],
    })


def _out_dir(args):
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_simulate(args):
    scenario, raw = load_scenario(args.config)
    sha = hashlib.sha256(raw).hexdigest()
    rounds = args.rounds if args.rounds is not None else scenario.rounds
    if rounds is None:
        raise ConfigError("rounds", "required field is missing (or pass --rounds)")
    tol = args.tol if args.tol is not None else TAIL_TOL
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TailMassWarning)
        try:
            traj = simulate(scenario.ic, rounds, tail_tol=tol)
        except DegenerateUpdate as exc:
            print(f"degenerate update: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
    tail = [w for w in caught if issubclass(w.category, TailMassWarning)]
    out = _out_dir(args)
    if args.format == "csv":
        _write(os.path.join(out, "trajectory.csv"), trajectory_csv(traj, sha, args.seed))
    else:
        _write(os.path.join(out, "trajectory.json"), trajectory_json(traj, sha, args.seed))
    _write(os.path.join(out, "diagnostics.json"), _dump_json({
        "config_sha256": sha,
        "seed": args.seed,
        "rounds": traj.T,
        "trusted": traj.trusted,
        "maximizer_indices": traj.maximizers.tolist(),
        "per_round": traj.diagnostics(),
    }))
    final = traj.mass_at_max[-1]
    print(f"rounds={traj.T} agents={scenario.ic.n} min_mass_at_maximizers={final.min():.6f} trusted={traj.trusted}")
    for w in tail:
        print(f"warning: {w.message}", file=sys.stderr)
    if tail and args.strict:
        return EXIT_TAIL
    return EXIT_OK


def cmd_predict(args):
    scenario, raw = load_scenario(args.config)
    sha = hashlib.sha256(raw).hexdigest()
    ic = scenario.ic
    c = perron(ic.graph)
    report = predict_consensus(weighted_likelihood(ic, c), ic)
    payload = {
        "config_sha256": sha,
        "seed": args.seed,
        "centrality": c.v.tolist(),
        "report": report.to_json(),
        "analytic": analytic_consensus(scenario, c.v),
    }
    text = _dump_json(payload)
    if args.out:
        _write(os.path.join(_out_dir(args), "prediction.json"), text)
    if args.format == "json":
        sys.stdout.write(text)
    else:
        print(f"maximizers: {list(report.maximizers)}")
        print(f"gap: {report.gap:.6g}")
        print(report.table())
        if payload["analytic"] is not None:
            print(f"analytic: {json.dumps(payload['analytic'], sort_keys=True)}")
    return EXIT_OK


def cmd_experiment(args):
    names = [e["name"] for e in catalog()] if args.all else [args.name]
    if not args.all and args.name is None:
        raise ConfigError("name", "give a scenario name or --all")
    ok = True
    for name in names:
        try:
            result = run_experiment(name)
        except KeyError:
            raise ConfigError("name", f"unknown scenario {name!r}") from None
        for line in result.lines():
            print(line)
        ok &= result.passed
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_catalog_list(args):
    if args.format == "json":
        sys.stdout.write(_dump_json(catalog()))
        return EXIT_OK
    for entry in catalog():
        print(f"{entry['name']:<24} {entry['reference']}")
    return EXIT_OK


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rounds", type=int, help="override the scenario's round count")
    common.add_argument("--seed", type=int, default=0, help="seed recorded in every output")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--strict", action="store_true", help="treat tail-mass warnings as errors")
    common.add_argument("--tol", type=float, help="tail-mass tolerance")

    p = argparse.ArgumentParser(prog="nblearn", description="Naive Bayesian learning on social networks.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common], help="simulate a scenario file")
    s.add_argument("config")
    s.set_defaults(func=cmd_simulate)
    s = sub.add_parser("predict", parents=[common], help="predict the consensus of a scenario file")
    s.add_argument("config")
    s.set_defaults(func=cmd_predict)
    s = sub.add_parser("experiment", parents=[common], help="run catalog scenarios and check them")
    s.add_argument("name", nargs="?")
    s.add_argument("--all", action="store_true")
    s.set_defaults(func=cmd_experiment)
    s = sub.add_parser("catalog-list", parents=[common], help="list catalog scenarios")
    s.set_defaults(func=cmd_catalog_list)
    return p


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.rounds is not None and args.rounds < 0:
        print("error: --rounds must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
