"""Command-line entry point: ``rig gen | ham | props | solve-p | exp``."""
from __future__ import annotations

import argparse
import json
import sys

from .errors import CapacityError, InfeasibleError, ParameterError, RegimeError
from .experiments import KINDS, ExperimentConfig, run_trials, write_outputs
from .ham import DEFAULT_MAX_QUEUE, MODES, outcome_report, run_ham
from .model import derived_params, format_graph, intersection_of, read_graph, sample_bipartite
from .properties import run_checks
from .thresholds import solve_p

EXIT_CODES = {"cycle": 0, "failure": 2, "overflow": 3}


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x]


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


def cmd_gen(a) -> int:
    B = sample_bipartite(a.n, a.m, a.p, a.seed)
    text = format_graph(B)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _params(B):
    if B.p is None or not 0 < B.p < 1:
        raise ParameterError("graph file has no usable p; pass --d explicitly")
    return derived_params(B.n, B.m, B.p)


def cmd_ham(a) -> int:
    B = read_graph(a.infile)
    G = intersection_of(B)
    d = a.d if a.d is not None else _params(B).d
    out = run_ham(G, d, mode=a.mode, max_queue=a.max_queue)
    print(json.dumps(outcome_report(out, G), sort_keys=True))
    return EXIT_CODES[out.status]


def cmd_props(a) -> int:
    B = read_graph(a.infile)
    G = intersection_of(B)
    checks = [c.strip() for c in a.checks.split(",")] if a.checks else None
    for r in run_checks(G, _params(B), a.variant, checks=checks, samples=a.samples, seed=a.seed):
        print(r.to_json())
    return 0


def cmd_solve_p(a) -> int:
    print(solve_p(a.n, a.m, a.c, a.eps).to_json())
    return 0


def cmd_exp(a) -> int:
    cfg = ExperimentConfig(kind=a.kind, n=tuple(_ints(a.n)), m_rule=a.m_rule, c=tuple(_floats(a.c)),
                           trials=a.trials, master_seed=a.seed, lam=a.lam, p=a.p, mode=a.mode,
                           max_queue=a.max_queue, eps_regime=a.eps, workers=a.workers)
    res = run_trials(cfg)
    out = write_outputs(res, a.out)
    print(json.dumps({"out": str(out), "trials": len(res.records)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rig", description="Random intersection graph toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="sample B(n,m,p) and write it in the RIG text format")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    h = sub.add_parser("ham", help="run HAM; exit 0 cycle, 2 failure, 3 overflow")
    h.add_argument("--in", dest="infile", required=True)
    h.add_argument("--d", type=float)
    h.add_argument("--mode", choices=MODES, default="faithful")
    h.add_argument("--max-queue", type=int, default=DEFAULT_MAX_QUEUE)
    h.set_defaults(func=cmd_ham)

    p = sub.add_parser("props", help="print one JSON report per property check")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--variant", choices=("plain", "starred"), default="plain")
    p.add_argument("--checks", help="comma-separated, e.g. P0,P3,VR")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_props)

    s = sub.add_parser("solve-p", help="solve the threshold equation for p")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.set_defaults(func=cmd_solve_p)

    e = sub.add_parser("exp", help="run a Monte Carlo experiment")
    e.add_argument("--kind", choices=KINDS, required=True)
    e.add_argument("--n", required=True, help="size or comma-separated sweep")
    e.add_argument("--m-rule", default="n", help="n, nlogn, n^a, <k>n or an integer")
    e.add_argument("--c", default="0", help="value or comma-separated sweep")
    e.add_argument("--trials", type=int, required=True)
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--lambda", dest="lam", type=float, default=1.0)
    e.add_argument("--p", type=float)
    e.add_argument("--mode", choices=MODES, default="faithful")
    e.add_argument("--max-queue", type=int, default=10**6)
    e.add_argument("--eps", type=float, default=0.1)
    e.add_argument("--workers", type=int)
    e.set_defaults(func=cmd_exp)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, RegimeError, InfeasibleError, CapacityError, OSError) as exc:
        print(f"rig {args.cmd}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
