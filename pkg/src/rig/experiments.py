"""Seeded Monte Carlo harness.

A run is a sweep over ``(n, c)`` groups with ``trials`` independent trials
each.  Trial ``i`` (numbered globally across the sweep) draws everything from
``trial_seed(master_seed, i)``, so records do not depend on worker count or
execution order.  Aggregation only sums per-trial values, grouped by
``(n, m, p)``.
"""
from __future__ import annotations

import csv
import json
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from . import __version__
from .errors import CapacityError, ParameterError
from .ham import end_sets, run_ham, validate_cycle
from .model import (degree_sequence, derived_params, intersection_of, sample_bipartite, sparsify,
                    trial_seed)
from .properties import B1, VIOLATED, is_deletable, partition, run_checks
from .thresholds import limit_min_degree_prob, poisson_degree1_mean, solve_p

KINDS = ("min_degree", "joint_failure", "degree1_poisson", "complexity",
         "property_prevalence", "end_sets", "deletable_rate")
HAM_KINDS = {"joint_failure", "complexity", "end_sets", "deletable_rate"}

CSV_COLUMNS = ("trial", "seed", "n", "m", "p", "min_degree", "degree1_count", "ham_result",
               "fail_stage", "rotations", "paths_explored", "end_size", "end_min_x_size",
               "deletable")

FAILURE_INDUCTION_NOTE = (
    "END sets are only defined on runs where HAM fails, and above the threshold failures are "
    "rare, so this kind is meant to be run at c in [-2, 0]."
)


def resolve_m(rule, n: int) -> int:
    """Evaluate an m-rule: ``"n"``, ``"nlogn"``, ``"n^a"``, ``"<k>n"`` or an integer."""
    if isinstance(rule, (int, np.integer)):
        return int(rule)
    s = str(rule).replace(" ", "").lower()
    if s == "n":
        return n
    if s in ("nlogn", "nlnn"):
        return max(1, round(n * math.log(n)))
    if re.fullmatch(r"\d+", s):
        return int(s)
    mt = re.fullmatch(r"n\^([0-9.]+)", s)
    if mt:
        return max(1, round(n ** float(mt.group(1))))
    mt = re.fullmatch(r"([0-9.]+)\*?n", s)
    if mt:
        return max(1, round(float(mt.group(1)) * n))
    raise ParameterError(f"unrecognised m-rule {rule!r}")


def default_workers() -> int:
    env = os.environ.get("RIG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _tuple(x):
    if isinstance(x, (list, tuple)):
        return tuple(x)
    return (x,)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: tuple = (1000,)
    m_rule: object = "n"
    c: tuple = (0.0,)
    trials: int = 100
    master_seed: int = 0
    lam: float = 1.0
    p: float | None = None             # explicit p skips the solver
    c_schedule: tuple | None = None    # per-trial c values (cycled); overrides c
    mode: str = "faithful"
    max_queue: int = 10**6
    eps_regime: float = 0.1
    b1: float = B1
    prop_samples: int = 1000
    end_cap: int = 200_000
    workers: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}")
        object.__setattr__(self, "n", tuple(int(v) for v in _tuple(self.n)))
        object.__setattr__(self, "c", tuple(float(v) for v in _tuple(self.c)))
        if self.c_schedule is not None:
            object.__setattr__(self, "c_schedule", tuple(float(v) for v in self.c_schedule))
            if not self.c_schedule:
                raise ParameterError("c_schedule must be nonempty")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.n or not self.c:
            raise ParameterError("sweeps must be nonempty")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["m_rule"] = str(self.m_rule)
        return d


@dataclass
class TrialReport:
    trial: int
    seed: int
    n: int
    m: int
    p: float
    c: float | None
    min_degree: int
    degree1_count: int
    ham_result: str | None = None      # "cycle" | "failure" | "overflow"
    fail_stage: int | None = None
    rotations: int | None = None
    paths_explored: int | None = None
    end_size: int | None = None
    end_min_x_size: int | None = None
    deletable: bool | None = None
    properties: dict = field(default_factory=dict)

    def row(self) -> list:
        out = []
        for col in CSV_COLUMNS:
            v = getattr(self, col)
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(str(v))
        return out


@dataclass(frozen=True)
class _Task:
    config: ExperimentConfig
    index: int
    n: int
    m: int
    p: float
    c: float | None


def _run_task(task: _Task) -> TrialReport:
    cfg = task.config
    seed = trial_seed(cfg.master_seed, task.index)
    B = sample_bipartite(task.n, task.m, task.p, seed)
    kind = cfg.kind
    if kind in ("min_degree", "degree1_poisson"):
        degs = degree_sequence(B)
        return TrialReport(task.index, seed, task.n, task.m, task.p, task.c,
                           int(degs.min()), int((degs == 1).sum()))
    G = intersection_of(B)
    degs = G.degrees()
    rep = TrialReport(task.index, seed, task.n, task.m, task.p, task.c,
                      int(degs.min()), int((degs == 1).sum()))
    params = derived_params(task.n, task.m, task.p)
    variant = "plain" if params.regime_m == "m>=n^(1-eps)" else "starred"

    if kind == "property_prevalence":
        for r in run_checks(G, params, variant, samples=cfg.prop_samples,
                            seed=trial_seed(seed, 2), b1=cfg.b1):
            rep.properties[r.property] = r.verdict
        return rep

    out = run_ham(G, params.d, mode=cfg.mode, max_queue=cfg.max_queue, T=params.T,
                  record_frontier=False)
    rep.ham_result = out.status
    rep.rotations = out.counters.rotations_total
    rep.paths_explored = out.counters.paths_explored
    if out.success:
        if not validate_cycle(G, out.cycle):
            raise AssertionError(f"trial {task.index}: HAM reported an invalid cycle")
        return rep
    rep.fail_stage = out.trace.stage
    if out.status != "failure":
        return rep
    if kind == "end_sets":
        try:
            es = end_sets(G, out.trace, out.trace.T, cap=cfg.end_cap)
        except CapacityError:  # leave the sizes empty
            pass
        else:
            rep.end_size = es.size
            rep.end_min_x_size = es.min_x_size
    elif kind == "deletable_rate":
        trip = sparsify(B, cfg.lam, trial_seed(seed, 1))
        part = partition(G, params, variant)
        v = is_deletable(G, part, out.trace, trip.deleted_edges, 0.5 * cfg.b1, params.d, params,
                         variant)
        rep.deletable = v.deletable
    return rep


def _plan(cfg: ExperimentConfig) -> list[_Task]:
    tasks = []
    idx = 0
    p_cache = {}

    def p_for(n, m, c):
        if cfg.p is not None:
            return float(cfg.p)
        key = (n, m, c)
        if key not in p_cache:
            p_cache[key] = solve_p(n, m, c, cfg.eps_regime).p
        return p_cache[key]

    for n in cfg.n:
        m = resolve_m(cfg.m_rule, n)
        if cfg.c_schedule is not None:
            for t in range(cfg.trials):
                c = cfg.c_schedule[t % len(cfg.c_schedule)]
                tasks.append(_Task(cfg, idx, n, m, p_for(n, m, c), c))
                idx += 1
            continue
        for c in cfg.c:
            p = p_for(n, m, c)
            for _ in range(cfg.trials):
                tasks.append(_Task(cfg, idx, n, m, p, None if cfg.p is not None else c))
                idx += 1
    return tasks


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    summary: dict


def run_trials(config: ExperimentConfig) -> ExperimentResult:
    tasks = _plan(config)
    workers = config.workers or default_workers()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        records = [_run_task(t) for t in tasks]
    return ExperimentResult(config, records, summarize(records, config))


# --------------------------------------------------------------------------
# Aggregation
# --------------------------------------------------------------------------

def wilson(successes: int, total: int, alpha: float = 0.05) -> list[float]:
    lo, hi = proportion_confint(successes, total, alpha=alpha, method="wilson")
    return [float(lo), float(hi)]


def _rate(k, t):
    return {"count": k, "total": t, "rate": k / t if t else None,
            "ci95": wilson(k, t) if t else None}


def _mean(xs):
    return float(np.mean(xs)) if len(xs) else None


def _group_summary(recs) -> dict:
    t = len(recs)
    degs = np.array([r.min_degree for r in recs])
    d1 = np.array([r.degree1_count for r in recs])
    g = {"trials": t, "n": recs[0].n, "m": recs[0].m, "p": recs[0].p, "c": recs[0].c}
    g["min_degree_ge2"] = _rate(int((degs >= 2).sum()), t)
    g["degree1_mean"] = float(d1.mean())
    g["degree1_var"] = float(d1.var(ddof=1)) if t > 1 else None
    g["degree1_var_over_mean"] = (g["degree1_var"] / g["degree1_mean"]
                                  if g["degree1_var"] is not None and g["degree1_mean"] > 0 else None)
    vals, counts = np.unique(d1, return_counts=True)
    g["degree1_histogram"] = {str(int(v)): int(k) for v, k in zip(vals, counts)}
    if recs[0].c is not None:
        g["predicted_min_degree_ge2"] = limit_min_degree_prob(recs[0].c)
        g["predicted_degree1_mean"] = poisson_degree1_mean(recs[0].c)

    ham = [r for r in recs if r.ham_result is not None]
    if ham:
        status = [r.ham_result for r in ham]
        g["ham"] = {s: status.count(s) for s in ("cycle", "failure", "overflow")}
        ok2 = [r for r in ham if r.min_degree >= 2]
        # overflow is counted as a failure here
        joint = sum(1 for r in ok2 if r.ham_result != "cycle")
        g["joint_failure"] = _rate(joint, len(ham))
        g["success_given_min_degree_ge2"] = _rate(len(ok2) - joint, len(ok2))
        rots = [r.rotations for r in ham]
        g["rotations_mean"] = _mean(rots)
        g["rotations_total"] = int(sum(rots))
        g["paths_explored_total"] = int(sum(r.paths_explored for r in ham))
    prop_names = sorted({k for r in recs for k in r.properties})
    if prop_names:
        g["property_holds"] = {
            k: _rate(sum(1 for r in recs if k in r.properties and r.properties[k] != VIOLATED),
                     sum(1 for r in recs if k in r.properties))
            for k in prop_names}
    ends = [r for r in recs if r.end_size is not None]
    if ends:
        g["end_size_mean"] = _mean([r.end_size for r in ends])
        g["end_size_over_n_mean"] = _mean([r.end_size / r.n for r in ends])
        xs = [r.end_min_x_size for r in ends if r.end_min_x_size is not None]
        g["end_min_x_size_mean"] = _mean(xs)
        g["end_trials"] = len(ends)
    dels = [r for r in recs if r.deletable is not None]
    if dels:
        g["deletable"] = _rate(sum(1 for r in dels if r.deletable), len(dels))
    return g


def loglog_slope(ns, values) -> float | None:
    """Least-squares slope of log(value) against log(n); None with fewer than two points."""
    pts = [(n, v) for n, v in zip(ns, values) if v is not None and v > 0]
    if len({n for n, _ in pts}) < 2:
        return None
    x = np.log([n for n, _ in pts])
    y = np.log([v for _, v in pts])
    return float(np.polyfit(x, y, 1)[0])


def summarize(records, config: ExperimentConfig | None = None) -> dict:
    records = list(records)
    if not records:
        raise ParameterError("nothing to summarize")
    groups = {}
    for r in sorted(records, key=lambda r: r.trial):
        groups.setdefault((r.n, r.m, r.p, r.c), []).append(r)
    out = {"version": __version__, "trials": len(records),
           "groups": [_group_summary(v) for v in groups.values()]}
    if config is not None:
        out["config"] = config.as_dict()
        if config.kind == "end_sets":
            out["failure_induction"] = {"c": list(config.c_schedule or config.c),
                                        "note": FAILURE_INDUCTION_NOTE}
    if any(r.rotations is not None for r in records):
        by_n = {}
        for r in records:
            if r.rotations is not None:
                by_n.setdefault(r.n, []).append(r.rotations)
        ns = sorted(by_n)
        means = [float(np.mean(by_n[n])) for n in ns]
        out["complexity"] = {"n": ns, "rotations_mean": means, "loglog_slope": loglog_slope(ns, means)}
    return out


def write_records(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in sorted(records, key=lambda r: r.trial):
            w.writerow(r.row())


def write_outputs(result: ExperimentResult, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_records(result.records, out / "records.csv")
    (out / "summary.json").write_text(json.dumps(result.summary, indent=2, sort_keys=True) + "\n")
    return out
