"""Literal checkers for the structural properties used in the HAM analysis.

Every checker evaluates its inequality at the given ``n`` as a real-number
comparison; nothing is adjusted for "n large enough".  Subset-quantified
properties (P3 and the feature-set expansion VR) are exact when the number of
candidate sets is under ``cap`` and otherwise one-sided: a sampled run can only
report a violation or ``no_violation_found``.
"""
from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import CapacityError, ParameterError
from .model import EPS, W_prime, make_rng

B1 = 0.001
SMALL_FRACTION = 0.1        # plain SMALL: W'(v) <= 0.1 d0
SMALL_STAR_FRACTION = 6e-3  # starred SMALL: W'(v) <= 6e-3 mp
DEFAULT_CAP = 2**20
DEFAULT_SAMPLES = 10_000

VERIFIED = "verified"
NO_VIOLATION = "no_violation_found"
VIOLATED = "violated"


def psi(eps: float) -> float:
    """Chernoff lower-tail exponent ``eps ln eps + 1 - eps`` on (0, 1]."""
    if not 0.0 < eps <= 1.0:
        raise ParameterError(f"psi is defined on (0, 1], got {eps}")
    return eps * math.log(eps) + 1.0 - eps


@dataclass(frozen=True)
class Partition:
    small: frozenset
    large: frozenset
    variant: str
    threshold: float


@dataclass(frozen=True)
class PropertyReport:
    property: str
    verdict: str
    samples: int | None = None
    witness: object = None
    constants: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict != VIOLATED

    def as_dict(self) -> dict:
        return {"property": self.property, "verdict": self.verdict, "samples": self.samples,
                "witness": self.witness, "constants": self.constants}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _source(G):
    if G.source is None:
        raise ParameterError("this check needs the generating incidence")
    return G.source


def partition(G, params, variant: str = "plain") -> Partition:
    B = _source(G)
    if variant == "plain":
        thr = SMALL_FRACTION * params.d0
    elif variant == "starred":
        thr = SMALL_STAR_FRACTION * params.mp
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    wp = W_prime(B)
    small = frozenset(np.flatnonzero(wp <= thr).tolist())
    return Partition(small, frozenset(range(G.n)) - small, variant, thr)


def _star(name, variant):
    return name + "*" if variant == "starred" else name


def p0_star_degree(params) -> int:
    """Smallest integer degree satisfying ``deg >= np / 2``."""
    return max(0, math.ceil(params.n * params.p / 2))


def check_p0(G, k: int = 2, starred: bool = False) -> PropertyReport:
    name = "P0*" if starred else "P0"
    degs = G.degrees()
    if G.n == 0:
        return PropertyReport(name, VERIFIED, constants={"k": k})
    v = int(np.argmin(degs))
    if degs[v] >= k:
        return PropertyReport(name, VERIFIED, constants={"k": k})
    return PropertyReport(name, VIOLATED, witness={"vertex": v, "degree": int(degs[v])},
                          constants={"k": k})


def check_p1(part: Partition, n: int, d0: float, mp: float | None = None) -> PropertyReport:
    name = _star("P1", part.variant)
    if part.variant == "starred":
        if mp is None:
            raise ParameterError("starred P1 needs mp")
        bound, trigger, trig_name = n ** EPS, mp, "mp"
    else:
        bound, trigger, trig_name = n ** (1 / 3), d0, "d0"
    consts = {"size_bound": bound, trig_name: trigger, "2ln_n": 2 * math.log(n)}
    size = len(part.small)
    if size > bound:
        return PropertyReport(name, VIOLATED, witness={"clause": "size", "small_size": size},
                              constants=consts)
    if trigger >= 2 * math.log(n) and size:
        return PropertyReport(name, VIOLATED, witness={"clause": "empty", "small_size": size},
                              constants=consts)
    return PropertyReport(name, VERIFIED, constants=consts)


def check_p2(G, part: Partition, radius: int = 4) -> PropertyReport:
    if part.variant != "plain":
        raise ParameterError("P2 has no starred form")
    small = part.small
    for v in sorted(small):
        dist = {v: 0}
        dq = deque([v])
        while dq:
            x = dq.popleft()
            if dist[x] == radius:
                continue
            for y in G.adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    if y in small:
                        return PropertyReport("P2", VIOLATED,
                                              witness={"pair": [v, y], "distance": dist[y]},
                                              constants={"radius": radius})
                    dq.append(y)
    return PropertyReport("P2", VERIFIED, constants={"radius": radius})


def _n_subsets(pool: int, smax: int) -> int:
    return sum(math.comb(pool, s) for s in range(1, smax + 1))


def p3_max_size(n: int, n_large: int, d1: float) -> int:
    if d1 <= 0:
        return n_large
    return min(n_large, math.floor(n / d1))


def check_p3(G, part: Partition, params, b1: float = B1, mode: str = "exhaustive",
             trials: int = DEFAULT_SAMPLES, seed=None, cap: int = DEFAULT_CAP) -> PropertyReport:
    """Neighbourhood expansion ``N(S) >= b1 d1 |S|`` for ``S`` in LARGE, ``|S| <= n / d1``."""
    if not b1 > 0:
        raise ParameterError("b1 must be positive")
    name = _star("P3", part.variant)
    n, d1 = G.n, params.d1
    large = sorted(part.large)
    smax = p3_max_size(n, len(large), d1)
    consts = {"b1": b1, "d1": d1, "max_size": smax}
    if smax < 1:
        return PropertyReport(name, VERIFIED, constants=consts)
    nb = [0] * n
    for v in range(n):
        for u in G.adj[v]:
            nb[v] |= 1 << u

    def violates(S):
        smask = 0
        reach = 0
        for v in S:
            smask |= 1 << v
            reach |= nb[v]
        return bin(reach & ~smask).count("1") < b1 * d1 * len(S)

    if mode == "exhaustive":
        total = _n_subsets(len(large), smax)
        if total > cap:
            raise CapacityError(f"{total} candidate sets exceed cap {cap}; use sampled mode")
        for s in range(1, smax + 1):
            for S in combinations(large, s):
                if violates(S):
                    return PropertyReport(name, VIOLATED, witness={"S": list(S)}, constants=consts)
        return PropertyReport(name, VERIFIED, constants=consts)
    if mode != "sampled":
        raise ParameterError(f"unknown mode {mode!r}")
    rng = make_rng(seed)
    arr = np.array(large)
    for _ in range(trials):
        s = int(rng.integers(1, smax + 1))
        S = sorted(rng.choice(arr, size=s, replace=False).tolist())
        if violates(S):
            return PropertyReport(name, VIOLATED, samples=trials, witness={"S": S}, constants=consts)
    return PropertyReport(name, NO_VIOLATION, samples=trials, constants=consts)


def check_p4(G, params) -> PropertyReport:
    B = _source(G)
    limits = {"W": 4 * params.mp, "W'": 4 * params.d0, "N": 12 * params.d1}
    wp = W_prime(B)
    for v in range(G.n):
        for bound, value in (("W", len(B.chose[v])), ("W'", int(wp[v])), ("N", len(G.adj[v]))):
            if value > limits[bound]:
                return PropertyReport("P4", VIOLATED, constants=limits,
                                      witness={"vertex": v, "bound": bound, "value": value})
    return PropertyReport("P4", VERIFIED, constants=limits)


def p5_limit(n: int, p: float) -> float:
    if n <= 2:
        raise ParameterError("P5 needs n >= 3 so that ln ln n > 0")
    return math.log(n) / math.log(math.log(n)) * max(n * p, 4.0)


def check_p5(G, params) -> PropertyReport:
    B = _source(G)
    limit = p5_limit(G.n, params.p)
    for w, vs in enumerate(B.chosen_by):
        if len(vs) > limit:
            return PropertyReport("P5", VIOLATED, witness={"feature": w, "V": len(vs)},
                                  constants={"limit": limit})
    return PropertyReport("P5", VERIFIED, constants={"limit": limit})


def check_vr(B, params, mode: str = "auto", trials: int = DEFAULT_SAMPLES, seed=None,
             cap: int = DEFAULT_CAP) -> PropertyReport:
    """Feature-set expansion ``V(R) >= np|R|/2 + 1`` for ``1 <= |R| <= 1/p``."""
    p = params.p
    if not p > 0:
        raise ParameterError("p must be positive")
    rmax = min(B.m, math.floor(1 / p))
    consts = {"np": B.n * p, "max_size": rmax}
    masks = [sum(1 << v for v in vs) for vs in B.chosen_by]

    def violates(R):
        reach = 0
        for w in R:
            reach |= masks[w]
        return bin(reach).count("1") < B.n * p * len(R) / 2 + 1

    total = _n_subsets(B.m, rmax)
    if mode == "auto":
        mode = "exhaustive" if total <= cap else "sampled"
    if mode == "exhaustive":
        if total > cap:
            raise CapacityError(f"{total} candidate sets exceed cap {cap}; use sampled mode")
        for r in range(1, rmax + 1):
            for R in combinations(range(B.m), r):
                if violates(R):
                    return PropertyReport("VR", VIOLATED, witness={"R": list(R)}, constants=consts)
        return PropertyReport("VR", VERIFIED, constants=consts)
    if mode != "sampled":
        raise ParameterError(f"unknown mode {mode!r}")
    if rmax < 1:
        return PropertyReport("VR", VERIFIED, constants=consts)
    rng = make_rng(seed)
    for _ in range(trials):
        r = int(rng.integers(1, rmax + 1))
        R = sorted(rng.choice(B.m, size=r, replace=False).tolist())
        if violates(R):
            return PropertyReport("VR", VIOLATED, samples=trials, witness={"R": R}, constants=consts)
    return PropertyReport("VR", NO_VIOLATION, samples=trials, constants=consts)


# --------------------------------------------------------------------------
# Deletable edge sets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DeletableVerdict:
    deletable: bool
    clause: str | None = None
    witness: object = None


def _norm(e):
    u, v = e
    return (u, v) if u < v else (v, u)


def is_deletable(G, part: Partition, trace, X, b2: float, d: float, params=None,
                 variant: str | None = None) -> DeletableVerdict:
    """Evaluate D1-D3 (plain) or D1*, D2*, D3 (starred) and report the first failure.

    ``trace`` is a :class:`~rig.ham.HamTrace` (or any iterable of edges standing
    for H(G)).  The starred clauses compare against ``b2 d0`` and ``b2 d1`` and
    so need ``params``.
    """
    variant = variant or part.variant
    X = {_norm(e) for e in X}
    E = G.edge_set()
    extra = X - E
    if extra:
        raise ParameterError(f"X is not a subset of E(G): {sorted(extra)[:3]}")
    H = getattr(trace, "h_set", trace)
    H = {_norm(e) for e in H}
    load = Counter()
    for u, v in X:
        load[u] += 1
        load[v] += 1

    if variant == "plain":
        for u, v in sorted(X):
            if u in part.small or v in part.small:
                return DeletableVerdict(False, "D1", {"edge": [u, v]})
        for v in sorted(part.large):
            if load[v] > b2 * d:
                return DeletableVerdict(False, "D2", {"vertex": v, "count": load[v], "limit": b2 * d})
    elif variant == "starred":
        if params is None:
            raise ParameterError("starred clauses need params (d0, d1)")
        for v in sorted(part.small):
            if load[v] > b2 * params.d0:
                return DeletableVerdict(False, "D1*", {"vertex": v, "count": load[v],
                                                       "limit": b2 * params.d0})
        for v in sorted(part.large):
            if load[v] > b2 * params.d1:
                return DeletableVerdict(False, "D2*", {"vertex": v, "count": load[v],
                                                       "limit": b2 * params.d1})
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    hit = sorted(X & H)
    if hit:
        return DeletableVerdict(False, "D3", {"edge": list(hit[0])})
    return DeletableVerdict(True)


# --------------------------------------------------------------------------
# Batteries
# --------------------------------------------------------------------------

PLAIN_CHECKS = ("P0", "P1", "P2", "P3", "P4", "P5")
STARRED_CHECKS = ("P0*", "P1*", "P3*", "P4", "P5", "VR")


def run_checks(G, params, variant: str = "plain", checks=None, samples: int = DEFAULT_SAMPLES,
               seed=None, cap: int = DEFAULT_CAP, b1: float = B1) -> list[PropertyReport]:
    """Run a list of checks, using exhaustive mode for P3/VR when under ``cap``."""
    if checks is None:
        checks = PLAIN_CHECKS if variant == "plain" else STARRED_CHECKS
    part = partition(G, params, variant)
    rng = make_rng(seed)
    out = []
    for name in checks:
        key = name.rstrip("*")
        if key == "P0":
            k = p0_star_degree(params) if variant == "starred" else 2
            out.append(check_p0(G, k, starred=variant == "starred"))
        elif key == "P1":
            out.append(check_p1(part, G.n, params.d0, params.mp))
        elif key == "P2":
            out.append(check_p2(G, part))
        elif key == "P3":
            smax = p3_max_size(G.n, len(part.large), params.d1)
            mode = "exhaustive" if _n_subsets(len(part.large), max(smax, 0)) <= cap else "sampled"
            out.append(check_p3(G, part, params, b1=b1, mode=mode, trials=samples, seed=rng, cap=cap))
        elif key == "P4":
            out.append(check_p4(G, params))
        elif key == "P5":
            out.append(check_p5(G, params))
        elif key == "VR":
            out.append(check_vr(G.source, params, mode="auto", trials=samples, seed=rng, cap=cap))
        else:
            raise ParameterError(f"unknown check {name!r}")
    return out
