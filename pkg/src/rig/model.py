"""Random intersection graphs built from their bipartite vertex/feature incidence.

Vertices are ``0..n-1`` and features ``0..m-1``.  A :class:`BipartiteIncidence`
holds both directions of the incidence (features chosen by each vertex, vertices
choosing each feature); :func:`intersection_of` derives the graph in which two
vertices are adjacent iff their feature sets meet.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import ParameterError

EPS = 1 / 25  # m-regime split exponent: m >= n**(1 - EPS) is the "large m" case


# --------------------------------------------------------------------------
# RNG plumbing
# --------------------------------------------------------------------------

def make_rng(seed) -> np.random.Generator:
    """Return a PCG64 generator for ``seed`` (an existing Generator passes through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_seed(master_seed: int, index: int) -> int:
    """Split function for per-trial streams.

    The seed of trial ``index`` is the first 63-bit word of
    ``SeedSequence(master_seed, spawn_key=(index,))``; it depends only on the
    pair, never on execution order or worker count.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


# --------------------------------------------------------------------------
# Structures
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BipartiteIncidence:
    n: int
    m: int
    chose: tuple[tuple[int, ...], ...]
    chosen_by: tuple[tuple[int, ...], ...]
    p: float | None = field(default=None, compare=False)
    seed: object = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.chose) != self.n or len(self.chosen_by) != self.m:
            raise ParameterError("incidence tables do not match (n, m)")

    @classmethod
    def from_pairs(cls, n, m, vertices, features, p=None, seed=None) -> "BipartiteIncidence":
        vertices = np.asarray(vertices, dtype=np.int64)
        features = np.asarray(features, dtype=np.int64)
        if vertices.shape != features.shape:
            raise ParameterError("vertex and feature arrays differ in length")
        if vertices.size:
            if vertices.min() < 0 or vertices.max() >= n:
                raise ParameterError("vertex index out of range")
            if features.min() < 0 or features.max() >= m:
                raise ParameterError("feature index out of range")
        flat = np.unique(vertices * m + features)
        vs, ws = np.divmod(flat, m)
        chose = _group(vs, ws, n)
        order = np.lexsort((vs, ws))
        chosen_by = _group(ws[order], vs[order], m)
        return cls(n, m, chose, chosen_by, p=p, seed=seed)

    @classmethod
    def from_feature_sets(cls, m, feature_sets, p=None, seed=None) -> "BipartiteIncidence":
        vs, ws = [], []
        for v, feats in enumerate(feature_sets):
            for w in feats:
                vs.append(v)
                ws.append(w)
        return cls.from_pairs(len(feature_sets), m, vs, ws, p=p, seed=seed)

    def pairs(self) -> np.ndarray:
        """All incidence pairs as a ``(K, 2)`` array sorted by (vertex, feature)."""
        counts = [len(f) for f in self.chose]
        vs = np.repeat(np.arange(self.n, dtype=np.int64), counts)
        ws = np.fromiter((w for f in self.chose for w in f), dtype=np.int64, count=int(sum(counts)))
        return np.column_stack([vs, ws])

    def matrix(self) -> sparse.csr_matrix:
        pr = self.pairs()
        data = np.ones(len(pr), dtype=np.int32)
        return sparse.csr_matrix((data, (pr[:, 0], pr[:, 1])), shape=(self.n, self.m))

    def W(self, v: int) -> int:
        return len(self.chose[v])

    def V(self, w: int) -> int:
        return len(self.chosen_by[w])

    def validate(self) -> None:
        """Full invariant check: ranges, no duplicates, exact transposition."""
        rebuilt = [[] for _ in range(self.m)]
        for v, feats in enumerate(self.chose):
            if list(feats) != sorted(set(feats)):
                raise ParameterError(f"feature list of vertex {v} not strictly increasing")
            for w in feats:
                if not 0 <= w < self.m:
                    raise ParameterError(f"feature {w} out of range")
                rebuilt[w].append(v)
        if tuple(map(tuple, rebuilt)) != self.chosen_by:
            raise ParameterError("chosen_by is not the transpose of chose")


def _group(keys: np.ndarray, values: np.ndarray, size: int) -> tuple[tuple[int, ...], ...]:
    # keys sorted ascending; values sorted within each key
    bounds = np.searchsorted(keys, np.arange(size + 1))
    vals = values.tolist()
    return tuple(tuple(vals[bounds[i]:bounds[i + 1]]) for i in range(size))


@dataclass(frozen=True, eq=False)
class IntersectionGraph:
    """Simple undirected graph on ``0..n-1`` with sorted neighbour tuples.

    ``source`` is the generating incidence, or ``None`` for a plain graph.
    """
    n: int
    adj: tuple[tuple[int, ...], ...]
    source: BipartiteIncidence | None = None
    nbr_sets: tuple[frozenset, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ParameterError("adjacency length does not match n")
        object.__setattr__(self, "nbr_sets", tuple(frozenset(a) for a in self.adj))

    @classmethod
    def from_edges(cls, n, edges, source=None) -> "IntersectionGraph":
        nb = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ParameterError("self-loops are not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge {(u, v)} out of range")
            nb[u].add(v)
            nb[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nb), source)

    def __eq__(self, other):
        if not isinstance(other, IntersectionGraph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    __hash__ = None

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.nbr_sets[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adj), dtype=np.int64, count=self.n)

    def min_degree(self) -> int:
        return int(self.degrees().min()) if self.n else 0

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())


def _adjacency_csr(B: BipartiteIncidence) -> sparse.csr_matrix:
    M = B.matrix()
    A = (M @ M.T).tocsr()
    A.setdiag(0)
    A.eliminate_zeros()
    A.sort_indices()
    return A


def intersection_of(B: BipartiteIncidence) -> IntersectionGraph:
    A = _adjacency_csr(B)
    idx = A.indices.tolist()
    ptr = A.indptr.tolist()
    adj = tuple(tuple(idx[ptr[v]:ptr[v + 1]]) for v in range(B.n))
    return IntersectionGraph(B.n, adj, B)


def degree_sequence(B: BipartiteIncidence) -> np.ndarray:
    """Vertex degrees of the intersection graph without materialising it."""
    return np.diff(_adjacency_csr(B).indptr)


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------

def _check_p(p):
    if not (isinstance(p, (int, float, np.floating)) and 0.0 <= float(p) <= 1.0):
        raise ParameterError(f"p must lie in [0, 1], got {p!r}")


def sample_bipartite(n: int, m: int, p: float, seed=None) -> BipartiteIncidence:
    """Sample B(n, m, p): each of the n*m pairs present independently with prob. p.

    The pair count is drawn from Binomial(n*m, p) and the pairs as a uniform
    subset of that size, which is the same product law.
    """
    if n < 1 or m < 1:
        raise ParameterError("n and m must be positive")
    _check_p(p)
    rng = make_rng(seed)
    total = n * m
    k = int(rng.binomial(total, float(p)))
    flat = np.sort(rng.choice(total, size=k, replace=False)) if k else np.empty(0, np.int64)
    vs, ws = np.divmod(flat, m)
    recorded = seed if not isinstance(seed, np.random.Generator) else None
    return BipartiteIncidence.from_pairs(n, m, vs, ws, p=float(p), seed=recorded)


# --------------------------------------------------------------------------
# Derived parameters
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    n: int
    m: int
    p: float
    d0: float
    d1: float
    d: float
    T: int
    d_branch: str          # "nmp2" (mp^2 <= 1) or "dense" (d = n, T = 2)
    regime_np: str         # "np<=40" or "np>40"
    regime_m: str          # "m>=n^(1-eps)" or "m<n^(1-eps)"
    eps: float = EPS

    @property
    def mp(self) -> float:
        return self.m * self.p

    @property
    def np_(self) -> float:
        return self.n * self.p

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("n", "m", "p", "d0", "d1", "d", "T", "d_branch", "regime_np", "regime_m", "eps")}


def one_minus_q_pow(p: float, k: float) -> float:
    """``1 - (1 - p)**k`` without cancellation for small p."""
    if p >= 1.0:
        return 1.0 if k > 0 else 0.0
    return -math.expm1(k * math.log1p(-p))


def derived_params(n: int, m: int, p: float) -> ModelParams:
    from .ham import compute_budget

    if n < 2 or m < 1:
        raise ParameterError("need n >= 2 and m >= 1")
    if not 0.0 < p < 1.0:
        raise ParameterError("p must lie in (0, 1)")
    mp = m * p
    d0 = mp * one_minus_q_pow(p, n - 1)
    d1 = n * m * p * p
    if m * p * p <= 1.0:
        d, branch = d1, "nmp2"
    else:
        d, branch = float(n), "dense"
    T = compute_budget(n, d) if branch == "nmp2" else 2
    return ModelParams(
        n=n, m=m, p=float(p), d0=d0, d1=d1, d=d, T=T, d_branch=branch,
        regime_np="np>40" if n * p > 40 else "np<=40",
        regime_m="m>=n^(1-eps)" if m >= n ** (1 - EPS) else "m<n^(1-eps)",
    )


# --------------------------------------------------------------------------
# Sparsification coupling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SparsifiedTriple:
    original: IntersectionGraph
    sparse: IntersectionGraph
    deleted_edges: frozenset
    lam: float
    q: float


def thin_incidence(B: BipartiteIncidence, lam: float, seed=None) -> BipartiteIncidence:
    """B_q: each incidence pair of ``B`` deleted independently with probability ``lam / n``."""
    if lam < 0 or lam > B.n:
        raise ParameterError(f"lambda must lie in [0, n], got {lam}")
    q = lam / B.n
    rng = make_rng(seed)
    pr = B.pairs()
    keep = rng.random(len(pr)) >= q
    return BipartiteIncidence.from_pairs(B.n, B.m, pr[keep, 0], pr[keep, 1], p=B.p, seed=B.seed)


def sparsify(B: BipartiteIncidence, lam: float, seed=None) -> SparsifiedTriple:
    """The coupled triple (G, G_q, X_q) for ``B_q = thin_incidence(B, lam, seed)``."""
    Bq = thin_incidence(B, lam, seed)
    q = lam / B.n
    G = intersection_of(B)
    Gq = intersection_of(Bq)
    return SparsifiedTriple(G, Gq, G.edge_set() - Gq.edge_set(), float(lam), q)


# --------------------------------------------------------------------------
# Incidence queries
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class IncidenceSummary:
    W_S: frozenset      # features chosen by S
    V_R: frozenset      # vertices choosing a feature of R
    W1_S: frozenset     # features of S chosen by >= 2 vertices overall
    W2_S: frozenset     # features chosen by >= 2 vertices of S
    N_S: frozenset      # neighbours of S outside S

    @property
    def sizes(self) -> dict:
        return {"W(S)": len(self.W_S), "V(R)": len(self.V_R), "W'(S)": len(self.W1_S),
                "W''(S)": len(self.W2_S), "N(S)": len(self.N_S)}


def incidence_queries(B: BipartiteIncidence, G: IntersectionGraph, S=(), R=()) -> IncidenceSummary:
    S = set(S)
    R = set(R)
    if any(not 0 <= v < B.n for v in S):
        raise ParameterError("vertex index out of range")
    if any(not 0 <= w < B.m for w in R):
        raise ParameterError("feature index out of range")
    W_S = {w for v in S for w in B.chose[v]}
    V_R = {v for w in R for v in B.chosen_by[w]}
    W1 = {w for w in W_S if len(B.chosen_by[w]) >= 2}
    W2 = {w for w in W_S if sum(1 for v in B.chosen_by[w] if v in S) >= 2}
    N_S = {u for v in S for u in G.adj[v]} - S
    return IncidenceSummary(frozenset(W_S), frozenset(V_R), frozenset(W1), frozenset(W2), frozenset(N_S))


def W_prime(B: BipartiteIncidence) -> np.ndarray:
    """Per-vertex count of chosen features that some other vertex also chose."""
    shared = np.fromiter((len(c) >= 2 for c in B.chosen_by), dtype=bool, count=B.m)
    return np.fromiter((int(shared[list(f)].sum()) if f else 0 for f in B.chose),
                       dtype=np.int64, count=B.n)


# --------------------------------------------------------------------------
# Text formats
# --------------------------------------------------------------------------

def format_graph(B: BipartiteIncidence) -> str:
    """``RIG n m p seed`` header, then one line of sorted features per vertex."""
    p = "nan" if B.p is None else repr(float(B.p))
    lines = [f"RIG {B.n} {B.m} {p} {B.seed}"]
    lines.extend(" ".join(map(str, feats)) for feats in B.chose)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> BipartiteIncidence:
    lines = text.split("\n")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "RIG":
        raise ParameterError("missing 'RIG n m p seed' header")
    n, m = int(head[1]), int(head[2])
    p = None if head[3] == "nan" else float(head[3])
    seed: object = head[4]
    if seed == "None":
        seed = None
    else:
        try:
            seed = int(seed)
        except ValueError:
            pass
    body = lines[1:n + 1]
    if len(body) < n:
        raise ParameterError(f"expected {n} vertex lines, found {len(body)}")
    sets = [[int(tok) for tok in line.split()] for line in body]
    return BipartiteIncidence.from_feature_sets(m, sets, p=p, seed=seed)


def write_graph(B: BipartiteIncidence, path) -> None:
    Path(path).write_text(format_graph(B))


def read_graph(path) -> BipartiteIncidence:
    return parse_graph(Path(path).read_text())


def format_edge_list(G: IntersectionGraph) -> str:
    buf = io.StringIO()
    for u, v in G.edges():
        buf.write(f"{u} {v}\n")
    return buf.getvalue()
