"""Rotation-extension search for Hamilton cycles (algorithm HAM).

A run proceeds in stages.  Stage ``k`` starts from a path ``P_k`` on ``k``
vertices.  Paths are dequeued breadth-first; each one is extended (an endpoint
has an off-path neighbour), closed into a cycle and re-opened through an
outside neighbour, or, failing both, replaced by every path one Pósa rotation
away.  Only paths at most ``2T + 1`` rotations from ``P_k`` are explored; when
they are exhausted the run fails at stage ``k``.

Inside a stage every explored path has the same vertex set as ``P_k``, so a
path is stored as the tuple of rotations applied to ``P_k``.  A rotation at the
far end reverses a suffix, one at the near end reverses a prefix:

* ``op > 0``  keep positions ``0..op`` and reverse ``op+1..k-1``
* ``op < 0``  reverse positions ``0..(-op - 1)``

so locating a vertex in a derived path costs ``O(#rotations)``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import CapacityError, ContractViolation, ParameterError

DEFAULT_MAX_QUEUE = 10**7
MODES = ("faithful", "dedup")


def compute_budget(n: int, d: float) -> int:
    """Rotation budget ``T = max(2, ceil(ln n / ln max(d, e)))``.

    With ``d = n`` this is 2; for ``d = Omega(ln n)`` it is ``o(ln n)`` and the
    per-stage rotation tree ``(12 d)^(2T + 2)`` stays polynomial in ``n``.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    if not d > 0:
        raise ParameterError("d must be positive")
    ratio = math.log(n) / math.log(max(d, math.e))
    return max(2, math.ceil(ratio - 1e-12))


# --------------------------------------------------------------------------
# Paths and single rotations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PathState:
    seq: tuple[int, ...]
    rot_count: int = 0
    parent: "PathState | None" = field(default=None, repr=False, compare=False)
    move: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(set(self.seq)) != len(self.seq):
            raise ContractViolation("path repeats a vertex")

    @property
    def on_path(self) -> frozenset:
        return frozenset(self.seq)

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.seq[0], self.seq[-1]


def rotate(P: PathState, e, G=None) -> PathState:
    """ROTATE(P, {u_k, u_i}) = (u_1, .., u_i, u_k, u_{k-1}, .., u_{i+1}).

    ``e`` must contain the last vertex ``u_k`` and a vertex ``u_i`` with
    ``2 <= i <= k - 2`` (1-based).  When ``G`` is given the chord must be one
    of its edges.
    """
    seq = P.seq
    k = len(seq)
    if k < 4:
        raise ContractViolation("rotation needs a path on at least 4 vertices")
    x, y = e
    uk = seq[-1]
    if x == uk:
        other = y
    elif y == uk:
        other = x
    else:
        raise ContractViolation("chord must be incident to the last vertex")
    try:
        i = seq.index(other) + 1
    except ValueError:
        raise ContractViolation("chord endpoint is not on the path") from None
    if not 2 <= i <= k - 2:
        raise ContractViolation(f"pivot position {i} outside [2, {k - 2}]")
    if G is not None and not G.has_edge(uk, other):
        raise ContractViolation(f"{(uk, other)} is not an edge")
    return PathState(seq[:i] + seq[:i - 1:-1], P.rot_count + 1, P, (uk, other))


def _fwd(pos, ops, k):
    # position in P_k -> position in the derived path
    for op in ops:
        if op > 0:
            if pos > op:
                pos = k + op - pos
        else:
            j = -op - 1
            if pos <= j:
                pos = j - pos
    return pos


def _inv(pos, ops, k):
    # each op is an involution, so undo them in reverse order
    for op in reversed(ops):
        if op > 0:
            if pos > op:
                pos = k + op - pos
        else:
            j = -op - 1
            if pos <= j:
                pos = j - pos
    return pos


def _materialize(path, ops):
    cur = list(path)
    for op in ops:
        if op > 0:
            cur[op + 1:] = cur[:op:-1]
        else:
            j = -op - 1
            cur[:j + 1] = cur[j::-1]
    return cur


def _chords(path, ops):
    """Edges introduced by each rotation of ``ops`` (endpoint, pivot)."""
    cur = list(path)
    out = []
    for op in ops:
        if op > 0:
            out.append((cur[-1], cur[op]))
            cur[op + 1:] = cur[:op:-1]
        else:
            j = -op - 1
            out.append((cur[0], cur[j + 1]))
            cur[:j + 1] = cur[j::-1]
    return out


def _canon(seq):
    seq = tuple(seq)
    return seq if seq[0] <= seq[-1] else seq[::-1]


def _edge(u, v):
    return (u, v) if u < v else (v, u)


# --------------------------------------------------------------------------
# Outcomes
# --------------------------------------------------------------------------

@dataclass
class HamCounters:
    rotations_total: int = 0
    extensions_simple: int = 0
    extensions_cycle: int = 0
    paths_explored: int = 0
    stages_completed: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class HamTrace:
    """State of the run at the stage where it stopped.

    ``h_set`` holds every edge introduced into the chain of paths
    ``P_1 -> .. -> P_k`` (extension edges, rotation chords, cycle-closing
    endpoint pairs).  ``frontier`` lists the explored paths of the final stage
    as rotation-op tuples relative to ``initial_path``; it is empty when the
    run was made with ``record_frontier=False``.
    """
    stage: int
    h_set: frozenset
    initial_path: tuple[int, ...]
    T: int
    frontier: tuple = field(default=(), repr=False)

    def path_states(self):
        for ops in self.frontier:
            yield PathState(tuple(_materialize(self.initial_path, ops)), len(ops))


@dataclass(frozen=True)
class HamOutcome:
    status: str                       # "cycle" | "failure" | "overflow"
    counters: HamCounters
    T: int
    d: float
    mode: str
    cycle: tuple[int, ...] | None = None
    trace: HamTrace | None = None

    @property
    def success(self) -> bool:
        return self.status == "cycle"

    @property
    def stage(self) -> int | None:
        return None if self.trace is None else self.trace.stage


# --------------------------------------------------------------------------
# The search
# --------------------------------------------------------------------------

def run_ham(G, d: float, *, mode: str = "faithful", max_queue: int = DEFAULT_MAX_QUEUE,
            T: int | None = None, record_frontier: bool = True) -> HamOutcome:
    """Run HAM on ``G`` (any object with ``n``, ``adj`` and ``nbr_sets``).

    Ties are broken by lowest vertex index.  ``mode="dedup"`` skips a rotated
    path already seen in the current stage (up to reversal); ``"faithful"``
    enqueues every rotation.  A stage that generates more than ``max_queue``
    paths ends the run with status ``"overflow"``.
    """
    n = G.n
    if n < 3:
        raise ParameterError("HAM needs at least 3 vertices")
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}")
    if T is None:
        T = compute_budget(n, d)
    max_rot = 2 * T + 1
    adj = G.adj
    nbrs = G.nbr_sets
    dedup = mode == "dedup"

    on_path = [False] * n
    outside = [len(a) for a in adj]   # neighbours not yet on the path
    pos0 = [-1] * n
    counters = HamCounters()
    h = set()

    def add_vertex(v):
        on_path[v] = True
        for y in adj[v]:
            outside[y] -= 1

    def first_outside(v):
        for y in adj[v]:
            if not on_path[y]:
                return y
        return None

    def finish(status, path, explored, cycle=None):
        trace = None
        if status != "cycle":
            trace = HamTrace(len(path), frozenset(h), tuple(path), T, tuple(explored))
        return HamOutcome(status, counters, T, float(d), mode, cycle=cycle, trace=trace)

    path = [0]
    add_vertex(0)
    pos0[0] = 0

    while True:
        k = len(path)
        queue = deque([()])
        explored = []
        generated = 1
        seen = {_canon(path)} if dedup else None
        action = None

        while queue:
            ops = queue.popleft()
            counters.paths_explored += 1
            if record_frontier:
                explored.append(ops)
            if ops:
                a = path[_inv(0, ops, k)]
                b = path[_inv(k - 1, ops, k)]
            else:
                a = path[0]
                b = path[-1]

            if outside[a] or outside[b]:
                vb = first_outside(b) if outside[b] else None
                va = first_outside(a) if outside[a] else None
                if va is None or (vb is not None and vb <= va):
                    action = ("append", ops, b, vb)
                else:
                    action = ("prepend", ops, a, va)
                break
            if k >= 3 and b in nbrs[a]:
                action = ("cycle", ops)
                break
            if len(ops) >= max_rot or k < 4:
                continue

            children = []
            for y in adj[b]:
                py = _fwd(pos0[y], ops, k)
                if 1 <= py <= k - 3:
                    children.append(ops + (py,))
            for y in adj[a]:
                py = _fwd(pos0[y], ops, k)
                if 2 <= py <= k - 2:
                    children.append(ops + (-py,))
            counters.rotations_total += len(children)
            if dedup:
                for child in children:
                    key = _canon(_materialize(path, child))
                    if key not in seen:
                        seen.add(key)
                        queue.append(child)
                        generated += 1
            else:
                queue.extend(children)
                generated += len(children)
            if generated > max_queue:
                return finish("overflow", path, explored)

        if action is None:
            return finish("failure", path, explored)

        ops = action[1]
        for u, v in _chords(path, ops):
            h.add(_edge(u, v))

        if action[0] == "cycle":
            cur = _materialize(path, ops)
            h.add(_edge(cur[0], cur[-1]))
            if k == n:
                counters.stages_completed += 1
                return finish("cycle", cur, explored, cycle=tuple(cur))
            u = min((x for x in cur if outside[x]), default=None)
            if u is None:
                # the cycle is a whole component; no path of this stage can grow
                return finish("failure", path, explored)
            v = first_outside(u)
            j = cur.index(u)
            path = [v] + cur[j:] + cur[:j]
            h.add(_edge(u, v))
            counters.extensions_cycle += 1
            rebuild = True
        else:
            kind, _, end, v = action
            h.add(_edge(end, v))
            counters.extensions_simple += 1
            if kind == "append" and not ops:
                path.append(v)
                pos0[v] = k
                rebuild = False
            else:
                cur = _materialize(path, ops)
                if kind == "append":
                    cur.append(v)
                else:
                    cur.insert(0, v)
                path = cur
                rebuild = True
        counters.stages_completed += 1
        add_vertex(v)
        if rebuild:
            for i, x in enumerate(path):
                pos0[x] = i


def validate_cycle(G, cycle) -> bool:
    """True iff ``cycle`` lists every vertex once and consecutive pairs are edges."""
    try:
        cyc = [int(v) for v in cycle]
    except (TypeError, ValueError):
        return False
    n = G.n
    if n < 3 or len(cyc) != n or sorted(cyc) != list(range(n)):
        return False
    return all(cyc[i - 1] in G.nbr_sets[cyc[i]] for i in range(n))


# --------------------------------------------------------------------------
# END sets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EndSets:
    end_g: frozenset
    end_gx: dict

    @property
    def size(self) -> int:
        return len(self.end_g)

    @property
    def min_x_size(self) -> int | None:
        return min((len(s) for s in self.end_gx.values()), default=None)


def _rotation_children(adj, Q):
    k = len(Q)
    if k < 4:
        return
    pos = {v: i for i, v in enumerate(Q)}
    for y in adj[Q[-1]]:
        i = pos.get(y)
        if i is not None and 1 <= i <= k - 3:
            yield Q[:i + 1] + Q[:i:-1]
    for y in adj[Q[0]]:
        i = pos.get(y)
        if i is not None and 2 <= i <= k - 2:
            yield Q[i - 1::-1] + Q[i:]


def end_sets(G, trace: HamTrace, T: int, cap: int = 2_000_000) -> EndSets:
    """END(G) and END(G, x) at the stage where the run stopped.

    The rotation closure of the stage's initial path is recomputed to depth
    ``2T``, keeping the least rotation count at which each path (up to
    reversal) appears.  A path reached with ``t >= 1`` rotations is reached
    again with ``t + 2`` (rotate back along the re-created chord), and the
    initial path itself recurs at depth 2 whenever it has a rotation, so the
    least depth decides membership in both windows ``[1, T]`` and ``[1, 2T]``.
    The anchor ``u0`` is the first vertex of the initial path.
    """
    if T != trace.T:
        raise ParameterError(f"trace was produced with T={trace.T}, not {T}")
    P = tuple(trace.initial_path)
    u0 = P[0]
    depth = {_canon(P): 0}
    layer = [P]
    root_rotates = False
    for t in range(1, 2 * T + 1):
        nxt = []
        for Q in layer:
            for child in _rotation_children(G.adj, Q):
                key = _canon(child)
                if key not in depth:
                    depth[key] = t
                    nxt.append(child)
        if len(depth) > cap:
            raise CapacityError(f"rotation closure exceeds {cap} paths")
        if t == 1:
            root_rotates = bool(nxt)
        layer = nxt

    def within(md, hi):
        return 1 <= md <= hi or (md == 0 and root_rotates and hi >= 2)

    end = set()
    for key, md in depth.items():
        if within(md, T):
            end.update(e for e in (key[0], key[-1]) if e != u0)
    end_x = {x: set() for x in end}
    for key, md in depth.items():
        if within(md, 2 * T):
            a, b = key[0], key[-1]
            if a in end_x:
                end_x[a].add(b)
            if b in end_x:
                end_x[b].add(a)
    return EndSets(frozenset(end), {x: frozenset(s) for x, s in end_x.items()})


def outcome_report(outcome: HamOutcome, G=None, end_cap: int = 200_000) -> dict:
    """JSON-ready summary; failure traces add |H(G)| and END-set sizes."""
    rep = {
        "status": outcome.status,
        "T": outcome.T,
        "d": outcome.d,
        "mode": outcome.mode,
        "counters": outcome.counters.as_dict(),
    }
    if outcome.cycle is not None:
        rep["cycle"] = list(outcome.cycle)
    if outcome.trace is not None:
        tr = outcome.trace
        rep["stage"] = tr.stage
        rep["h_size"] = len(tr.h_set)
        rep["end_size"] = None
        rep["end_min_x_size"] = None
        if G is not None and outcome.status == "failure":
            try:
                es = end_sets(G, tr, tr.T, cap=end_cap)
            except CapacityError:
                pass
            else:
                rep["end_size"] = es.size
                rep["end_min_x_size"] = es.min_x_size
    return rep
