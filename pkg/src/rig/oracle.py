"""Ground truth for small instances: exact Hamiltonicity and brute-force edges."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

MAX_ORACLE_N = 20


@dataclass(frozen=True)
class OracleVerdict:
    hamiltonian: bool
    witness_cycle: tuple | None = None


def is_hamiltonian_bruteforce(G) -> OracleVerdict:
    """Subset DP over paths anchored at vertex 0.

    ``reach[S]`` is a bitmask over vertices ``1..n-1`` (bit ``j`` for vertex
    ``j+1``) of the endpoints ``x`` such that some path starts at 0, visits
    exactly ``S`` besides 0, and ends at ``x``.  Masks are processed in layers
    of equal popcount so each layer is a handful of vectorized updates.
    """
    n = G.n
    if n > MAX_ORACLE_N:
        raise CapacityError(f"exact Hamiltonicity is capped at n={MAX_ORACLE_N}, got {n}")
    if n < 3:
        return OracleVerdict(False)
    k = n - 1
    nbr = np.zeros(k, dtype=np.int64)
    start = 0
    for u in G.adj[0]:
        start |= 1 << (u - 1)
    for v in range(1, n):
        for u in G.adj[v]:
            if u:
                nbr[v - 1] |= 1 << (u - 1)
    size = 1 << k
    masks = np.arange(size, dtype=np.int64)
    pop = np.zeros(size, dtype=np.int8)
    for j in range(k):
        pop += ((masks >> j) & 1).astype(np.int8)
    order = np.argsort(pop, kind="stable")
    bounds = np.searchsorted(pop[order], np.arange(k + 2))

    reach = np.zeros(size, dtype=np.int64)
    for j in range(k):
        if start >> j & 1:
            reach[1 << j] = 1 << j
    for r in range(2, k + 1):
        layer = order[bounds[r]:bounds[r + 1]]
        for j in range(k):
            bit = 1 << j
            sel = layer[(layer & bit) != 0]
            ok = (reach[sel ^ bit] & nbr[j]) != 0
            reach[sel[ok]] |= bit
    full = size - 1
    ends = int(reach[full]) & start
    if not ends:
        return OracleVerdict(False)

    # walk back from an endpoint adjacent to 0
    j = (ends & -ends).bit_length() - 1
    S = full
    seq = [j]
    while S != (1 << j):
        S ^= 1 << j
        cand = int(reach[S]) & int(nbr[j])
        j = (cand & -cand).bit_length() - 1
        seq.append(j)
    cycle = (0,) + tuple(x + 1 for x in reversed(seq))
    return OracleVerdict(True, cycle)


def edges_bruteforce(B) -> frozenset:
    """Edge set by testing every vertex pair for a shared feature (expects n*m <= 1e6)."""
    sets = [set(ws) for ws in B.chose]
    out = set()
    for u in range(B.n):
        su = sets[u]
        for v in range(u + 1, B.n):
            if not su.isdisjoint(sets[v]):
                out.add((u, v))
    return frozenset(out)
