"""Finding a Hamilton cycle with rotation-extension search.

The search grows a path one vertex at a time; when the endpoint has no
unvisited neighbour it rotates the path along chords (breadth first, at most
2T + 1 rotations) until an endpoint can extend or the path closes into a cycle.
"""
from rig.ham import end_sets, outcome_report, run_ham, validate_cycle
from rig.model import derived_params, intersection_of, sample_bipartite
from rig.oracle import is_hamiltonian_bruteforce
from rig.thresholds import solve_p

n = 800
p = solve_p(n, n, 2.0).p          # comfortably above the min-degree threshold
G = intersection_of(sample_bipartite(n, n, p, seed=3))
d = derived_params(n, n, p).d
out = run_ham(G, d)
print(f"n={n} p={p:.5f} T={out.T} -> {out.status}")
print("counters:", out.counters.as_dict())
if out.success:
    print("cycle valid:", validate_cycle(G, out.cycle))

# below the threshold the search often fails; END sets describe the endpoints
# reachable by rotation at the failing stage, and the exact oracle tells
# whether the failure was forced
n = 18
p = solve_p(n, n, -0.5).p
for seed in range(200):
    G = intersection_of(sample_bipartite(n, n, p, seed=seed))
    out = run_ham(G, derived_params(n, n, p).d)
    if out.status != "failure":
        continue
    ends = end_sets(G, out.trace, out.T)
    if ends.size:
        print(f"seed {seed}: failed at stage {out.stage}, |H| = {len(out.trace.h_set)}, "
              f"|END| = {ends.size}, min |END(x)| = {ends.min_x_size}")
        print("exact oracle says Hamiltonian:", is_hamiltonian_bruteforce(G).hamiltonian)
        print(outcome_report(out, G))
        break
