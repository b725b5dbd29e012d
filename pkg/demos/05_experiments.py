"""Monte Carlo experiments: min-degree threshold and HAM success above it.

The same runs are available from the command line, e.g.
    rig exp --kind joint_failure --n 200,400 --m-rule n --c 2 --trials 50 --out runs/jf
"""
import math
import tempfile

from rig.experiments import ExperimentConfig, run_trials, write_outputs
from rig.thresholds import limit_min_degree_prob

cfg = ExperimentConfig(kind="min_degree", n=1000, m_rule="n", c=(0.0, 1.0), trials=200,
                       master_seed=2026, workers=1)
res = run_trials(cfg)
for g in res.summary["groups"]:
    r = g["min_degree_ge2"]
    print(f"c={g['c']}: Pr[min deg >= 2] = {r['rate']:.3f} ci95={r['ci95']}, "
          f"limit {limit_min_degree_prob(g['c']):.3f}")

cfg = ExperimentConfig(kind="complexity", n=(100, 200, 400), m_rule="n", c=2.0, trials=20,
                       master_seed=7, workers=1)
res = run_trials(cfg)
cx = res.summary["complexity"]
print("rotation counts:", dict(zip(cx["n"], cx["rotations_mean"])),
      "log-log slope:", round(cx["loglog_slope"], 3))

with tempfile.TemporaryDirectory() as tmp:
    out = write_outputs(res, tmp)
    print("wrote", sorted(p.name for p in out.iterdir()))
