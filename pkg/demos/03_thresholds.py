"""Choosing p so the graph sits at a given offset c from the min-degree threshold.

p solves p (1 - (1 - p)^(n-1)) = (ln n + ln a_n + c) / m, where a_n = 1 when m
is well below n ln n / ln ln n and a_n = np ln n / (e^np - 1) when m is well above.
"""
import math

from rig.errors import RegimeError
from rig.thresholds import a_n, limit_min_degree_prob, regime_pivot, solve_p

n = 1000
print(f"regime pivot n ln n / ln ln n = {regime_pivot(n):.1f}")
for m in (1000, 3574, 10**6):
    try:
        s = solve_p(n, m, 0.0)
        print(f"m={m:>7}: branch={s.a_branch:<12} a_n={s.a_n:.5f} p={s.p:.6g} "
              f"residual={s.residual:.1e} iterations={s.iterations}")
    except RegimeError as err:
        print(f"m={m:>7}: excluded ({err})")

print("a_n at np = 2:", a_n(n, 10**6, 2e-3).value, " vs 2 ln n / (e^2 - 1) =",
      2 * math.log(n) / math.expm1(2))
for c in (-1, 0, 1, 2, 4):
    print(f"c={c:+}: limiting Pr[min degree >= 2] = {limit_min_degree_prob(c):.4f}")
