"""Square-root utility in quality: the symmetric configuration and what follows it.

Below theta = 1/(4 sqrt 2) the symmetric configuration (1/4, 3/4, 1/2) is the
unique optimum.  Past that point the solver finds an asymmetric interior
optimum that beats both the symmetric and the single-facility configurations,
until the single facility takes over near theta = 1/4.

Run: python demos/03_square_root_quality.py
"""
# %%
import math

from hotelling_quality import Preferences, solve
from hotelling_quality.theorems import corner_welfare, symmetric_welfare, verify_theorem2

print("range edge 1/(4 sqrt 2) =", 1 / (4 * math.sqrt(2)))

# %%
for theta in (0.05, 0.1, 0.17):
    res = verify_theorem2(theta)
    print(f"theta={theta}: {'PASSED' if res.passed else 'FAILED'} W*={res.details['welfare_star']:.10f} margin={res.details['margin']:.5f}")

# %% beyond the characterised range
print(f"{'theta':>6} {'structure':>14} {'a':>8} {'b':>8} {'q':>8} {'W*':>10} {'W sym':>10} {'W corner':>10}")
for theta in (0.17, 0.18, 0.19, 0.2, 0.2134, 0.22, 0.24, 0.26):
    rep = solve(Preferences(theta, 0.5), 101)
    cfg = rep.optima[0].config
    if cfg.q > 0.5:
        cfg = cfg.mirror()
    print(
        f"{theta:6.4f} {rep.structure.value:>14} {cfg.a:8.4f} {cfg.b:8.4f} {cfg.q:8.4f} "
        f"{rep.welfare_star:10.6f} {symmetric_welfare(theta, 0.5):10.6f} {corner_welfare(theta):10.6f}"
    )
