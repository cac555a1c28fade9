"""Utility, catchment split and aggregate welfare for a few configurations.

Run: python demos/01_welfare_basics.py
"""
# %%
from hotelling_quality import FacilityConfig, Preferences, assign, indifferent_point, utility
from hotelling_quality.welfare import welfare_closed_form, welfare_gradient, welfare_quadrature

prefs = Preferences(theta=0.1, gamma=1.0)

# %% one individual, two facilities
# the person at 0.3 is exactly indifferent between a poor nearby facility
# and a good distant one
cfg = FacilityConfig(0.15, 0.65, 0.0)
print("u(0.3 -> a) =", utility(0.3, cfg.a, cfg.q, prefs))
print("u(0.3 -> b) =", utility(0.3, cfg.b, 1 - cfg.q, prefs))
print("split point  =", indifferent_point(cfg, prefs).jhat)
print("0.30 goes to", assign(0.30, cfg, prefs).value, "| 0.35 goes to", assign(0.35, cfg, prefs).value)

# %% welfare two ways: closed form and integrating individual choices
for c in [FacilityConfig(0.25, 0.75, 0.5), cfg, FacilityConfig(0.5, 0.5, 0.5), FacilityConfig(0.4, 0.6, 1.0)]:
    cf = welfare_closed_form(c, prefs)
    qd = welfare_quadrature(c, prefs, n=16)
    print(f"{c.as_tuple()!s:22} regime={cf.regime.value:10} W={cf.value:+.12f}  quad={qd.value:+.12f}")

# %% first-order conditions: the symmetric point is stationary for both exponents
for gamma in (1.0, 0.5):
    g = welfare_gradient(FacilityConfig(0.25, 0.75, 0.5), Preferences(0.1, gamma))
    print(f"gamma={gamma}: grad = ({g.d_a:.1e}, {g.d_b:.1e}, {g.d_q:.1e})")
# but under linear utility shifting quality is still profitable away from it
g = welfare_gradient(FacilityConfig(0.2, 0.7, 0.5), prefs)
print("at (0.2, 0.7, 0.5):", g.as_array())
