"""Sweep theta for both exponents and locate the regime changes.

Writes regime_diagram.csv (and regime_diagram.png if matplotlib is
installed) to the current directory.

Run: python demos/04_regime_diagram.py
"""
# %%
import csv

from hotelling_quality.theorems import detect_threshold, sweep_theta

rows = {g: sweep_theta(0.02, 0.4, 39, gamma=g, resolution=81) for g in (1.0, 0.5)}

with open("regime_diagram.csv", "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["gamma", "theta", "a", "b", "q", "jhat", "welfare", "regime"])
    for g, rs in rows.items():
        for r in rs:
            w.writerow([g, r.theta, r.a, r.b, r.q, r.jhat, r.welfare, r.regime])

# %%
print("gamma=1   threshold:", detect_threshold(1.0, (0.1, 0.4), 1e-5, resolution=101))
print("gamma=1/2 symmetric -> asymmetric:", detect_threshold(0.5, (0.15, 0.2), 1e-5, resolution=101))
print("gamma=1/2 asymmetric -> single facility:", detect_threshold(0.5, (0.2, 0.3), 1e-5, resolution=101))

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, (g, rs) in zip(axes, rows.items()):
        th = [r.theta for r in rs]
        ax.plot(th, [r.q for r in rs], label="q (left quality)")
        ax.plot(th, [r.jhat for r in rs], label="split point")
        ax.plot(th, [r.a for r in rs], "--", label="a")
        ax.plot(th, [r.b for r in rs], "--", label="b")
        ax.set_title(f"gamma = {g}")
        ax.set_xlabel("theta")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig("regime_diagram.png", dpi=120)
    print("wrote regime_diagram.png")
