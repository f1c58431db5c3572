"""How fast the discretized spectra approach the oscillator levels as N grows.

Run with ``python3 demos/continuum_convergence.py``. Writes ``convergence.svg``
next to the current directory when matplotlib is available.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from strobo.reporting import convergence_result

Ns = [64, 128, 256, 512, 1024, 2048, 4096]
fig, ax = plt.subplots(figsize=(5, 4))
for model, label in (("osc-a", "one-sided"), ("osc-b", "centered")):
    res = convergence_result(model, mode=1, omega=1.0, delta=-0.5, Ns=Ns)
    print(f"{label:10s} fitted order {res['fitted_order']:+.4f}  R^2={res['r_squared']:.6f}  accepted={res['accepted']}")
    ax.loglog(res["Ns"], res["errors"], "o-", label=f"{label} ({res['fitted_order']:.2f})")

ax.set_xlabel("N")
ax.set_ylabel("|E_1 - Omega/2|")
ax.legend()
fig.savefig("convergence.svg", metadata={"Date": None})
print("wrote convergence.svg")
