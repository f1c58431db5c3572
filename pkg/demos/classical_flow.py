"""Classical side: trajectories, the Liouville exponential, and the effective operator.

Run with ``python3 demos/classical_flow.py``.
"""
import numpy as np

from strobo import classical
from strobo.lattice import MomentumGrid, build_effective_hamiltonian, conservation_residual

osc = classical.harmonic_oscillator(omega=1.0)
x0 = [1.0, 0.0]
for tau in (0.5, 2.0, 10.0):
    rk = classical.integrate_trajectory(osc, x0, tau)
    ex = classical.liouville_propagate(osc, x0, tau)
    print(f"tau={tau:5.1f}  RK4 {np.round(rk, 8)}  exp {np.round(ex, 8)}  H-eps={classical.constraint_residual(osc, ex):+.2e}")

# The emergent operator conserves the classical energy only for resolved states.
for M in (32, 64, 128):
    grid = MomentumGrid.symmetric(M, 2)
    H = build_effective_hamiltonian(osc, grid)
    print(f"grid {M}x{M}: nnz={H.entries.nnz:7d}  ||[H(phi), Hcal] psi|| = {conservation_residual(osc, grid):.2e}")
