"""Finite-spin realization of the oscillator and the positive three-oscillator Hamiltonian.

Run with ``python3 demos/su2_identities.py``.
"""
import numpy as np

from strobo import su2

print("   s    worst identity residual   lowest levels of p^2/2 + q^2/2")
for two_s in (1, 2, 5, 20, 100):
    rep = su2.spin_matrices(two_s)
    coeffs = su2.OscCoefficients.canonical(two_s, omega=1.0)
    res = su2.verify_identities(rep, coeffs)
    levels = np.sort(np.linalg.eigvalsh(su2.oscillator_energy(rep, coeffs).toarray()))
    print(f"{two_s / 2:5.1f}   {res.worst:.2e}                  {np.round(levels[:4], 4)}")

# The levels only resemble n + 1/2 for n well below s; they bend back near the top.
print("\nfull s=5 ladder:", np.round(su2.oscillator_levels(10, 1.0), 3))

rep = su2.spin_matrices(3)
good = su2.emergent_hamiltonian(rep, 1.0).entries.diagonal().real
bad = su2.bad_phase_hamiltonian(rep, 1.0).entries.diagonal().real
print(f"\ns=3/2 emergent Hamiltonian: min {good.min()}  max {good.max()}")
print(f"s=3/2 with symmetric phases: min {bad.min()}  (indefinite)")
