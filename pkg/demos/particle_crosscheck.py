"""Massless particle on a 1+1 phase-space lattice versus three coupled spins.

Run with ``python3 demos/particle_crosscheck.py``.
"""
from strobo import su2
from strobo.reporting import particle_table

for two_s in (1, 2, 3):
    check = su2.lattice_crosscheck(two_s)
    print(f"s={two_s / 2}: {check.onshell_count} on-shell modes, tensor dim {check.tensor_dim}, "
          f"max error {check.max_pointwise_error}, passed={check.passed}")

columns, rows = particle_table(1, L=6.283185307179586, mass=1.0)
print("\n" + "  ".join(columns[:7] + ["reduced", "emergent"]))
for r in rows:
    print("  ".join(f"{v:>5}" for v in r[:7]) + f"  {r[7]:>7}  {r[9]:>8}")
