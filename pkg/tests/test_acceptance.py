"""Acceptance checks, one test per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line that is repeated in the terminal summary.
"""

import time

import numpy as np
import pytest

from strobo import classical, su2
from strobo.clock import ClockDistribution
from strobo.evolution import Propagator, StateVector, compose_check, discrete_step, evolution_matrix, unitarity_defect
from strobo.lattice import (AngularGrid, MomentumGrid, build_case_a, build_case_b, build_effective_hamiltonian,
                            case_a_eigenvalues, case_b_eigenvalues, conservation_residual, effective_symbol,
                            plane_wave)
from strobo.reporting import labelled_spectrum, oscillator_builder
from strobo.spectral import convergence_study, eig

NS = (4, 16, 64, 256)
OMEGAS = (1.0, 2 * np.pi)
DELTAS = (0.0, -0.5, 0.3)


def test_c01_oscillator_spectra(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for N in NS:
        for om in OMEGAS:
            for d in DELTAS:
                grid = AngularGrid(N, om, d)
                for model in ("osc-a", "osc-b"):
                    # dense LAPACK path: independent of the closed forms
                    numeric, formula = labelled_spectrum(model, grid, solver="dense")
                    worst = max(worst, float(np.abs(numeric - formula).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10
    verdict("criterion 1", ok, f"max |E - formula| = {worst:.2e} (tol 1e-10), {elapsed:.1f} s (limit 10 s)")
    assert ok


def test_c02_finite_n_link(verdict):
    worst_re, worst_im = 0.0, np.inf
    for N in NS:
        for om in OMEGAS:
            for d in DELTAS:
                grid = AngularGrid(N, om, d)
                ra, rb = eig(build_case_a(grid)), eig(build_case_b(grid))
                for m in grid.modes:
                    ea, eb = ra.by_label(m), rb.by_label(m)
                    worst_re = max(worst_re, abs(ea.real - eb.real))
                    worst_im = min(worst_im, ea.imag)
    ok = worst_re <= 1e-12 and worst_im >= -1e-14
    verdict("criterion 2", ok, f"max |Re E_A - E_B| = {worst_re:.2e} (tol 1e-12), min Im E_A = {worst_im:.2e}")
    assert ok


def test_c03_continuum_orders(verdict):
    Ns = [64, 128, 256, 512, 1024, 2048, 4096]
    t0 = time.perf_counter()
    ref = lambda N: [1.0 * (1 - 0.5)]
    rep_b = convergence_study(oscillator_builder("osc-b", 1.0, -0.5), ref, Ns, modes=(1,))
    rep_a = convergence_study(oscillator_builder("osc-a", 1.0, -0.5), ref, Ns, modes=(1,))
    elapsed = time.perf_counter() - t0
    ok = (rep_b.accepted and abs(rep_b.fitted_order + 2) <= 0.1
          and rep_a.accepted and abs(rep_a.fitted_order + 1) <= 0.1 and elapsed < 60)
    verdict("criterion 3 (orders)", ok,
            f"Case B order {rep_b.fitted_order:.4f}, Case A order {rep_a.fitted_order:.4f}, {elapsed:.1f} s")
    assert ok


def test_c03_oscillator_levels_at_4096(verdict):
    grid = AngularGrid(4096, 1.0, -0.5)
    rep = eig(build_case_b(grid))
    m = np.arange(1, 9)
    got = np.array([rep.by_label(k).real for k in m])
    err = np.abs(got - (m - 0.5))
    ok = bool(err.max() <= 1e-5)
    verdict("criterion 3 (levels)", ok,
            f"max |E_m - (m - 1/2)| over m=1..8 = {err.max():.3e} (tol 1e-5); "
            f"passing modes m<={int(m[err <= 1e-5].max()) if (err <= 1e-5).any() else 0}")
    assert ok


def test_c04_su2_identities(verdict):
    worst_id, worst_lev = 0.0, 0.0
    for two_s in (1, 2, 5, 20, 100):
        for om in OMEGAS:
            rep = su2.spin_matrices(two_s)
            coeffs = su2.OscCoefficients.canonical(two_s, om)
            worst_id = max(worst_id, su2.verify_identities(rep, coeffs).worst)
            levels = np.linalg.eigvalsh(su2.oscillator_energy(rep, coeffs).toarray())
            worst_lev = max(worst_lev, float(np.abs(levels - np.sort(su2.oscillator_levels(two_s, om))).max()))
    ok = worst_id <= 1e-10 and worst_lev <= 1e-10
    verdict("criterion 4", ok, f"worst identity residual {worst_id:.2e}, worst level error {worst_lev:.2e} (tol 1e-10)")
    assert ok


def test_c05_positivity(verdict):
    om = 1.0
    lows, bads, fact = [], [], 0.0
    for two_s in (1, 2, 3, 5):
        rep = su2.spin_matrices(two_s)
        H = su2.emergent_hamiltonian(rep, om)
        lows.append(float(np.linalg.eigvalsh(H.toarray()).min()))
        fact = max(fact, float(abs(H.entries - su2.factorized_hamiltonian(rep, om).entries).max()))
        bads.append(float(np.linalg.eigvalsh(su2.bad_phase_hamiltonian(rep, om).toarray()).min()))
    ok = min(lows) >= 3 * om and fact == 0.0 and max(bads) <= -om
    verdict("criterion 5", ok, f"min emergent eigenvalue {min(lows):.6g} (>= 3), factorization diff {fact:.1e}, "
                               f"bad-phase minima {[round(b, 3) for b in bads]}")
    assert ok


def test_c06_lattice_crosscheck(verdict):
    checks = [su2.lattice_crosscheck(two_s) for two_s in (1, 2, 3)]
    ok = all(c.passed for c in checks)
    verdict("criterion 6", ok, ", ".join(f"s={c.two_s / 2}: {c.onshell_count} modes, err {c.max_pointwise_error}"
                                         for c in checks))
    assert ok


def test_c07_evolution(verdict):
    H = build_case_b(AngularGrid(32, 1.0, -0.5))
    comp = max(compose_check(H, a, b) for a, b in [(0.3, 0.7), (1.5, -0.4), (2.0, 3.0)])
    unit = max(unitarity_defect(evolution_matrix(H, tau)) for tau in (0.1, 1.0, 10.0))
    rng = np.random.default_rng(7)
    psi = StateVector.of(rng.normal(size=32) + 1j * rng.normal(size=32), H)
    prop = Propagator(H)
    T = 1.0
    exact = prop.apply(T, psi.amplitudes)
    clocks = {"delta": ClockDistribution.delta(), "gaussian": ClockDistribution.gaussian(1.0),
              "uniform": ClockDistribution.uniform(2.0)}
    step_err = {k: float(np.linalg.norm(discrete_step(psi, H, c, T, 64, prop).amplitudes - exact))
                for k, c in clocks.items()}
    double = discrete_step(discrete_step(psi, H, clocks["gaussian"], T, 64, prop), H, clocks["gaussian"], T, 64, prop)
    single = discrete_step(psi, H, clocks["gaussian"], 2 * T, 64, prop)
    dbl = float(np.linalg.norm(double.amplitudes - single.amplitudes))
    ok = comp <= 1e-10 and unit <= 1e-12 and max(step_err.values()) <= 1e-8 and dbl <= 1e-8
    verdict("criterion 7", ok, f"composition {comp:.1e}, unitarity {unit:.1e}, "
                               f"clock steps {max(step_err.values()):.1e}, double step {dbl:.1e}")
    assert ok


def test_c08_liouville_vs_rk4(verdict):
    system = classical.harmonic_oscillator(omega=1.3)
    x0 = np.array([0.7, -0.4])
    taus = np.linspace(0, 10, 41)
    x, worst = x0, 0.0
    for t_prev, t in zip(taus[:-1], taus[1:]):
        x = classical.integrate_trajectory(system, x, t - t_prev, step=1e-3)
        worst = max(worst, float(np.abs(x - classical.liouville_propagate(system, x0, t)).max()))
    ok = worst <= 1e-6
    verdict("criterion 8", ok, f"max trajectory difference {worst:.2e} over tau in [0, 10] (tol 1e-6)")
    assert ok


def test_c09_conservation(verdict):
    worst = 0.0
    for two_s in (1, 2, 3, 5):
        rep = su2.spin_matrices(two_s)
        Hcal = su2.emergent_hamiltonian(rep, 1.0)
        h = su2.h_operator(rep).toarray()
        for slot in range(3):
            Hj = su2.embed(rep, h, slot)
            worst = max(worst, float(abs((Hj @ Hcal - Hcal @ Hj).entries).max()))
    system = classical.harmonic_oscillator(1.0)
    res = [conservation_residual(system, MomentumGrid.symmetric(M, 2)) for M in (32, 64, 128)]
    mono = res[0] > res[1] > res[2]
    ok = worst <= 1e-10 and mono
    verdict("criterion 9", ok, f"su2 commutator {worst:.1e}; lattice residuals " + ", ".join(f"{r:.2e}" for r in res))
    assert ok


@pytest.mark.parametrize("label", ["oscillator", "free particle"])
def test_c10_generic_builder(verdict, label):
    system = classical.harmonic_oscillator(1.7) if label == "oscillator" else classical.free_particle(1, mass=0.8)
    grid = MomentumGrid.symmetric(32, 2)
    H = build_effective_hamiltonian(system, grid)
    pi = np.array(grid.mesh())
    interior = (slice(2, -2), slice(2, -2))
    worst = 0.0
    for modes in [(0, 1), (1, 0), (2, -3), (-5, 4), (7, 7)]:
        v, kappa = plane_wave(grid, modes)
        lhs = (H.apply(v)).reshape(grid.points)
        rhs = effective_symbol(system, pi, kappa) * v.reshape(grid.points)
        worst = max(worst, float(np.abs(lhs - rhs)[interior].max()))
    ok = worst <= 1e-8
    verdict(f"criterion 10 ({label})", ok, f"max interior |H v - symbol v| = {worst:.2e} (tol 1e-8)")
    assert ok
