"""Finite matrix representations of the emergent Hamilton operator.

Three discretizations live here:

* the angular grid of the oscillator, ``-i Omega d/dphi`` on ``N`` sites with a
  twisted periodic boundary (Case A: one-sided difference, Case B: centered);
* a periodic momentum grid on which ``phi_hat = -i d/dpi`` acts by Fourier
  differentiation and ``pi`` by multiplication, used for the generic operator
  ``-pi . omega . grad H(phi_hat)`` of any polynomial system;
* the hypercubic phase-space lattice of the free relativistic particle, whose
  spectrum is closed-form per mode and therefore enumerated, not diagonalized.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .classical import ClassicalSystem, Polynomial
from .errors import ContractViolation, ResolutionError, ResourceError, UnsupportedSystemError
from .operator import Basis, OperatorMatrix

log = logging.getLogger(__name__)

MAX_GRID_DIM = 2**14
MAX_LATTICE_ENTRIES = 2**22


# -- oscillator on the angular grid -------------------------------------------

@dataclass(frozen=True)
class AngularGrid:
    """``N`` sites ``phi_n = 2 pi n / N`` (n = 1..N) with wrap phase ``exp(2 pi i delta)``."""

    N: int
    omega: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ContractViolation("angular grid needs N >= 2 sites")
        if not self.omega > 0:
            raise ContractViolation("omega must be positive")

    @property
    def sites(self) -> np.ndarray:
        return 2 * np.pi * np.arange(1, self.N + 1) / self.N

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.N + 1)

    def basis(self, case: str) -> Basis:
        return Basis("angular-grid", (self.N,),
                     (("omega", self.omega), ("delta", self.delta), ("case", case)))


def twisted_shift(N: int, delta: float) -> sp.csr_matrix:
    """``(T psi)_n = psi_{n+1}``, with ``psi_{N+1} = exp(2 pi i delta) psi_1``."""
    rows = np.arange(N)
    cols = (rows + 1) % N
    vals = np.ones(N, dtype=complex)
    vals[-1] = np.exp(2j * np.pi * delta)
    return sp.csr_matrix((vals, (rows, cols)), shape=(N, N))


def build_case_a(grid: AngularGrid) -> OperatorMatrix:
    """One-sided difference ``-i (Omega N / 2 pi) (T - 1)``; not Hermitian."""
    N = grid.N
    T = twisted_shift(N, grid.delta)
    H = -1j * grid.omega * N / (2 * np.pi) * (T - sp.identity(N, dtype=complex, format="csr"))
    return OperatorMatrix(H, grid.basis("A"))


def build_case_b(grid: AngularGrid) -> OperatorMatrix:
    """Centered difference ``-i (Omega N / 4 pi) (T - T^H)``; Hermitian."""
    T = twisted_shift(grid.N, grid.delta)
    H = -1j * grid.omega * grid.N / (4 * np.pi) * (T - T.conj().T)
    return OperatorMatrix(H, grid.basis("B"))


def case_a_eigenvalues(grid: AngularGrid) -> np.ndarray:
    """Closed form ``i (Omega N / 2 pi)(1 - exp[2 pi i (m + delta)/N])`` for m = 1..N."""
    theta = 2 * np.pi * (grid.modes + grid.delta) / grid.N
    return 1j * grid.omega * grid.N / (2 * np.pi) * (1 - np.exp(1j * theta))


def case_b_eigenvalues(grid: AngularGrid) -> np.ndarray:
    """Closed form ``(Omega N / 2 pi) sin[2 pi (m + delta)/N]`` for m = 1..N."""
    theta = 2 * np.pi * (grid.modes + grid.delta) / grid.N
    return grid.omega * grid.N / (2 * np.pi) * np.sin(theta)


def angular_eigenfunction(grid: AngularGrid, m: int) -> np.ndarray:
    """Normalized plane wave ``N^{-1/2} exp(i (m + delta) phi_n)``."""
    return np.exp(1j * (m + grid.delta) * grid.sites) / math.sqrt(grid.N)


# -- generic operator on a periodic momentum grid -----------------------------

@dataclass(frozen=True)
class MomentumGrid:
    """Periodic grid over the momenta ``pi_a`` conjugate to the phase-space coordinates.

    Axis ``a`` has ``points[a]`` sites spanning a box of length ``extent[a]``,
    centered on zero (principal-value coordinates, so multiplication by
    ``pi_a`` is a sawtooth across the wrap).
    """

    points: tuple[int, ...]
    extent: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) != len(self.extent) or not self.points:
            raise ContractViolation("points and extent need one entry per axis")
        if any(M < 2 or M % 2 for M in self.points):
            raise ContractViolation("every axis needs an even number of points >= 2")
        if any(not L > 0 for L in self.extent):
            raise ContractViolation("extents must be positive")

    @classmethod
    def symmetric(cls, M: int, naxes: int) -> "MomentumGrid":
        """Box ``sqrt(2 pi M)`` so that spacing and resolved bandwidth scale alike."""
        L = math.sqrt(2 * math.pi * M)
        return cls((M,) * naxes, (L,) * naxes)

    @property
    def naxes(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return int(np.prod(self.points))

    @property
    def basis(self) -> Basis:
        return Basis("momentum-grid", tuple(self.points), (("extent", tuple(self.extent)),))

    def spacing(self, axis: int) -> float:
        return self.extent[axis] / self.points[axis]

    def coords(self, axis: int) -> np.ndarray:
        M = self.points[axis]
        return (np.arange(M) - M // 2) * self.spacing(axis)

    def wavenumbers(self, axis: int) -> np.ndarray:
        """Fourier frequencies of the axis; the Nyquist mode is dropped (set to 0)."""
        M = self.points[axis]
        k = 2 * np.pi * np.fft.fftfreq(M, self.spacing(axis))
        k[M // 2] = 0.0
        return k

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*[self.coords(a) for a in range(self.naxes)], indexing="ij")


def fourier_power(grid: MomentumGrid, axis: int, power: int) -> np.ndarray:
    """Dense ``M x M`` matrix of ``phi_hat^power`` along one axis, ``phi_hat = -i d/dpi``."""
    M = grid.points[axis]
    symbol = grid.wavenumbers(axis) ** power
    F = np.fft.fft(np.eye(M), axis=0)
    return np.fft.ifft(symbol[:, None] * F, axis=0)


def _embed(factors: dict[int, np.ndarray], grid: MomentumGrid) -> sp.csr_matrix:
    out = None
    for a in range(grid.naxes):
        f = factors.get(a)
        f = sp.identity(grid.points[a], dtype=complex, format="csr") if f is None else sp.csr_matrix(f)
        out = f if out is None else sp.kron(out, f, format="csr")
    return out


def _check_dim(grid: MomentumGrid):
    if grid.dim > MAX_GRID_DIM:
        raise ResourceError(f"grid dimension {grid.dim} exceeds cap {MAX_GRID_DIM}")


def _polynomial_operator(poly: Polynomial, grid: MomentumGrid) -> sp.csr_matrix:
    if poly.nvars != grid.naxes:
        raise ContractViolation(f"polynomial has {poly.nvars} variables, grid has {grid.naxes} axes")
    for a in range(grid.naxes):
        # beyond degree M-2 the monomials alias onto lower ones on the M-1 resolved modes
        if poly.degree_in(a) > grid.points[a] - 2:
            raise ResolutionError(
                f"degree {poly.degree_in(a)} in variable {a} too high for {grid.points[a]} points"
            )
    cache: dict[tuple[int, int], np.ndarray] = {}
    out = sp.csr_matrix((grid.dim, grid.dim), dtype=complex)
    for exps, c in poly.terms.items():
        factors = {}
        for a, e in enumerate(exps):
            if e:
                if (a, e) not in cache:
                    cache[(a, e)] = fourier_power(grid, a, e)
                factors[a] = cache[(a, e)]
        out = out + c * _embed(factors, grid)
    return out


def observable_operator(poly: Polynomial, grid: MomentumGrid) -> OperatorMatrix:
    """Matrix of the classical observable ``O(phi_hat)``.

    The ``phi_hat`` components act on different axes (or are powers of one
    matrix), so they commute and monomials need no ordering prescription.
    """
    _check_dim(grid)
    return OperatorMatrix(_polynomial_operator(poly, grid), grid.basis)


def momentum_multiplier(grid: MomentumGrid, axis: int) -> sp.csr_matrix:
    """Diagonal multiplication by the principal-value coordinate ``pi_axis``."""
    return sp.diags(grid.mesh()[axis].ravel().astype(complex), format="csr")


def build_effective_hamiltonian(system: ClassicalSystem, grid: MomentumGrid) -> OperatorMatrix:
    """``-sum_ab pi_a omega^{ab} (dH/dphi^b)(phi_hat)`` on the momentum grid."""
    if system.gradient_poly is None:
        raise UnsupportedSystemError(
            f"{system.label}: gradient is not registered as polynomials, cannot build the operator"
        )
    if grid.naxes != system.dim:
        raise ContractViolation(f"grid needs {system.dim} axes, has {grid.naxes}")
    _check_dim(grid)
    n = system.n
    H = sp.csr_matrix((grid.dim, grid.dim), dtype=complex)
    for j in range(n):
        # omega^{q_j p_j} = +1, omega^{p_j q_j} = -1
        g_p = system.gradient_poly[n + j]
        g_q = system.gradient_poly[j]
        if not g_p.is_zero():
            H = H - momentum_multiplier(grid, j) @ _polynomial_operator(g_p, grid)
        if not g_q.is_zero():
            H = H + momentum_multiplier(grid, n + j) @ _polynomial_operator(g_q, grid)
    H.eliminate_zeros()
    return OperatorMatrix(H, grid.basis, {"system": system.label})


def effective_symbol(system: ClassicalSystem, pi: np.ndarray, kappa) -> np.ndarray:
    """``-pi . omega . grad H(kappa)``: the action of the operator on ``exp(i kappa . pi)``.

    ``pi`` has shape ``(2n, ...)`` (one slab per axis); returns an array over the grid.
    """
    n = system.n
    g = np.array([complex(system.gradient_poly[b](kappa)) for b in range(2 * n)])
    out = np.zeros(pi.shape[1:], dtype=complex)
    for j in range(n):
        out += -pi[j] * g[n + j] + pi[n + j] * g[j]
    return out


def plane_wave(grid: MomentumGrid, modes) -> tuple[np.ndarray, np.ndarray]:
    """Band-limited plane wave ``exp(i kappa . pi)`` for integer mode numbers.

    Returns the flattened state and the wavevector ``kappa``.
    """
    modes = np.asarray(modes, dtype=int)
    if modes.shape != (grid.naxes,):
        raise ContractViolation("need one mode number per axis")
    for a, j in enumerate(modes):
        if abs(j) >= grid.points[a] // 2:
            raise ResolutionError(f"mode {j} on axis {a} is not below the Nyquist limit")
    kappa = 2 * np.pi * modes / np.asarray(grid.extent)
    phase = sum(k * x for k, x in zip(kappa, grid.mesh()))
    return np.exp(1j * phase).ravel(), kappa


def gaussian_state(grid: MomentumGrid, width: float = 2.0) -> np.ndarray:
    """Normalized centered Gaussian ``exp(-|pi|^2 / 2 width^2)`` on the grid."""
    r2 = sum(x**2 for x in grid.mesh())
    v = np.exp(-r2 / (2 * width**2)).ravel().astype(complex)
    return v / np.linalg.norm(v)


def conservation_residual(system: ClassicalSystem, grid: MomentumGrid,
                          state: np.ndarray | None = None, width: float = 2.0) -> float:
    """``||[H(phi_hat), Hcal] psi|| / ||psi||`` on a test state (default: centered Gaussian).

    Zero in the continuum; on a periodic grid the sawtooth ``pi`` spoils it near
    the wrap, so the value measures how well the state is resolved.
    """
    if system.gradient_poly is None:
        raise UnsupportedSystemError("system needs a polynomial gradient")
    Hcal = build_effective_hamiltonian(system, grid).entries
    Hobs = observable_operator(hamiltonian_polynomial(system), grid).entries
    psi = gaussian_state(grid, width) if state is None else np.asarray(state, dtype=complex)
    r = Hobs @ (Hcal @ psi) - Hcal @ (Hobs @ psi)
    return float(np.linalg.norm(r) / np.linalg.norm(psi))


def hamiltonian_polynomial(system: ClassicalSystem) -> Polynomial:
    if system.hamiltonian_poly is None:
        raise UnsupportedSystemError(f"{system.label}: Hamiltonian is not registered as a polynomial")
    return system.hamiltonian_poly


# -- constraint projector -----------------------------------------------------

def default_window(eigenvalues: np.ndarray, epsilon: float) -> float:
    """Half the gap between the eigenvalue nearest ``epsilon`` and its nearest distinct neighbour."""
    ev = np.unique(np.round(np.sort(eigenvalues), 10))
    if ev.size < 2:
        return 1.0
    i = int(np.argmin(np.abs(ev - epsilon)))
    gaps = [abs(ev[j] - ev[i]) for j in (i - 1, i + 1) if 0 <= j < ev.size]
    return 0.5 * min(gaps)


def constraint_projector(ham: OperatorMatrix, epsilon: float, window: float | None = None) -> OperatorMatrix:
    """Spectral projector of ``ham`` onto eigenvalues in ``[epsilon - window, epsilon + window]``.

    ``window=None`` uses half the local eigenvalue gap. An empty window gives the
    zero matrix; ``info["rank"]`` records the projector rank either way.
    """
    if not ham.hermitian:
        raise ContractViolation("constraint projector needs a Hermitian operator")
    w, V = scipy.linalg.eigh(ham.toarray())
    if window is None:
        window = default_window(w, epsilon)
    if not window > 0:
        raise ContractViolation("window must be positive")
    sel = np.abs(w - epsilon) <= window
    Vs = V[:, sel]
    P = Vs @ Vs.conj().T
    P = 0.5 * (P + P.conj().T)
    rank = int(sel.sum())
    if rank == 0:
        log.warning("constraint window [%g, %g] contains no eigenvalue", epsilon - window, epsilon + window)
    return OperatorMatrix(P, ham.basis, {"rank": rank, "window": float(window), "empty": rank == 0})


# -- free relativistic particle on the hypercubic lattice ---------------------

@dataclass(frozen=True)
class HypercubicLattice:
    """Periodic phase-space lattice: ``N`` sites per axis, spacing ``l``, box ``L = N l``.

    Phases ``delta_x``, ``delta_xbar`` are in units of the momentum quantum
    ``2 pi / L``, so mode ``k`` carries momentum ``2 pi (k + delta) / L``.
    """

    N: int
    l: float
    dims: int = 2
    mass: float = 1.0
    delta_x: tuple[float, ...] = (0.0, 0.0)
    delta_xbar: tuple[float, ...] = (0.0, 0.0)

    def __post_init__(self):
        if self.dims not in (2, 4):
            raise ContractViolation("dims must be 2 or 4")
        if len(self.delta_x) != self.dims or len(self.delta_xbar) != self.dims:
            raise ContractViolation("phase vectors need one entry per dimension")
        if self.N < 1 or not self.l > 0 or not self.mass > 0:
            raise ContractViolation("need N >= 1, l > 0, mass > 0")

    @property
    def L(self) -> float:
        return self.N * self.l

    @property
    def metric(self) -> np.ndarray:
        return np.array([1.0] + [-1.0] * (self.dims - 1))

    @property
    def prefactor(self) -> float:
        """``(2 pi / (sqrt(m) L))^2``, the energy unit of the continuum spectrum."""
        return (2 * np.pi / self.L) ** 2 / self.mass


@dataclass(frozen=True)
class LatticeSpectrum:
    """Enumerated lattice modes.

    Attributes:
        k, kbar: integer mode labels, shape ``(entries, dims)``.
        energy: lattice eigenvalues (complex).
        reduced: Minkowski product ``(k + delta_x) . (kbar + delta_xbar)``.
        continuum: leading continuum energy ``prefactor * reduced``.
    """

    lattice: HypercubicLattice
    k: np.ndarray
    kbar: np.ndarray
    energy: np.ndarray
    reduced: np.ndarray = field(repr=False)
    continuum: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.energy)

    def __iter__(self):
        for k, kb, e in zip(self.k, self.kbar, self.energy):
            yield tuple(k), tuple(kb), complex(e)

    def subset(self, mask: np.ndarray) -> "LatticeSpectrum":
        return LatticeSpectrum(self.lattice, self.k[mask], self.kbar[mask], self.energy[mask],
                               self.reduced[mask], self.continuum[mask])


def free_particle_spectrum(lat: HypercubicLattice) -> LatticeSpectrum:
    """Enumerate all ``(k, kbar)`` with components in ``1..N`` and their lattice energies."""
    d = lat.dims
    count = lat.N ** (2 * d)
    if count > MAX_LATTICE_ENTRIES:
        raise ResourceError(f"{count} lattice modes exceed the enumeration cap {MAX_LATTICE_ENTRIES}")
    labels = np.indices((lat.N,) * (2 * d)).reshape(2 * d, -1).T + 1
    k, kbar = labels[:, :d], labels[:, d:]
    kx = k + np.asarray(lat.delta_x)
    kb = kbar + np.asarray(lat.delta_xbar)
    alpha = 2 * np.pi * kx / lat.N
    beta = 2 * np.pi * kb / lat.N
    factors = (np.exp(1j * alpha) - 1) * (np.exp(1j * beta) - 1)
    energy = -(factors @ lat.metric) / (lat.mass * lat.l**2)
    reduced = (kx * kb) @ lat.metric
    return LatticeSpectrum(lat, k, kbar, energy, reduced, lat.prefactor * reduced)


def onshell_select(lat: HypercubicLattice, entries: LatticeSpectrum, tol: float = 1e-9) -> LatticeSpectrum:
    """Keep the massless positive-root modes ``kbar^0 + dbar^0 = -(kbar^1 + dbar^1)``."""
    if lat.dims != 2:
        raise ContractViolation("on-shell selection is defined for dims = 2")
    if len(entries) == 0:
        return entries
    kb = entries.kbar + np.asarray(lat.delta_xbar)
    return entries.subset(np.abs(kb[:, 0] + kb[:, 1]) <= tol)


def onshell_lattice(two_s: int, L: float = 2 * np.pi, mass: float = 1.0) -> HypercubicLattice:
    """Massless 1+1 lattice with ``N = 2s + 1`` and the positivity-preserving phases.

    ``delta = (0, 0)``, ``delta_bar = (1/2, 1/2 - 2s - 3)``.
    """
    N = two_s + 1
    s = two_s / 2
    return HypercubicLattice(N=N, l=L / N, dims=2, mass=mass,
                             delta_x=(0.0, 0.0), delta_xbar=(0.5, 0.5 - 2 * s - 3))


def spin_labels(entries: LatticeSpectrum, two_s: int) -> np.ndarray:
    """Index maps ``sbar_z = s + 1 - kbar^1`` and ``s_z^{0,1} = k^{0,1} - s - 1``.

    Returns an array of shape ``(entries, 3)`` with columns ``(sbar_z, s_z^0, s_z^1)``.
    """
    s = two_s / 2
    return np.column_stack([s + 1 - entries.kbar[:, 1], entries.k[:, 0] - s - 1, entries.k[:, 1] - s - 1])


def brute_force_onshell(two_s: int) -> list[tuple[tuple[int, int], tuple[int, int], float]]:
    """Plain-loop enumeration of the on-shell modes and their reduced energies (test oracle)."""
    lat = onshell_lattice(two_s)
    N = lat.N
    out = []
    for k0, k1, kb0, kb1 in itertools.product(range(1, N + 1), repeat=4):
        a0, a1 = k0 + lat.delta_x[0], k1 + lat.delta_x[1]
        b0, b1 = kb0 + lat.delta_xbar[0], kb1 + lat.delta_xbar[1]
        if b0 == -b1:
            out.append(((k0, k1), (kb0, kb1), a0 * b0 - a1 * b1))
    return out
