"""Reparametrization-invariant classical systems and their proper-time flow.

Phase-space points are plain float arrays ordered ``(q1..qn, p1..pn)``. A
system is its Hamiltonian, its gradient and the constraint energy ``epsilon``;
systems built from a :class:`Polynomial` also carry the gradient as
coefficient tables, which is what the operator builders in
:mod:`strobo.lattice` consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .errors import ContractViolation, DivergenceError, UnsupportedSystemError

HESSIAN_STEP = 1e-5
# gradient must be affine to this relative accuracy for the exponential flow
LINEARITY_RTOL = 1e-7


class Polynomial:
    """Sparse multivariate polynomial ``sum_e c_e x^e``.

    Args:
        nvars: number of variables.
        terms: mapping from exponent tuples (length ``nvars``) to coefficients.
    """

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], complex] | None = None):
        self.nvars = int(nvars)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars or min(exps, default=0) < 0:
                raise ContractViolation(f"bad exponent tuple {exps} for {nvars} variables")
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def constant(cls, nvars: int, value: complex) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1.0})

    def __call__(self, x) -> complex:
        x = np.asarray(x)
        total = 0.0
        for exps, c in self.terms.items():
            total = total + c * np.prod([x[i] ** e for i, e in enumerate(exps) if e])
        return total

    def derivative(self, index: int) -> "Polynomial":
        out = {}
        for exps, c in self.terms.items():
            if exps[index]:
                e = list(exps)
                e[index] -= 1
                out[tuple(e)] = out.get(tuple(e), 0) + c * exps[index]
        return Polynomial(self.nvars, out)

    def gradient(self) -> tuple["Polynomial", ...]:
        return tuple(self.derivative(i) for i in range(self.nvars))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -other)

    def __pow__(self, k: int):
        out = Polynomial.constant(self.nvars, 1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.terms})"


def symplectic_form(n: int) -> np.ndarray:
    """Standard symplectic matrix ``[[0, I], [-I, 0]]`` of size ``2n``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class ClassicalSystem:
    """A Hamiltonian on a ``2n``-dimensional phase space with constraint energy.

    Attributes:
        n: degrees of freedom.
        hamiltonian: ``H(point) -> float``.
        gradient: ``dH(point) -> array of 2n``.
        epsilon: constraint energy in ``H - epsilon ~ 0``.
        label: human readable name.
        gradient_poly: per-component polynomial tables of the gradient, or None
            for systems registered by callbacks only.
        hamiltonian_poly: the Hamiltonian itself as a polynomial, when known.
    """

    n: int
    hamiltonian: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    epsilon: float = 0.0
    label: str = "system"
    gradient_poly: tuple[Polynomial, ...] | None = field(default=None, repr=False)
    hamiltonian_poly: Polynomial | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ContractViolation("a system needs at least one degree of freedom")
        if self.gradient_poly is not None and len(self.gradient_poly) != 2 * self.n:
            raise ContractViolation("gradient_poly must have 2n components")

    @classmethod
    def from_polynomial(cls, n: int, hamiltonian: Polynomial, epsilon: float = 0.0,
                        label: str = "polynomial") -> "ClassicalSystem":
        if hamiltonian.nvars != 2 * n:
            raise ContractViolation("Hamiltonian polynomial must have 2n variables")
        grad = hamiltonian.gradient()
        return cls(
            n=n,
            hamiltonian=lambda x: float(np.real(hamiltonian(x))),
            gradient=lambda x: np.array([np.real(g(x)) for g in grad], dtype=float),
            epsilon=float(epsilon),
            label=label,
            gradient_poly=grad,
            hamiltonian_poly=hamiltonian,
        )

    @property
    def dim(self) -> int:
        return 2 * self.n

    def check_gradient(self, samples: int = 100, seed: int = 0, step: float = 1e-6) -> float:
        """Largest relative mismatch between ``gradient`` and central differences of ``hamiltonian``."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            x = rng.normal(size=self.dim)
            g = np.asarray(self.gradient(x), dtype=float)
            fd = np.empty(self.dim)
            for a in range(self.dim):
                e = np.zeros(self.dim)
                e[a] = step
                fd[a] = (self.hamiltonian(x + e) - self.hamiltonian(x - e)) / (2 * step)
            scale = max(1.0, float(np.abs(g).max()))
            worst = max(worst, float(np.abs(g - fd).max()) / scale)
        return worst


# -- catalog -----------------------------------------------------------------

def harmonic_oscillator(omega: float = 1.0, epsilon: float = 0.5) -> ClassicalSystem:
    """Unit-mass oscillator ``H = (p^2 + omega^2 q^2) / 2`` (lapse eliminated)."""
    q, p = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    H = 0.5 * p * p + 0.5 * omega**2 * q * q
    return ClassicalSystem.from_polynomial(1, H, epsilon, f"oscillator(omega={omega})")


def free_particle(n: int = 1, mass: float = 1.0, epsilon: float = 0.5) -> ClassicalSystem:
    """Nonrelativistic free particle ``H = |p|^2 / 2m`` in ``n`` dimensions."""
    H = Polynomial(2 * n)
    for j in range(n):
        pj = Polynomial.variable(2 * n, n + j)
        H = H + pj * pj * (0.5 / mass)
    return ClassicalSystem.from_polynomial(n, H, epsilon, f"free_particle(n={n}, m={mass})")


def relativistic_particle(dims: int = 4, mass: float = 1.0) -> ClassicalSystem:
    """Free relativistic particle with ``H = p.p / 2m`` (metric ``+,-,...,-``).

    The constraint energy is ``m/2`` so that ``H - epsilon = (p.p - m^2) / 2m``
    vanishes on the mass shell. ``dH/dp`` carries the metric, so the flow is
    ``dq/dtau = g p / m``, ``dp/dtau = 0``.
    """
    H = Polynomial(2 * dims)
    for mu in range(dims):
        pm = Polynomial.variable(2 * dims, dims + mu)
        sign = 1.0 if mu == 0 else -1.0
        H = H + pm * pm * (0.5 * sign / mass)
    return ClassicalSystem.from_polynomial(dims, H, 0.5 * mass, f"relativistic(dims={dims}, m={mass})")


def constant_system(n: int = 1, value: float = 1.0) -> ClassicalSystem:
    return ClassicalSystem.from_polynomial(n, Polynomial.constant(2 * n, value), value, "constant")


# -- operations --------------------------------------------------------------

def _as_point(system: ClassicalSystem, point) -> np.ndarray:
    x = np.asarray(point, dtype=float)
    if x.shape != (system.dim,):
        raise ContractViolation(f"phase point must have shape ({system.dim},), got {x.shape}")
    if not np.isfinite(x).all():
        raise ContractViolation("phase point entries must be finite")
    return x


def eom_rhs(system: ClassicalSystem, point) -> np.ndarray:
    """Hamilton's equations ``d(phi^a)/dtau = omega^{ab} dH/dphi^b``."""
    x = _as_point(system, point)
    return symplectic_form(system.n) @ np.asarray(system.gradient(x), dtype=float)


def constraint_residual(system: ClassicalSystem, point) -> float:
    """``H(point) - epsilon``."""
    return float(system.hamiltonian(_as_point(system, point))) - system.epsilon


def integrate_trajectory(system: ClassicalSystem, start, tau: float, step: float = 1e-3) -> np.ndarray:
    """Classical RK4 with fixed step, shortened so that an integer number of steps hits ``tau``."""
    if step <= 0 or tau < 0:
        raise ContractViolation("need step > 0 and tau >= 0")
    x = _as_point(system, start).copy()
    nsteps = math.ceil(tau / step - 1e-12) if tau > 0 else 0
    if nsteps == 0:
        return x
    h = tau / nsteps
    omega = symplectic_form(system.n)

    def f(y):
        return omega @ np.asarray(system.gradient(y), dtype=float)

    # overflow is detected below and reported as DivergenceError
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(nsteps):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.isfinite(x).all():
                raise DivergenceError(f"state became non-finite at step {i + 1} (tau={h * (i + 1):.6g})")
    return x


def linear_flow_matrix(system: ClassicalSystem) -> np.ndarray:
    """Generator of the affine flow, as a ``(2n+1)``-square augmented matrix.

    The Hessian comes from central differences of the gradient (step 1e-5),
    which are exact up to rounding for affine gradients. Systems whose
    gradient is not affine raise :class:`UnsupportedSystemError`.
    """
    d = system.dim
    g0 = np.asarray(system.gradient(np.zeros(d)), dtype=float)
    hess = np.empty((d, d))
    for b in range(d):
        e = np.zeros(d)
        e[b] = HESSIAN_STEP
        hess[:, b] = (np.asarray(system.gradient(e)) - np.asarray(system.gradient(-e))) / (2 * HESSIAN_STEP)
    hess = 0.5 * (hess + hess.T)

    rng = np.random.default_rng(12345)
    for _ in range(8):
        x = rng.normal(scale=3.0, size=d)
        g = np.asarray(system.gradient(x), dtype=float)
        pred = hess @ x + g0
        if np.abs(g - pred).max() > LINEARITY_RTOL * max(1.0, np.abs(g).max()):
            raise UnsupportedSystemError(
                f"{system.label}: equations of motion are not linear; the Liouville "
                "exponential only applies to quadratic Hamiltonians, use integrate_trajectory"
            )
    omega = symplectic_form(system.n)
    gen = np.zeros((d + 1, d + 1))
    gen[:d, :d] = omega @ hess
    gen[:d, d] = omega @ g0
    return gen


def liouville_propagate(system: ClassicalSystem, start, tau: float) -> np.ndarray:
    """Transport ``start`` along the Liouville flow: ``exp(M tau)`` applied to the point."""
    x = _as_point(system, start)
    gen = linear_flow_matrix(system)
    aug = np.append(x, 1.0)
    return (scipy.linalg.expm(gen * tau) @ aug)[:-1]
