"""Evolution by ``exp(-i tau Hcal)`` and the clock-averaged discrete time step.

States obey the proper-time translation property: a state known at proper
time zero is ``psi(tau) = exp(-i tau H) psi(0)`` at any other proper time. The
reference offset between proper and physical time is fixed to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .clock import ClockDistribution, quadrature
from .errors import ContractViolation
from .operator import Basis, OperatorMatrix

NORM_TOL = 1e-10
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes tagged with the basis they live in."""

    amplitudes: np.ndarray
    basis: Basis

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).ravel()
        if v.size != self.basis.dim:
            raise ContractViolation(f"state has {v.size} amplitudes, basis needs {self.basis.dim}")
        if not np.isfinite(v).all():
            raise ContractViolation("state amplitudes must be finite")
        if not np.linalg.norm(v) > 0:
            raise ContractViolation("state must have nonzero norm")
        v.flags.writeable = False
        object.__setattr__(self, "amplitudes", v)

    @classmethod
    def of(cls, amplitudes, op: OperatorMatrix, normalize: bool = True) -> "StateVector":
        state = cls(amplitudes, op.basis)
        return state.normalized() if normalize else state

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes / self.norm, self.basis)


@dataclass(frozen=True)
class EvolutionResult:
    state: StateVector
    norm_ratio: float
    unitarity_defect: float


def _check_basis(psi: StateVector, op: OperatorMatrix):
    if psi.basis != op.basis:
        raise ContractViolation(f"state basis {psi.basis} does not match operator basis {op.basis}")


def unitarity_defect(U: OperatorMatrix) -> float:
    """``max |U^H U - 1|``."""
    u = U.toarray()
    return float(np.abs(u.conj().T @ u - np.eye(U.dim)).max())


class Propagator:
    """Applies ``exp(-i tau H)`` for many ``tau``, reusing one factorization.

    Hermitian generators are diagonalized once; general ones go through
    scaling-and-squaring Pade (``scipy.linalg.expm``), or the truncated-Taylor
    action ``expm_multiply`` above ``DENSE_LIMIT``.
    """

    def __init__(self, H: OperatorMatrix):
        self.H = H
        self._eig = None
        if H.hermitian and H.dim <= DENSE_LIMIT:
            w, V = scipy.linalg.eigh(H.toarray())
            self._eig = (w, V)

    def matrix(self, tau: float) -> np.ndarray:
        if self._eig is not None:
            w, V = self._eig
            return (V * np.exp(-1j * tau * w)) @ V.conj().T
        return scipy.linalg.expm(-1j * tau * self.H.toarray())

    def apply(self, tau: float, v: np.ndarray) -> np.ndarray:
        if self._eig is not None:
            w, V = self._eig
            return V @ (np.exp(-1j * tau * w) * (V.conj().T @ v))
        if self.H.dim > DENSE_LIMIT:
            return spla.expm_multiply(-1j * tau * self.H.entries, v)
        return self.matrix(tau) @ v


def evolution_matrix(H: OperatorMatrix, tau: float) -> OperatorMatrix:
    """``U(tau) = exp(-i tau H)``; unitary when ``H`` is Hermitian."""
    if not np.isfinite(tau):
        raise ContractViolation("tau must be finite")
    return OperatorMatrix(Propagator(H).matrix(tau), H.basis)


def compose_check(H: OperatorMatrix, a: float, b: float) -> float:
    """``max |U(a) U(b) - U(a + b)|``."""
    prop = Propagator(H)
    return float(np.abs(prop.matrix(a) @ prop.matrix(b) - prop.matrix(a + b)).max())


def evolve(psi: StateVector, H: OperatorMatrix, tau: float) -> EvolutionResult:
    """Single deterministic evolution with norm bookkeeping."""
    _check_basis(psi, H)
    prop = Propagator(H)
    out = prop.apply(tau, psi.amplitudes)
    defect = unitarity_defect(OperatorMatrix(prop.matrix(tau), H.basis)) if H.dim <= DENSE_LIMIT else float("nan")
    return EvolutionResult(StateVector(out, psi.basis), float(np.linalg.norm(out) / psi.norm), defect)


def discrete_step(psi: StateVector, H: OperatorMatrix, clock: ClockDistribution, T: float,
                  quad_nodes: int = 64, propagator: Propagator | None = None) -> StateVector:
    """One tick of physical time ``T``, averaged over the clock distribution.

    Returns ``sum_k w_k exp(-i (T - tau_k) H) psi(tau_k)`` with
    ``psi(tau_k) = exp(-i tau_k H) psi``. Non-Hermitian generators are not
    renormalized.
    """
    _check_basis(psi, H)
    if not T > 0:
        raise ContractViolation("T must be positive")
    prop = propagator or Propagator(H)
    rule = quadrature(clock, quad_nodes)
    v = psi.amplitudes
    out = np.zeros_like(v)
    for tau, w in zip(rule.nodes, rule.weights):
        out += w * prop.apply(T - tau, prop.apply(tau, v))
    return StateVector(out, psi.basis)


def run_steps(psi: StateVector, H: OperatorMatrix, clock: ClockDistribution, T: float,
              steps: int, quad_nodes: int = 64) -> list[StateVector]:
    """``steps`` successive discrete steps; returns the states including the initial one."""
    prop = Propagator(H)
    states = [psi]
    for _ in range(steps):
        states.append(discrete_step(states[-1], H, clock, T, quad_nodes, prop))
    return states


def stationary_residual(psi: StateVector, H: OperatorMatrix, E: complex) -> float:
    """``||H psi - E psi|| / ||psi||``."""
    _check_basis(psi, H)
    v = psi.amplitudes
    return float(np.linalg.norm(H.apply(v) - E * v) / np.linalg.norm(v))


def expectation(psi: StateVector, O: OperatorMatrix) -> complex:
    """``<psi|O|psi>`` for a normalized state."""
    _check_basis(psi, O)
    if abs(psi.norm - 1) > NORM_TOL:
        raise ContractViolation(f"expectation needs a normalized state (norm {psi.norm:.6g})")
    v = psi.amplitudes
    return complex(np.vdot(v, O.apply(v)))


def constrained_expectation(psi: StateVector, O: OperatorMatrix, C: OperatorMatrix) -> complex:
    """``<psi|O C|psi>`` with ``C`` a Hermitian idempotent constraint projector."""
    _check_basis(psi, C)
    c = C.toarray()
    if not C.hermitian or np.abs(c @ c - c).max() > NORM_TOL:
        raise ContractViolation("constraint operator must be a Hermitian projector")
    if abs(psi.norm - 1) > NORM_TOL:
        raise ContractViolation(f"expectation needs a normalized state (norm {psi.norm:.6g})")
    v = psi.amplitudes
    return complex(np.vdot(v, O.apply(c @ v)))
