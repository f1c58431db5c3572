"""Spin-s regularization of the relativistic-particle Hamiltonian.

Basis convention: ``S_z`` eigenbasis with ``s_z`` descending, so slot 0 is
``s_z = s`` and ``h = S_z + s + 1/2`` ascends toward the last slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .errors import ContractViolation, ResourceError
from .lattice import (free_particle_spectrum, onshell_lattice, onshell_select, spin_labels)
from .operator import Basis, OperatorMatrix

MAX_TENSOR_DIM = 2**15


@dataclass(frozen=True)
class SpinRep:
    """Spin-``s`` representation, ``two_s = 2s``."""

    two_s: int
    Sz: np.ndarray
    Splus: np.ndarray
    Sminus: np.ndarray

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def dim(self) -> int:
        return self.two_s + 1

    @property
    def Sx(self) -> np.ndarray:
        return (self.Splus + self.Sminus) / 2

    @property
    def Sy(self) -> np.ndarray:
        return (self.Splus - self.Sminus) / 2j

    @property
    def basis(self) -> Basis:
        return Basis("spin", (self.dim,), (("two_s", self.two_s),))

    def op(self, a: np.ndarray) -> OperatorMatrix:
        return OperatorMatrix(a, self.basis)


def spin_matrices(two_s: int) -> SpinRep:
    """Standard spin-``s`` matrices with ``<s_z+1|S_+|s_z> = sqrt(s(s+1) - s_z(s_z+1))``."""
    if int(two_s) != two_s or two_s < 0:
        raise ContractViolation("two_s must be a nonnegative integer")
    two_s = int(two_s)
    s = two_s / 2
    sz = s - np.arange(two_s + 1)
    Sp = np.zeros((two_s + 1, two_s + 1))
    for j in range(1, two_s + 1):
        m = sz[j]
        Sp[j - 1, j] = math.sqrt(s * (s + 1) - m * (m + 1))
    rep = SpinRep(two_s, np.diag(sz), Sp, Sp.T.copy())
    for a in (rep.Sz, rep.Splus, rep.Sminus):
        a.flags.writeable = False
    return rep


@dataclass(frozen=True)
class OscCoefficients:
    """Coefficients of ``q = (a S_- + a* S_+)/2``, ``p = (b S_- + b* S_+)/2``."""

    a: complex
    b: complex
    omega: float

    @classmethod
    def canonical(cls, two_s: int, omega: float) -> "OscCoefficients":
        """``a = i Omega^{-1/2} / sqrt(s + 1/2)``, ``b = Omega^{1/2} / sqrt(s + 1/2)``."""
        if not omega > 0:
            raise ContractViolation("omega must be positive")
        norm = math.sqrt(two_s / 2 + 0.5)
        return cls(1j / math.sqrt(omega) / norm, math.sqrt(omega) / norm, float(omega))

    def commutator_defect(self, two_s: int) -> float:
        """``|Im(a* b) + 2/(2s+1)|``; must vanish for the commutator identity."""
        return abs((np.conj(self.a) * self.b).imag + 2 / (two_s + 1))


def h_operator(rep: SpinRep) -> OperatorMatrix:
    """``h = S_z + s + 1/2`` with spectrum ``1/2, 3/2, ..., 2s + 1/2``."""
    return rep.op(rep.Sz + (rep.s + 0.5) * np.eye(rep.dim))


def qp_operators(rep: SpinRep, coeffs: OscCoefficients) -> tuple[OperatorMatrix, OperatorMatrix]:
    if coeffs.commutator_defect(rep.two_s) > 1e-14:
        raise ContractViolation(
            f"Im(a* b) must equal -2/(2s+1); off by {coeffs.commutator_defect(rep.two_s):.3e}"
        )
    a, b = coeffs.a, coeffs.b
    q = 0.5 * (a * rep.Sminus + np.conj(a) * rep.Splus)
    p = 0.5 * (b * rep.Sminus + np.conj(b) * rep.Splus)
    return rep.op(q), rep.op(p)


def oscillator_energy(rep: SpinRep, coeffs: OscCoefficients) -> OperatorMatrix:
    """``p^2/2 + Omega^2 q^2 / 2`` built from the spin ladder."""
    q, p = qp_operators(rep, coeffs)
    q, p = q.toarray(), p.toarray()
    return rep.op(0.5 * p @ p + 0.5 * coeffs.omega**2 * q @ q)


def oscillator_levels(two_s: int, omega: float) -> np.ndarray:
    """Closed form ``Omega(n+1/2) - (Omega/4 + Omega(n+1/2)^2)/(2s+1)``, n = 0..2s.

    Ordered by ``n``, which is not ascending in energy: the levels turn over
    near ``n = s``.
    """
    x = np.arange(two_s + 1) + 0.5
    return omega * x - (omega / 4 + omega * x**2) / (two_s + 1)


@dataclass(frozen=True)
class IdentityResiduals:
    """Max-norm residuals of the exact finite-``s`` operator identities."""

    two_s: int
    omega: float
    casimir: float
    h_square: float
    commutator: float
    sum_squares: float
    modified_oscillator: float

    def as_dict(self) -> dict:
        return {
            "s": self.two_s / 2,
            "omega": self.omega,
            "casimir": self.casimir,
            "h_square": self.h_square,
            "commutator": self.commutator,
            "sum_squares": self.sum_squares,
            "modified_oscillator": self.modified_oscillator,
        }

    @property
    def worst(self) -> float:
        return max(self.casimir, self.h_square, self.commutator, self.sum_squares, self.modified_oscillator)


def _maxabs(a) -> float:
    return float(np.abs(a).max())


def verify_identities(rep: SpinRep, coeffs: OscCoefficients) -> IdentityResiduals:
    """Evaluate every finite-``s`` identity as a matrix difference.

    * ``h = (Sx^2 + Sy^2 + 1/4 + h^2) / (2s+1)``
    * ``[q, p] = i (1 - 2h/(2s+1))``
    * ``Sx^2 + Sy^2 = ((2s+1)^2/4)(|a|^2 p^2 + |b|^2 q^2 - (Im a Im b + Re a Re b){q, p})``
    * ``Omega h = p^2/2 + Omega^2 q^2/2 + (Omega^2/4 + (Omega h)^2) / ((2s+1) Omega)``
    """
    n = rep.two_s + 1
    eye = np.eye(rep.dim)
    h = h_operator(rep).toarray()
    q, p = (o.toarray() for o in qp_operators(rep, coeffs))
    Sx, Sy, Sz = rep.Sx, rep.Sy, rep.Sz
    a, b, om = coeffs.a, coeffs.b, coeffs.omega
    perp = Sx @ Sx + Sy @ Sy
    casimir = perp + Sz @ Sz - rep.s * (rep.s + 1) * eye
    hsq = h - (perp + 0.25 * eye + h @ h) / n
    comm = (q @ p - p @ q) - 1j * (eye - 2 * h / n)
    cross = a.imag * b.imag + a.real * b.real
    sumsq = perp - (n**2 / 4) * (abs(a) ** 2 * p @ p + abs(b) ** 2 * q @ q - cross * (q @ p + p @ q))
    osc = om * h - (0.5 * p @ p + 0.5 * om**2 * q @ q + (0.25 * om**2 * eye + om**2 * h @ h) / (n * om))
    return IdentityResiduals(rep.two_s, om, _maxabs(casimir), _maxabs(hsq), _maxabs(comm),
                             _maxabs(sumsq), _maxabs(osc))


def _tensor(*factors: np.ndarray) -> np.ndarray:
    return reduce(np.kron, factors)


def _tensor_basis(rep: SpinRep) -> Basis:
    return Basis("tensor", (rep.dim,) * 3, (("two_s", rep.two_s), ("factors", ("hbar", "h0", "h1"))))


def _factor_ops(rep: SpinRep) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if rep.dim**3 > MAX_TENSOR_DIM:
        raise ResourceError(f"tensor dimension {rep.dim ** 3} exceeds cap {MAX_TENSOR_DIM}")
    h = np.diag(h_operator(rep).toarray()).real
    one = np.ones(rep.dim)
    # diagonals only: every factor is diagonal in the S_z basis
    return _tensor(h, one, one), _tensor(one, h, one), _tensor(one, one, h)


def emergent_hamiltonian(rep: SpinRep, omega: float) -> OperatorMatrix:
    """``Omega (1 + hbar + h0 + h1 + hbar (h0 + h1))`` on the three-fold tensor product.

    Factor order is ``(hbar, h0, h1)``.
    """
    hb, h0, h1 = _factor_ops(rep)
    diag = omega * (1 + hb + h0 + h1 + hb * (h0 + h1))
    return OperatorMatrix(sp.diags(diag, format="csr"), _tensor_basis(rep))


def factorized_hamiltonian(rep: SpinRep, omega: float) -> OperatorMatrix:
    """``Omega (1 + hbar)(1 + h0 + h1)``."""
    hb, h0, h1 = _factor_ops(rep)
    return OperatorMatrix(sp.diags(omega * (1 + hb) * (1 + h0 + h1), format="csr"), _tensor_basis(rep))


def bad_phase_hamiltonian(rep: SpinRep, omega: float) -> OperatorMatrix:
    """``Omega (1 + hbar)(h0 - h1)``, what symmetric phases produce; indefinite."""
    hb, h0, h1 = _factor_ops(rep)
    return OperatorMatrix(sp.diags(omega * (1 + hb) * (h0 - h1), format="csr"), _tensor_basis(rep))


def embed(rep: SpinRep, single: np.ndarray, slot: int) -> OperatorMatrix:
    """Place a single-spin operator in tensor slot ``slot`` (0 = hbar, 1 = h0, 2 = h1)."""
    if rep.dim**3 > MAX_TENSOR_DIM:
        raise ResourceError(f"tensor dimension {rep.dim ** 3} exceeds cap {MAX_TENSOR_DIM}")
    eye = sp.identity(rep.dim, format="csr")
    factors = [eye, eye, eye]
    factors[slot] = sp.csr_matrix(np.asarray(single))
    return OperatorMatrix(reduce(lambda x, y: sp.kron(x, y, format="csr"), factors), _tensor_basis(rep))


def emergent_index(rep: SpinRep, sz_bar, sz0, sz1) -> np.ndarray:
    """Flat tensor index of ``|sbar_z, s_z^0, s_z^1>`` in the descending basis."""
    d = rep.dim
    slot = lambda sz: np.rint(rep.s - np.asarray(sz)).astype(int)
    return (slot(sz_bar) * d + slot(sz0)) * d + slot(sz1)


@dataclass(frozen=True)
class CrossCheck:
    """Comparison of the on-shell lattice spectrum with the emergent Hamiltonian."""

    two_s: int
    onshell_count: int
    tensor_dim: int
    labels_in_range: bool
    bijective: bool
    max_pointwise_error: float
    multiset_equal: bool

    @property
    def passed(self) -> bool:
        return (self.labels_in_range and self.bijective and self.multiset_equal
                and self.max_pointwise_error == 0.0)


def lattice_crosscheck(two_s: int) -> CrossCheck:
    """Map each on-shell lattice mode to a spin state and compare energies exactly.

    Energies are compared in units of the common prefactor; both sides are
    half-integer products, exactly representable in floating point.
    """
    rep = spin_matrices(two_s)
    lat = onshell_lattice(two_s)
    entries = onshell_select(lat, free_particle_spectrum(lat))
    labels = spin_labels(entries, two_s)
    in_range = bool(np.all(np.abs(labels) <= rep.s + 1e-12))
    idx = emergent_index(rep, labels[:, 0], labels[:, 1], labels[:, 2])
    diag = emergent_hamiltonian(rep, 1.0).entries.diagonal().real
    bijective = len(idx) == diag.size and np.unique(idx).size == diag.size
    err = float(np.abs(diag[idx] - entries.reduced).max()) if len(idx) else math.inf
    # exact multiset comparison on doubled (integer) values
    lhs = np.sort(np.rint(2 * entries.reduced).astype(int))
    rhs = np.sort(np.rint(2 * diag).astype(int))
    exact = (np.all(2 * entries.reduced == np.rint(2 * entries.reduced))
             and np.all(2 * diag == np.rint(2 * diag)))
    multiset = bool(exact and lhs.shape == rhs.shape and np.array_equal(lhs, rhs))
    return CrossCheck(two_s, len(entries), diag.size, in_range, bool(bijective), err, multiset)
