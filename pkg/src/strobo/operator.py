"""Matrix carrier shared by every operator builder.

All Hamiltonians, observables, projectors and evolution matrices in the
package travel as :class:`OperatorMatrix`: a square complex matrix (dense
``ndarray`` or ``scipy.sparse``) tagged with the basis it acts in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import ContractViolation

HERMITIAN_TOL = 1e-12

BASIS_KINDS = ("angular-grid", "hypercubic", "momentum-grid", "spin", "tensor", "generic")


@dataclass(frozen=True)
class Basis:
    """Basis descriptor.

    Attributes:
        kind: one of ``BASIS_KINDS``.
        shape: axis sizes; the operator dimension is their product.
        params: hashable ``(name, value)`` pairs identifying the discretization.
    """

    kind: str
    shape: tuple[int, ...]
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ContractViolation(f"unknown basis kind {self.kind!r}")
        if not self.shape or any(int(n) < 1 for n in self.shape):
            raise ContractViolation(f"invalid basis shape {self.shape}")

    @property
    def dim(self) -> int:
        return int(np.prod(self.shape))

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)

    @classmethod
    def generic(cls, dim: int) -> "Basis":
        return cls("generic", (int(dim),))


def _max_abs(a) -> float:
    if sp.issparse(a):
        a = sp.coo_matrix(a)
        return float(np.abs(a.data).max()) if a.nnz else 0.0
    return float(np.abs(a).max()) if a.size else 0.0


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Square complex matrix with basis metadata.

    ``hermitian`` is computed on construction (``max|A - A^H| <= 1e-12``) and is
    never taken on trust from the caller. ``info`` carries free-form diagnostics
    such as the rank of a projector.
    """

    entries: Any
    basis: Basis
    info: Mapping[str, Any] = field(default_factory=dict)
    hermitian: bool = field(init=False)

    def __post_init__(self):
        a = self.entries
        if sp.issparse(a):
            a = sp.csr_matrix(a, dtype=complex)
            finite = np.isfinite(a.data).all()
        else:
            a = np.array(a, dtype=complex)
            finite = np.isfinite(a).all()
            a.flags.writeable = False
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ContractViolation(f"operator must be square, got shape {a.shape}")
        if a.shape[0] != self.basis.dim:
            raise ContractViolation(
                f"matrix dimension {a.shape[0]} does not match basis dimension {self.basis.dim}"
            )
        if not finite:
            raise ContractViolation("operator entries must be finite")
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "hermitian", _max_abs(a - a.conj().T) <= HERMITIAN_TOL)

    @classmethod
    def from_array(cls, a, basis: Basis | None = None, **info) -> "OperatorMatrix":
        a = a if sp.issparse(a) else np.asarray(a)
        return cls(a, basis or Basis.generic(a.shape[0]), info)

    @classmethod
    def identity(cls, basis: Basis) -> "OperatorMatrix":
        return cls(np.eye(basis.dim, dtype=complex), basis)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.entries)

    def toarray(self) -> np.ndarray:
        if self.is_sparse:
            return self.entries.toarray()
        return np.array(self.entries)

    def max_norm(self) -> float:
        return _max_abs(self.entries)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.basis)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Matrix-vector (or matrix-matrix) product with a plain array."""
        return self.entries @ np.asarray(v)

    def _check_same_basis(self, other: "OperatorMatrix"):
        if other.basis != self.basis:
            raise ContractViolation(f"basis mismatch: {self.basis} vs {other.basis}")

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same_basis(other)
            return OperatorMatrix(self.entries @ other.entries, self.basis)
        return self.apply(other)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_basis(other)
        return OperatorMatrix(self.entries + other.entries, self.basis)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_basis(other)
        return OperatorMatrix(self.entries - other.entries, self.basis)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.entries * scalar, self.basis)

    __rmul__ = __mul__

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_basis(other)
        a, b = self.entries, other.entries
        return OperatorMatrix(a @ b - b @ a, self.basis)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return (
            f"OperatorMatrix(dim={self.dim}, {kind}, basis={self.basis.kind}"
            f"{list(self.basis.shape)}, hermitian={self.hermitian})"
        )
