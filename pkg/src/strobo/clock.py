"""Stationary clock distributions ``P(tau - t)`` and quadrature over proper time.

Only translation-invariant distributions exist here: every density is a
function of the offset ``tau - t`` alone, so there is no way to build a clock
that ages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_hermite

from .errors import ContractViolation, UnsupportedQueryError

KINDS = ("delta", "gaussian", "uniform")


@dataclass(frozen=True)
class ClockDistribution:
    """Centered distribution of proper-time offsets.

    Attributes:
        kind: ``"delta"``, ``"gaussian"`` (density ~ exp(-gamma x^2)) or ``"uniform"``.
        gamma: Gaussian sharpness, required for the Gaussian kind.
        width: full support width, required for the uniform kind.
    """

    kind: str
    gamma: float | None = None
    width: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractViolation(f"clock kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "gaussian" and not (self.gamma and self.gamma > 0):
            raise ContractViolation("gaussian clock needs gamma > 0")
        if self.kind == "uniform" and not (self.width and self.width > 0):
            raise ContractViolation("uniform clock needs width > 0")

    @classmethod
    def delta(cls) -> "ClockDistribution":
        return cls("delta")

    @classmethod
    def gaussian(cls, gamma: float) -> "ClockDistribution":
        return cls("gaussian", gamma=float(gamma))

    @classmethod
    def uniform(cls, width: float) -> "ClockDistribution":
        return cls("uniform", width=float(width))

    @property
    def std(self) -> float:
        if self.kind == "delta":
            return 0.0
        if self.kind == "gaussian":
            return 1.0 / math.sqrt(2.0 * self.gamma)
        return self.width / math.sqrt(12.0)

    def moment(self, k: int) -> float:
        """Exact ``k``-th moment of the distribution."""
        if k == 0:
            return 1.0
        if k % 2 or self.kind == "delta":
            return 0.0
        if self.kind == "gaussian":
            # E[x^k] = (k-1)!! / (2 gamma)^(k/2)
            return float(np.prod(np.arange(k - 1, 0, -2))) / (2.0 * self.gamma) ** (k // 2)
        return (self.width / 2) ** k / (k + 1)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (proper-time offsets) and normalized positive weights."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ContractViolation("nodes and weights must be 1-d arrays of equal length")
        if np.any(self.weights <= 0):
            raise ContractViolation("quadrature weights must be positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ContractViolation("quadrature nodes must be strictly increasing")
        if abs(self.weights.sum() - 1.0) > 1e-10:
            raise ContractViolation("quadrature weights must sum to 1")

    def __len__(self):
        return len(self.nodes)

    def integrate(self, f) -> complex:
        """Average of ``f`` over the clock distribution."""
        return sum(w * f(t) for t, w in zip(self.nodes, self.weights))


def density(dist: ClockDistribution, offset: float) -> float:
    """Pointwise density ``P(tau - t)``."""
    if dist.kind == "delta":
        raise UnsupportedQueryError("a delta clock has no pointwise density")
    if dist.kind == "gaussian":
        return math.sqrt(dist.gamma / math.pi) * math.exp(-dist.gamma * offset**2)
    return 1.0 / dist.width if abs(offset) <= dist.width / 2 else 0.0


def quadrature(dist: ClockDistribution, node_count: int) -> QuadratureRule:
    """Normalized quadrature rule for averages over the clock distribution.

    Gaussian clocks use Gauss-Hermite nodes (exact for polynomial moments up to
    order ``2 node_count - 1``), uniform clocks Gauss-Legendre on the support.
    """
    if node_count < 1:
        raise ContractViolation("node_count must be >= 1")
    if dist.kind == "delta":
        return QuadratureRule(np.zeros(1), np.ones(1))
    if dist.kind == "gaussian":
        # scipy switches to an asymptotic expansion for large rules where numpy's hermgauss overflows
        x, w = roots_hermite(node_count)
        nodes = x / math.sqrt(dist.gamma)
        # far Hermite weights underflow for very large rules
        keep = w > 0
        nodes, w = nodes[keep], w[keep]
    else:
        x, w = np.polynomial.legendre.leggauss(node_count)
        nodes = 0.5 * dist.width * x
    return QuadratureRule(nodes, w / w.sum())
