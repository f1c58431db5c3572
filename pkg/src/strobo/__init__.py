"""Emergent quantum Hamiltonians of timeless classical systems, regularized and solved numerically."""

from .classical import (ClassicalSystem, Polynomial, constraint_residual, eom_rhs, free_particle,
                        harmonic_oscillator, integrate_trajectory, liouville_propagate,
                        relativistic_particle, symplectic_form)
from .clock import ClockDistribution, QuadratureRule, density, quadrature
from .errors import (ContractViolation, DivergenceError, ResolutionError, ResourceError, SolverError,
                     StroboError, UnsupportedQueryError, UnsupportedSystemError)
from .evolution import (EvolutionResult, StateVector, compose_check, constrained_expectation,
                        discrete_step, evolution_matrix, evolve, expectation, stationary_residual)
from .lattice import (AngularGrid, HypercubicLattice, MomentumGrid, build_case_a, build_case_b,
                      build_effective_hamiltonian, constraint_projector, free_particle_spectrum,
                      observable_operator, onshell_select)
from .operator import Basis, OperatorMatrix
from .spectral import ConvergenceReport, SpectrumReport, circulant_eig, convergence_study, eig
from .su2 import (OscCoefficients, SpinRep, bad_phase_hamiltonian, emergent_hamiltonian, h_operator,
                  qp_operators, spin_matrices, verify_identities)

__version__ = "0.1.0"
