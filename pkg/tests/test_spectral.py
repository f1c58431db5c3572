import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from strobo.errors import ContractViolation, ResourceError
from strobo.lattice import AngularGrid, build_case_a, build_case_b
from strobo.operator import Basis, OperatorMatrix
from strobo.spectral import (circulant_eig, convergence_study, eig, fit_order, twisted_circulant)

rows = hnp.arrays(complex, st.integers(2, 24), elements=st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                                             allow_infinity=False))


@settings(deadline=None)
@given(rows, st.floats(-1, 1))
def test_circulant_symbol_matches_dense_eigenvalues(r, twist):
    lam = circulant_eig(r, twist)
    dense = np.linalg.eigvals(twisted_circulant(r, twist).toarray())
    scale = max(1.0, np.abs(r).sum())
    # every symbol value is an eigenvalue (pairing by nearest is safe up to multiplicity)
    assert max(np.abs(dense - l).min() for l in lam) <= 1e-8 * scale


def test_auto_uses_circulant_path_and_labels():
    grid = AngularGrid(32, 2.0, 0.3)
    rep = eig(build_case_a(grid))
    assert rep.method == "circulant"
    assert sorted(rep.labels) == list(range(1, 33))
    assert eig(build_case_a(grid), method="dense").method == "eig"
    assert eig(build_case_b(grid), method="dense").method == "eigh"


def test_dense_and_circulant_agree():
    grid = AngularGrid(20, 1.0, -0.5)
    a = eig(build_case_b(grid), method="dense").eigenvalues
    b = eig(build_case_b(grid), method="circulant").eigenvalues
    np.testing.assert_allclose(np.sort(a.real), np.sort(b.real), atol=1e-12)


def test_generic_matrix_falls_back_to_dense():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(6, 6))
    rep = eig(OperatorMatrix.from_array(a + a.T))
    assert rep.method == "eigh" and rep.residual_max < 1e-12
    with pytest.raises(ContractViolation):
        eig(OperatorMatrix.from_array(a), method="circulant")


def test_dense_cap():
    big = OperatorMatrix(sp.identity(2**14 + 1, dtype=complex, format="csr"), Basis.generic(2**14 + 1))
    with pytest.raises(ResourceError):
        eig(big)


@given(st.floats(-4, -0.5), st.floats(0.1, 100))
def test_fit_recovers_power_law(order, c):
    Ns = np.array([16, 32, 64, 128, 256])
    slope, r2 = fit_order(Ns, c * Ns.astype(float) ** order)
    assert slope == pytest.approx(order, abs=1e-9)
    assert r2 == pytest.approx(1.0, abs=1e-9)


def _diag_builder(errs):
    def build(N):
        return OperatorMatrix.from_array(np.diag([1.0 + errs[N], 5.0]))
    return build


def test_convergence_rejections():
    Ns = [8, 16, 32]
    exact = {N: 0.0 for N in Ns}
    rep = convergence_study(_diag_builder(exact), lambda N: [1.0], Ns, modes=None)
    assert not rep.accepted and rep.reason.startswith("degenerate")
    bumpy = {8: 1e-2, 16: 2e-2, 32: 1e-3}
    rep = convergence_study(_diag_builder(bumpy), lambda N: [1.0], Ns, modes=None)
    assert not rep.accepted and "non-monotone" in rep.reason
    good = {N: 3.0 / N**2 for N in Ns}
    rep = convergence_study(_diag_builder(good), lambda N: [1.0], Ns, modes=None)
    assert rep.accepted and rep.fitted_order == pytest.approx(-2, abs=1e-6)
    with pytest.raises(ContractViolation):
        convergence_study(_diag_builder(good), lambda N: [1.0], [16, 8], modes=None)


def test_parallel_and_serial_agree():
    build = lambda N: build_case_b(AngularGrid(N, 1.0, -0.5))
    ref = lambda N: [0.5]
    a = convergence_study(build, ref, [16, 32, 64], modes=(1,), workers=1)
    b = convergence_study(build, ref, [16, 32, 64], modes=(1,), workers=3)
    np.testing.assert_array_equal(a.errors, b.errors)
