import numpy as np
import pytest
import scipy.sparse as sp

from strobo.errors import ContractViolation
from strobo.operator import Basis, OperatorMatrix


def test_hermitian_flag_is_computed():
    a = np.array([[1, 2j], [-2j, 3]])
    assert OperatorMatrix.from_array(a).hermitian
    assert not OperatorMatrix.from_array(np.array([[0, 1], [0, 0]])).hermitian


def test_entries_are_read_only():
    op = OperatorMatrix.from_array(np.eye(3))
    with pytest.raises(ValueError):
        op.entries[0, 0] = 5


@pytest.mark.parametrize("bad", [np.ones((2, 3)), np.array([[np.nan, 0], [0, 1]])])
def test_rejects_bad_matrices(bad):
    with pytest.raises(ContractViolation):
        OperatorMatrix.from_array(bad)


def test_dimension_must_match_basis():
    with pytest.raises(ContractViolation):
        OperatorMatrix(np.eye(3), Basis.generic(4))


def test_mixing_bases_is_refused():
    a = OperatorMatrix(np.eye(2), Basis("spin", (2,)))
    b = OperatorMatrix(np.eye(2), Basis.generic(2))
    with pytest.raises(ContractViolation):
        a @ b


def test_sparse_and_dense_agree():
    d = np.array([[0, 1], [1j, 2]])
    x = OperatorMatrix.from_array(d)
    y = OperatorMatrix(sp.csr_matrix(d), x.basis)
    assert y.is_sparse and not x.is_sparse
    np.testing.assert_allclose((x @ x).toarray(), (y @ y).toarray())
    np.testing.assert_allclose(x.commutator(x.adjoint()).toarray(), y.commutator(y.adjoint()).toarray())


def test_unknown_basis_kind():
    with pytest.raises(ContractViolation):
        Basis("nonsense", (2,))
