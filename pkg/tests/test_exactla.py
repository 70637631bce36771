import pytest
from hypothesis import given, settings, strategies as st

from x0plus.exactla import ExactMatrix, NonInvariantSubspace, restrict
from x0plus.rationals import QQ

smalls = st.integers(min_value=-6, max_value=6)


def small_matrix(rows, cols):
    return st.lists(
        st.lists(smalls, min_size=cols, max_size=cols), min_size=rows, max_size=rows
    ).map(lambda r: ExactMatrix.from_rows(r, cols=cols))


def test_rref_examples():
    ident = ExactMatrix.identity(3)
    r, piv = ident.rref()
    assert r == ident and piv == [0, 1, 2]
    z = ExactMatrix.zero(2, 2)
    r, piv = z.rref()
    assert r == z and piv == []
    m = ExactMatrix.from_rows([[1, 2], [2, 4]])
    r, piv = m.rref()
    assert r.to_rows() == [[QQ(1), QQ(2)], [QQ(0), QQ(0)]] and piv == [0]


def test_kernel_examples():
    assert ExactMatrix.identity(4).kernel_basis().cols == 0
    assert ExactMatrix.zero(2, 2).kernel_basis().cols == 2
    k = ExactMatrix.from_rows([[1, 1]]).kernel_basis()
    assert k.cols == 1
    assert k.column(0)[0] == -k.column(0)[1] != 0


def test_trace_and_square():
    assert ExactMatrix.identity(5).trace() == QQ(5)
    assert ExactMatrix.zero(3, 3).trace() == QQ(0)
    d = ExactMatrix.from_rows([[2, 0], [0, 3]])
    assert d.square() == ExactMatrix.from_rows([[4, 0], [0, 9]])


def test_restrict_examples():
    op = ExactMatrix.identity(3).scale(2)
    basis = ExactMatrix.from_rows([[1, 0], [0, 1], [1, 1]])
    # columns (1,0,1) and (0,1,1) span an invariant plane of 2*I
    assert restrict(op, basis) == ExactMatrix.identity(2).scale(2)
    assert restrict(op, ExactMatrix.zero(3, 0)).rows == 0
    op = ExactMatrix.from_rows([[1, 0], [0, -1]])
    axis = ExactMatrix.from_rows([[1], [0]])
    assert restrict(op, axis) == ExactMatrix.from_rows([[1]])


def test_restrict_rejects_noninvariant():
    rot = ExactMatrix.from_rows([[0, -1], [1, 0]])
    axis = ExactMatrix.from_rows([[1], [0]])
    with pytest.raises(NonInvariantSubspace):
        restrict(rot, axis)


@settings(max_examples=60, deadline=None)
@given(small_matrix(3, 4))
def test_rref_idempotent(m):
    r, piv = m.rref()
    r2, piv2 = r.rref()
    assert r2 == r and piv2 == piv


@settings(max_examples=60, deadline=None)
@given(small_matrix(3, 5))
def test_kernel_annihilates_and_rank_nullity(m):
    k = m.kernel_basis()
    prod = m.multiply(k)
    assert all(x == 0 for x in prod._data)
    assert m.rank() + k.cols == m.cols


@settings(max_examples=60, deadline=None)
@given(small_matrix(3, 3), small_matrix(3, 3))
def test_trace_commutator(a, b):
    assert a.multiply(b).trace() == b.multiply(a).trace()


@settings(max_examples=40, deadline=None)
@given(small_matrix(4, 3))
def test_serialization_round_trip(m):
    text = m.serialize()
    assert text.splitlines()[0] == "exactmatrix v1"
    assert ExactMatrix.deserialize(text) == m


def test_deserialize_rejects_bad_header():
    with pytest.raises(ValueError):
        ExactMatrix.deserialize("exactmatrix v999\n1 1\n0")
    with pytest.raises(ValueError):
        ExactMatrix.deserialize("garbage")


def test_rational_entries_survive():
    m = ExactMatrix.from_rows([[QQ(1, 3), QQ(-7, 2)]])
    back = ExactMatrix.deserialize(m.serialize())
    assert back[0, 0] == QQ(1, 3) and back[0, 1] == QQ(-7, 2)
