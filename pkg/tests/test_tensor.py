import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctn_mbqc import gates
from ctn_mbqc.tensor import (ComplexTensor, LegError, contract, equal_mod_phase,
                             matrices_equal_mod_phase, operator_to_tensor, proportional,
                             reshape_as_operator, tensor_from_matrix, tensor_from_vector)


def _rand(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


class TestComplexTensor:
    def test_legs_and_shape(self):
        t = ComplexTensor([("a", 2), ("b", 3)], np.arange(6))
        assert t.names == ("a", "b")
        assert t.shape == (2, 3)
        assert t.dim("b") == 3
        assert t.data[1, 2] == 5

    def test_immutable(self):
        t = ComplexTensor([("a", 2)], [1, 2])
        with pytest.raises(ValueError):
            t.data[0] = 3

    def test_duplicate_legs_rejected(self):
        with pytest.raises(LegError):
            ComplexTensor([("a", 2), ("a", 2)], np.zeros(4))

    def test_size_mismatch_rejected(self):
        with pytest.raises(LegError):
            ComplexTensor([("a", 2), ("b", 2)], np.zeros(5))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            ComplexTensor([("a", 2)], [np.nan, 0])

    def test_unknown_leg(self):
        t = ComplexTensor([("a", 2)], [1, 2])
        with pytest.raises(LegError):
            t.axis("z")

    def test_transpose_and_rename(self):
        rng = np.random.default_rng(0)
        m = _rand(rng, 2, 3)
        t = tensor_from_matrix(m).transpose(["l", "r"])
        assert np.allclose(t.data, m.T)
        assert t.rename({"l": "x"}).names == ("x", "r")
        with pytest.raises(LegError):
            t.transpose(["l"])

    def test_scalar_multiply(self):
        t = tensor_from_vector([1, 2], "a")
        assert np.allclose((2j * t).data, [2j, 4j])


class TestContract:
    def test_matrix_product(self):
        rng = np.random.default_rng(1)
        a, b = _rand(rng, 3, 4), _rand(rng, 4, 5)
        ta = tensor_from_matrix(a, "i", "k")
        tb = tensor_from_matrix(b, "k2", "j")
        c = contract(ta, tb, [("k", "k2")])
        assert c.names == ("i", "j")
        assert np.allclose(c.data, a @ b)

    def test_dimension_mismatch(self):
        ta = tensor_from_vector(np.ones(2), "a")
        tb = tensor_from_vector(np.ones(3), "b")
        with pytest.raises(LegError):
            contract(ta, tb, [("a", "b")])

    def test_leg_paired_twice(self):
        ta = ComplexTensor([("a", 2), ("b", 2)], np.ones(4))
        tb = ComplexTensor([("c", 2), ("d", 2)], np.ones(4))
        with pytest.raises(LegError):
            contract(ta, tb, [("a", "c"), ("a", "d")])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
    def test_associative(self, p, q, r, seed):
        rng = np.random.default_rng(seed)
        a = tensor_from_matrix(_rand(rng, p, q), "x", "y")
        b = tensor_from_matrix(_rand(rng, q, r), "y2", "z")
        c = tensor_from_vector(_rand(rng, r), "z2")
        left = contract(contract(a, b, [("y", "y2")]), c, [("z", "z2")])
        right = contract(a, contract(b, c, [("z", "z2")]), [("y", "y2")])
        assert np.allclose(left.data, right.data)


class TestPhaseComparison:
    def test_detects_global_phase(self):
        m = equal_mod_phase(tensor_from_matrix(1j * gates.H), tensor_from_matrix(gates.H))
        assert m.equal
        assert np.isclose(m.phase, 1j)
        assert m.max_abs_deviation < 1e-15

    def test_rejects_different_operator(self):
        assert not matrices_equal_mod_phase(gates.X, gates.Z)

    def test_leg_order_irrelevant(self):
        rng = np.random.default_rng(2)
        t = ComplexTensor([("a", 2), ("b", 3)], _rand(rng, 2, 3))
        assert equal_mod_phase(t, np.exp(0.3j) * t.transpose(["b", "a"]))

    def test_zero_tensors_equal(self):
        assert matrices_equal_mod_phase(np.zeros((2, 2)), np.zeros((2, 2)))

    def test_proportional_ignores_scale(self):
        assert proportional(5.0 * gates.H, -2j * gates.H)
        assert not proportional(gates.H, gates.S)

    def test_to_dict_round_numbers(self):
        d = matrices_equal_mod_phase(-gates.X, gates.X).to_dict()
        assert d["equal"] is True
        assert d["phase"] == pytest.approx([-1.0, 0.0])


class TestOperatorReshape:
    def test_round_trip(self):
        rng = np.random.default_rng(3)
        t = ComplexTensor([("o1", 2), ("i1", 3), ("o2", 2)], _rand(rng, 2, 3, 2))
        m = reshape_as_operator(t, ["i1"], ["o1", "o2"])
        assert m.shape == (4, 3)
        back = operator_to_tensor(m, [("i1", 3)], [("o1", 2), ("o2", 2)])
        assert equal_mod_phase(back, t).max_abs_deviation == 0.0

    def test_bad_partition(self):
        t = ComplexTensor([("a", 2), ("b", 2)], np.ones(4))
        with pytest.raises(LegError):
            reshape_as_operator(t, ["a"], ["a"])
