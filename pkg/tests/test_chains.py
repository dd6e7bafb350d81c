import numpy as np
import pytest

from mcperturb import (
    Distribution,
    IntensityMatrix,
    PerturbationPair,
    StochasticMatrix,
    ValidationError,
    WeightFunction,
)


class TestStochasticMatrix:
    def test_accepts_valid_matrix(self):
        P = StochasticMatrix([[0.5, 0.5], [0.3, 0.7]])
        assert P.n == 2
        assert P.irreducible
        assert P.period == 1

    def test_rejects_negative_entry(self):
        with pytest.raises(ValidationError, match=r"negative entry"):
            StochasticMatrix([[1.1, -0.1], [0.5, 0.5]])

    def test_rejects_bad_row_sum(self):
        with pytest.raises(ValidationError, match=r"row 1 sums"):
            StochasticMatrix([[0.5, 0.5], [0.5, 0.4]])

    def test_rejects_nonsquare(self):
        with pytest.raises(ValidationError):
            StochasticMatrix([[0.5, 0.5]])

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            StochasticMatrix([[np.nan, 1.0], [0.5, 0.5]])

    def test_period_two_swap_chain(self):
        P = StochasticMatrix([[0, 1], [1, 0]])
        assert P.irreducible
        assert P.period == 2
        assert not P.aperiodic

    def test_period_of_cycle(self):
        n = 6
        P = np.zeros((n, n))
        for i in range(n):
            P[i, (i + 1) % n] = 1.0
        assert StochasticMatrix(P).period == n

    def test_positive_diagonal_gives_aperiodic(self):
        P = StochasticMatrix([[0.1, 0.9], [0.5, 0.5]])
        assert P.aperiodic

    def test_reducible_flag(self):
        P = StochasticMatrix([[1.0, 0.0], [0.5, 0.5]])
        assert not P.irreducible

    def test_entries_are_frozen(self):
        P = StochasticMatrix([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(ValueError):
            P.entries[0, 0] = 0.4


class TestIntensityMatrix:
    def test_accepts_valid_generator(self):
        Q = IntensityMatrix([[-1.0, 1.0], [2.0, -2.0]])
        assert Q.uniformization_constant == 2.0
        assert Q.irreducible

    def test_rejects_negative_off_diagonal(self):
        with pytest.raises(ValidationError, match="off-diagonal"):
            IntensityMatrix([[1.0, -1.0], [2.0, -2.0]])

    def test_rejects_nonconservative(self):
        with pytest.raises(ValidationError, match="conservative"):
            IntensityMatrix([[-1.0, 0.9], [2.0, -2.0]])

    def test_rejects_zero_generator(self):
        with pytest.raises(ValidationError, match="uniformization"):
            IntensityMatrix([[0.0, 0.0], [0.0, 0.0]])

    def test_reducible_flag(self):
        Q = IntensityMatrix([[0.0, 0.0], [1.0, -1.0]])
        assert not Q.irreducible


class TestDistribution:
    def test_accepts_and_normalizes(self):
        d = Distribution([0.5, 0.5])
        assert d.values.sum() == 1.0
        assert d.strictly_positive

    def test_clamps_solver_noise(self):
        d = Distribution([1.0, -1e-15])
        assert d.values[1] == 0.0
        assert not d.strictly_positive

    def test_rejects_genuine_negative(self):
        with pytest.raises(ValidationError, match="negative"):
            Distribution([1.1, -0.1])

    def test_rejects_bad_total(self):
        with pytest.raises(ValidationError, match="sums to"):
            Distribution([0.5, 0.4])


class TestWeightFunction:
    def test_lower_bound(self):
        w = WeightFunction([2.0, 3.0, 1.5])
        assert w.lower_bound == 1.5

    def test_rejects_zero_weight(self):
        with pytest.raises(ValidationError, match="not positive"):
            WeightFunction([1.0, 0.0])


class TestPerturbationPair:
    def test_delta_rows_sum_to_zero(self):
        P = StochasticMatrix([[0.5, 0.5], [0.3, 0.7]])
        Pt = StochasticMatrix([[0.6, 0.4], [0.3, 0.7]])
        pair = PerturbationPair(P, Pt)
        assert pair.kind == "dtmc"
        np.testing.assert_allclose(pair.delta.sum(axis=1), 0.0, atol=1e-15)

    def test_rejects_mixed_kinds(self):
        P = StochasticMatrix([[0.5, 0.5], [0.3, 0.7]])
        Q = IntensityMatrix([[-1.0, 1.0], [2.0, -2.0]])
        with pytest.raises(ValidationError, match="same kind"):
            PerturbationPair(P, Q)

    def test_rejects_size_mismatch(self):
        P = StochasticMatrix([[0.5, 0.5], [0.3, 0.7]])
        P3 = StochasticMatrix(np.full((3, 3), 1 / 3))
        with pytest.raises(ValidationError, match="sizes differ"):
            PerturbationPair(P, P3)

    def test_ctmc_pair(self):
        Q = IntensityMatrix([[-1.0, 1.0], [2.0, -2.0]])
        Qt = IntensityMatrix([[-1.2, 1.2], [2.0, -2.0]])
        pair = PerturbationPair(Q, Qt)
        assert pair.kind == "ctmc"
        np.testing.assert_allclose(pair.delta.sum(axis=1), 0.0, atol=1e-15)
