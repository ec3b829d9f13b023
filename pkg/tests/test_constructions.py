"""Tests for constructions: concrete operators and seeded generators."""
import math

import numpy as np
import pytest

from fredholm_commutator_lab import constructions as cons
from fredholm_commutator_lab import linalg_core as lc
from fredholm_commutator_lab.errors import PreconditionError
from fredholm_commutator_lab.operator_spaces import (
    CONDITION_II,
    CONDITION_III,
    MOMENTUM_SIGN,
    CompressionSchedule,
    FourierGrid,
    SequenceTruncation,
    Verdict,
)


class TestShifts:
    def test_forward_matrix(self):
        r = cons.shift_forward(SequenceTruncation(3)).matrix
        assert np.array_equal(r, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])

    def test_products_at_truncation(self):
        space = SequenceTruncation(5)
        r, l_op = cons.shift_forward(space).matrix, cons.shift_backward(space).matrix
        p_first = np.diag([1, 0, 0, 0, 0])
        p_last = np.diag([0, 0, 0, 0, 1])
        assert np.array_equal(r @ l_op, np.eye(5) - p_first)
        assert np.array_equal(l_op @ r, np.eye(5) - p_last)

    def test_commutator_sign_oracle(self):
        space = SequenceTruncation(4)
        comm = lc.commutator(cons.shift_forward(space).matrix, cons.shift_backward(space).matrix)
        s = cons.commutator_sign_oracle()
        assert s in (-1, 1)
        assert np.array_equal(comm, np.diag([s, 0, 0, -s]))


class TestMultiplierAndNilpotent:
    def test_weighted_multiplier(self):
        m = cons.weighted_multiplier(SequenceTruncation(4)).matrix
        assert np.allclose(np.diag(m), [0, 1 / math.sqrt(2), 0, 0.5])

    @pytest.mark.parametrize("n", [2, 7, 50])
    def test_nilpotent_of_order_two(self, n):
        c = cons.nilpotent_example(SequenceTruncation(n)).matrix
        assert np.count_nonzero(c @ c) == 0

    def test_expm_is_identity_plus_c(self):
        c = cons.nilpotent_example(SequenceTruncation(40)).matrix
        assert np.array_equal(lc.expm(c), np.eye(40) + c)


class TestQuasinilpotent:
    def test_default_weights(self):
        c = cons.quasinilpotent_example(SequenceTruncation(5)).matrix
        assert np.allclose(np.diag(c, k=-1), [1, 1 / 2, 1 / 3, 1 / 4])
        assert np.count_nonzero(np.triu(c)) == 0

    def test_zero_weights(self):
        c = cons.quasinilpotent_example(SequenceTruncation(6), weights=[0.0] * 5).matrix
        assert np.count_nonzero(c) == 0

    def test_callable_weights(self):
        c = cons.quasinilpotent_example(SequenceTruncation(4), weights=lambda j: 2.0**-j).matrix
        assert np.allclose(np.diag(c, k=-1), [0.5, 0.25, 0.125])

    def test_profile_decays(self):
        c = cons.quasinilpotent_example(SequenceTruncation(120)).matrix
        profile = lc.nilpotency_profile(c, 20)
        assert all(b < a for a, b in zip(profile, profile[1:]))
        # ||C^n||^(1/n) = (1/n!)^(1/n)
        assert abs(profile[-1] - math.factorial(20) ** (-1 / 20)) < 1e-10


class TestDseries:
    def test_identity_residual(self, complex_matrix):
        a = complex_matrix(12)
        a = a / np.linalg.norm(a, 2)
        d, residual = cons.dseries(a)
        assert residual < 1e-12
        assert np.allclose(lc.expm(a) - np.eye(12), d @ a, atol=1e-12)

    def test_zero(self):
        d, residual = cons.dseries(np.zeros((3, 3)))
        assert np.array_equal(d, np.eye(3))
        assert residual == 0.0

    def test_triangular_gives_nilpotent_complement(self, complex_matrix):
        a = np.tril(complex_matrix(8), -1)
        d, _ = cons.dseries(a)
        profile = lc.nilpotency_profile(np.eye(8) - d, 10)
        assert profile[7] == 0.0


class TestFourierGridOps:
    @pytest.fixture(scope="class")
    def grid(self):
        return FourierGrid(20.0, 256)

    def test_grid_function_bounded(self):
        t = np.linspace(-1e4, 1e4, 2001)
        values = cons.GridFunctions.f(t)
        assert np.all(np.abs(values) < 2 * math.pi)
        assert abs(values[-1] - 2j * math.pi) < 1e-6

    def test_scaled(self):
        assert cons.GridFunctions(3).scaled(1.0) == 3 * cons.GridFunctions.f(1.0)

    def test_operators(self, grid):
        ops = cons.fourier_grid_ops(grid, k=2)
        assert np.allclose(np.diag(ops.x_op.matrix), grid.positions())
        assert np.allclose(ops.p_op.matrix, ops.p_op.matrix.conj().T, atol=1e-12)
        assert np.allclose(np.diag(ops.f_of_x.matrix), 2 * cons.GridFunctions.f(grid.positions()))
        # f(p) is skew-Hermitian because f is purely imaginary
        assert np.allclose(ops.f_of_p.matrix, -ops.f_of_p.matrix.conj().T, atol=1e-12)

    def test_momentum_sign_oracle(self, grid):
        assert cons.momentum_sign_oracle(grid) == MOMENTUM_SIGN

    def test_saturation_constant_bounded(self):
        small = cons.saturation_constant(FourierGrid(20.0, 512))
        large = cons.saturation_constant(FourierGrid(40.0, 1024))
        assert small < 10 and large < 10
        assert abs(small - large) < 0.5


class TestSeededGenerators:
    def test_core_size(self):
        assert cons.core_size(0.5) == 60
        assert cons.core_size(0.0) == 1
        with pytest.raises(PreconditionError):
            cons.core_size(1.0)

    def test_banded_envelope(self):
        d = cons.random_banded(7, SequenceTruncation(80), 0.6, bandwidth=2).matrix
        j = np.arange(1, 81)
        envelope = 0.6 ** np.maximum.outer(j, j)
        assert np.all(np.abs(d) <= envelope)
        assert np.count_nonzero(np.triu(d, 3)) == 0
        assert np.count_nonzero(np.tril(d, -3)) == 0

    def test_theorem1_pair_deterministic(self):
        space = SequenceTruncation(150)
        a1, b1 = cons.random_theorem1_pair(11, space, 0.5)
        a2, b2 = cons.random_theorem1_pair(11, space, 0.5)
        assert np.array_equal(a1.matrix, a2.matrix)
        assert np.array_equal(b1.matrix, b2.matrix)

    def test_theorem1_pair_independent_of_ambient(self):
        small, _ = cons.random_theorem1_pair(11, SequenceTruncation(100), 0.5)
        large, _ = cons.random_theorem1_pair(11, SequenceTruncation(200), 0.5)
        assert np.allclose(small.matrix, large.matrix[:100, :100], rtol=0, atol=1e-14)

    def test_unitary_pair(self):
        a, b = cons.random_theorem1_pair(2, SequenceTruncation(120), 0.5, unitary=True)
        for op in (a, b):
            assert np.allclose(op.matrix.conj().T @ op.matrix, np.eye(120), atol=1e-12)

    def test_conjecture_pair(self):
        schedule = CompressionSchedule((10, 20, 40, 80))
        a, b, report = cons.random_conjecture_pair(4, SequenceTruncation(200), 0.9, 0.3, schedule=schedule)
        assert min(report.invertibility) >= 0.49
        assert report.verdicts(CONDITION_II) == [Verdict.SUMMABLE, Verdict.SUMMABLE]
        assert Verdict.SUMMABLE not in report.verdicts(CONDITION_III)
        assert abs(np.linalg.norm(a.matrix - np.eye(200), 2) - 0.5) < 1e-12

    def test_conjecture_pair_rank_grows(self):
        small, _ = cons.conjecture_pair_operators(1, SequenceTruncation(60), 0.9, 0.3)
        large, _ = cons.conjecture_pair_operators(1, SequenceTruncation(120), 0.9, 0.3)
        assert np.linalg.matrix_rank(small.matrix - np.eye(60)) < np.linalg.matrix_rank(large.matrix - np.eye(120))

    def test_conjecture_pair_parity_split(self):
        # without leaks (A-I)(B-I) vanishes identically
        a, b = cons.conjecture_pair_operators(2, SequenceTruncation(80), 0.9, 0.0)
        x, y = a.matrix - np.eye(80), b.matrix - np.eye(80)
        assert np.allclose(x @ y, 0.0, atol=1e-14)
        assert np.allclose(y @ x, 0.0, atol=1e-14)
        assert np.linalg.norm(x.conj().T @ y) > 1e-3

    def test_conjecture_pair_rates(self):
        with pytest.raises(PreconditionError):
            cons.conjecture_pair_operators(0, SequenceTruncation(40), 1.0, 0.3)

    def test_random_invertible_well_conditioned(self):
        a, b = cons.random_invertible(0, 64)
        assert np.linalg.cond(a) < 1e3 and np.linalg.cond(b) < 1e3

    def test_lattice_normal_operator(self):
        a = cons.lattice_normal_operator(1, SequenceTruncation(40)).matrix
        lc.require_normal(a)
        eigenvalues = np.linalg.eigvals(a)
        for target in (2j * math.pi + 0.45, 5.0, 0.3j):
            assert np.min(np.abs(eigenvalues - target)) < 1e-10
