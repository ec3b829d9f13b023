"""Tests for operator_spaces: truncations, compressions and the determinant engines."""
import cmath
import math

import numpy as np
import pytest

from fredholm_commutator_lab import constructions as cons
from fredholm_commutator_lab import linalg_core as lc
from fredholm_commutator_lab.errors import DimensionMismatchError, ScheduleError, TwoScaleViolationError
from fredholm_commutator_lab.operator_spaces import (
    CONDITION_II,
    MOMENTUM_SIGN,
    CompressionSchedule,
    FourierGrid,
    SequenceTruncation,
    TruncatedOperator,
    Verdict,
    check_hypotheses,
    classify_tail,
    compress,
    fredholm_det,
    kitaev_det,
    lattice_distance,
    polar_split,
    spectral_split,
    trace_class_diagnostic,
    trace_window,
    winding_integer,
)

SCHEDULE = CompressionSchedule((10, 20, 40, 80))


def diagonal_operator(values, label="K"):
    values = np.asarray(values, dtype=np.complex128)
    return TruncatedOperator(SequenceTruncation(values.size), np.diag(values), label)


class TestSpaces:
    def test_sequence_too_small(self):
        with pytest.raises(ScheduleError):
            SequenceTruncation(1)

    def test_grid_needs_power_of_two(self):
        with pytest.raises(ScheduleError):
            FourierGrid(10.0, 100)

    def test_grid_doubling_keeps_spacing(self):
        grid = FourierGrid(40.0, 1024)
        assert grid.doubled().spacing == grid.spacing
        assert grid.doubled().dim == 2048

    def test_positions(self):
        grid = FourierGrid(4.0, 8)
        assert np.allclose(grid.positions(), [-4, -3, -2, -1, 0, 1, 2, 3])

    def test_dft_unitary(self):
        f = FourierGrid(5.0, 16).dft_matrix()
        assert np.allclose(f.conj().T @ f, np.eye(16), atol=1e-13)

    def test_momentum_convention(self):
        grid = FourierGrid(8.0, 64)
        omega = grid.wavenumbers()[2]
        wave = np.exp(1j * omega * grid.positions())
        p_wave = grid.momentum_function(grid.momenta().astype(np.complex128)) @ wave
        assert np.allclose(p_wave, MOMENTUM_SIGN * omega * wave, atol=1e-10)


class TestCompressionSchedule:
    def test_parse(self):
        assert CompressionSchedule.parse("10, 20,40").dims == (10, 20, 40)

    @pytest.mark.parametrize("dims", [(), (10, 10), (20, 10), (0, 5)])
    def test_rejects_bad_schedules(self, dims):
        with pytest.raises(ScheduleError):
            CompressionSchedule(dims)

    def test_two_scale(self):
        with pytest.raises(TwoScaleViolationError):
            CompressionSchedule((10, 120)).check_two_scale(SequenceTruncation(200))
        CompressionSchedule((10, 100)).check_two_scale(SequenceTruncation(200))

    def test_operator_shape_checked(self):
        with pytest.raises(DimensionMismatchError):
            TruncatedOperator(SequenceTruncation(3), np.eye(4))


class TestCompress:
    def test_sequence_block(self):
        op = TruncatedOperator(SequenceTruncation(6), np.arange(36).reshape(6, 6))
        assert np.array_equal(compress(op, 2), [[0, 1], [6, 7]])

    def test_grid_windows_orthonormal(self):
        grid = FourierGrid(10.0, 128)
        op = TruncatedOperator(grid, lc.identity(128))
        assert np.allclose(compress(op, 32), np.eye(32), atol=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ScheduleError):
            compress(TruncatedOperator(SequenceTruncation(4), np.eye(4)), 5)


class TestFredholmDet:
    def test_identity(self):
        report = fredholm_det(diagonal_operator(np.zeros(200)), SCHEDULE)
        assert all(det == 1 for _, det in report.per_m)
        assert report.converged

    def test_partial_products(self):
        j = np.arange(1, 201)
        report = fredholm_det(diagonal_operator(1.0 / j**2), SCHEDULE)
        for m, det in report.per_m:
            assert abs(det - np.prod(1.0 + 1.0 / j[:m] ** 2)) < 1e-12
        # the infinite product sinh(pi)/pi is still moving at m = 80
        assert not report.converged
        assert report.spread > 1e-3

    def test_finite_rank_converges_with_rebuild(self):
        core = np.array([0.5, -0.25j, 0.125, 1.0])

        def build(space):
            values = np.zeros(space.dim, dtype=np.complex128)
            values[: core.size] = core
            return TruncatedOperator(space, np.diag(values), "K")

        report = fredholm_det(build(SequenceTruncation(200)), SCHEDULE, rebuild=build)
        assert report.converged
        assert report.ambient_consistency == 0.0
        assert abs(report.stabilized_value - np.prod(1 + core)) < 1e-14

    def test_two_scale_enforced(self):
        with pytest.raises(TwoScaleViolationError):
            fredholm_det(diagonal_operator(np.zeros(100)), SCHEDULE)

    def test_kitaev_commuting_pair(self):
        space = SequenceTruncation(200)
        a = TruncatedOperator(space, np.diag(np.linspace(1.0, 2.0, 200)), "A")
        b = TruncatedOperator(space, np.diag(np.linspace(2.0, 1.0, 200) + 0.5j), "B")
        report = kitaev_det(a, b, SCHEDULE)
        assert abs(report.stabilized_value - 1.0) < 1e-14
        assert report.converged

    def test_kitaev_invariant_under_window_preserving_conjugation(self, unitary):
        space = SequenceTruncation(200)
        a, b = cons.random_theorem1_pair(3, space, 0.5)
        bounds = (0,) + SCHEDULE.dims + (200,)
        v = np.zeros((200, 200), dtype=np.complex128)
        for lo, hi in zip(bounds, bounds[1:]):
            v[lo:hi, lo:hi] = unitary(hi - lo)
        a_conj = a.with_matrix(v @ a.matrix @ v.conj().T, "VAV*")
        b_conj = b.with_matrix(v @ b.matrix @ v.conj().T, "VBV*")
        plain = kitaev_det(a, b, SCHEDULE)
        rotated = kitaev_det(a_conj, b_conj, SCHEDULE)
        for (m, det), (m_rot, det_rot) in zip(plain.per_m, rotated.per_m):
            assert m == m_rot
            assert abs(det - det_rot) < 1e-10

    def test_spread_shrinks_with_schedule(self):
        j = np.arange(1, 201)
        phases = np.exp(1j * np.random.default_rng(7).uniform(0.0, 2 * math.pi, 200))
        op = diagonal_operator(0.7**j * phases)
        schedules = ((4, 6, 8), (8, 12, 16), (16, 24, 32))
        spreads = [fredholm_det(op, CompressionSchedule(dims)).spread for dims in schedules]
        assert spreads[0] > spreads[1] > spreads[2] > 0


class TestTraceClassDiagnostic:
    def test_inverse_squares_summable(self):
        j = np.arange(1, 401)
        diag = trace_class_diagnostic(diagonal_operator(1.0 / j**2), CompressionSchedule((10, 20, 40, 80, 120)))
        assert diag.verdict is Verdict.SUMMABLE
        assert abs(diag.per_m[-1][1] - math.pi**2 / 6) < 0.01

    def test_harmonic_diverging(self):
        j = np.arange(1, 401)
        diag = trace_class_diagnostic(diagonal_operator(1.0 / j), CompressionSchedule((10, 20, 40, 80, 120)))
        assert diag.verdict is Verdict.DIVERGING
        assert 0.8 < diag.growth_slope < 1.2

    def test_zero_is_summable(self):
        verdict, slope = classify_tail([(10, 0.0), (20, 0.0), (40, 0.0)])
        assert verdict is Verdict.SUMMABLE
        assert slope == 0.0

    def test_shift_pair_fails_condition_ii(self):
        space = SequenceTruncation(200)
        r, l_op = cons.shift_forward(space), cons.shift_backward(space)
        a = r.with_matrix(lc.expm(r.matrix), "A")
        b = l_op.with_matrix(lc.expm(l_op.matrix), "B")
        report = check_hypotheses(a, b, SCHEDULE)
        assert report.verdicts(CONDITION_II) == [Verdict.DIVERGING, Verdict.DIVERGING]
        assert report.any_diverging()
        assert min(report.invertibility) > 0


class TestTraces:
    def test_trace_window_partial_sums(self):
        op = diagonal_operator(np.arange(1, 201))
        table = trace_window(op, CompressionSchedule((1, 10, 100)))
        assert table == [(1, 1), (10, 55), (100, 5050)]

    def test_trace_window_ignores_basis_order_outside_window(self, complex_matrix):
        op = TruncatedOperator(SequenceTruncation(200), complex_matrix(200), "K")
        order = np.concatenate([np.arange(80), 80 + np.random.default_rng(5).permutation(120)])
        permuted = op.with_matrix(op.matrix[np.ix_(order, order)], "PKP*")
        assert trace_window(permuted, SCHEDULE) == trace_window(op, SCHEDULE)

    def test_winding_integer(self):
        assert winding_integer(4j * math.pi) == (2, 0.0)
        k, residual = winding_integer(6j * math.pi + 0.1)
        assert k == 3
        assert abs(residual - 0.1) < 1e-12

    def test_lattice_distance(self):
        assert abs(lattice_distance(2j * math.pi + 0.3) - 0.3) < 1e-12
        assert lattice_distance(0.1j) == pytest.approx(0.1)


class TestPolarSplit:
    def test_factorization(self):
        a, b = cons.random_theorem1_pair(3, SequenceTruncation(200), 0.5)
        c, d, report = polar_split(a, b, SCHEDULE)
        total, modulus, phase = report.factors
        assert report.product_deviation < 1e-8
        assert abs(total - 1.0) < 1e-8
        # log|A| is Hermitian, log U is skew-Hermitian
        assert np.allclose(c.matrix, c.matrix.conj().T, atol=1e-10)
        assert np.allclose(d.matrix, -d.matrix.conj().T, atol=1e-10)
        assert all(diag.verdict is Verdict.SUMMABLE for diag in report.diagnostics.values())


class TestSpectralSplit:
    @pytest.fixture(scope="class")
    def report(self):
        space = SequenceTruncation(200)
        a = cons.lattice_normal_operator(5, space)
        b = cons.random_banded(5, space, 0.5, label="B")
        return spectral_split(a, b, (0.5, 0.25, 0.1), SCHEDULE)

    def test_q_ranks(self, report):
        assert [row.q_rank for row in report.rows] == [1, 4, 5]

    def test_q_part_trivial_and_product_matches(self, report):
        for row in report.rows:
            assert abs(row.q_part - 1.0) < 1e-6
            assert abs(row.q_factor - 1.0) < 1e-6
            assert row.deviation < 1e-6

    def test_p_part_approaches_identity(self, report):
        gaps = [row.p_limit_gap for row in report.rows]
        assert gaps[0] > gaps[1] > gaps[2]
        assert abs(gaps[-1] - abs(cmath.exp(0.0972) - 1)) < 1e-8

    def test_lattice_projection(self, report):
        assert report.lattice_rank == 194
        assert report.lattice_exponential_defect < 1e-10

    def test_delta_range(self):
        space = SequenceTruncation(200)
        a = cons.lattice_normal_operator(5, space)
        with pytest.raises(ScheduleError):
            spectral_split(a, a, (0.7,), SCHEDULE)
