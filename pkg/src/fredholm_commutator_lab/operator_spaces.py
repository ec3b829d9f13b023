"""Two-scale truncations of infinite-dimensional operators.

Operators are built at an ambient dimension N and evaluated on compressions
m <= N/2. At full finite dimension det(ABA^-1B^-1) = 1 and tr[C,D] = 0 hold
identically, so the infinite-dimensional values only show up in the
compressed windows.
"""
import functools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from . import linalg_core as lc
from .errors import DimensionMismatchError, ScheduleError, TwoScaleViolationError

logger = logging.getLogger(__name__)


# --- SPACE MODELS ---
@dataclass(frozen=True)
class SequenceTruncation:
    """l2(N) cut to the first ``ambient_dim`` basis vectors."""

    ambient_dim: int

    def __post_init__(self):
        if self.ambient_dim < 2:
            raise ScheduleError(f"sequence truncation needs ambient_dim >= 2, got {self.ambient_dim}")

    @property
    def dim(self) -> int:
        return self.ambient_dim

    def doubled(self) -> "SequenceTruncation":
        return SequenceTruncation(2 * self.ambient_dim)


@dataclass(frozen=True)
class FourierGrid:
    """Periodic grid on [-L, L) with N points, spacing h = 2L/N."""

    half_length: float
    points: int

    def __post_init__(self):
        if self.half_length <= 0:
            raise ScheduleError(f"grid half length must be positive, got {self.half_length}")
        if self.points < 2 or self.points & (self.points - 1):
            raise ScheduleError(f"grid points must be a power of two, got {self.points}")

    @property
    def dim(self) -> int:
        return self.points

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.points

    def doubled(self) -> "FourierGrid":
        # same spacing, twice the box
        return FourierGrid(2.0 * self.half_length, 2 * self.points)

    def positions(self) -> np.ndarray:
        return -self.half_length + self.spacing * np.arange(self.points)

    def wavenumbers(self) -> np.ndarray:
        """Angular frequencies in FFT order, multiples of pi/L."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)

    def momenta(self) -> np.ndarray:
        # p = i d/dx sends e^{i w x} to -w e^{i w x}
        return MOMENTUM_SIGN * self.wavenumbers()

    def dft_matrix(self) -> lc.ComplexMatrix:
        """Unitary DFT, ``F @ v == fft(v, norm="ortho")``."""
        return np.fft.fft(np.eye(self.points, dtype=np.complex128), axis=0, norm="ortho")

    def momentum_function(self, values: np.ndarray) -> lc.ComplexMatrix:
        """``F^* diag(values) F`` with values given on ``momenta()``."""
        f = self.dft_matrix()
        return (f.conj().T * values) @ f


SpaceModel = Union[SequenceTruncation, FourierGrid]

# sign of p relative to -i d/dx; the lab follows p = i d/dx
MOMENTUM_SIGN = -1


@dataclass(frozen=True)
class TruncatedOperator:
    space: SpaceModel
    matrix: lc.ComplexMatrix = field(repr=False)
    label: str = ""

    def __post_init__(self):
        m = lc.as_matrix(self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatchError(
                f"{self.label or 'operator'}: matrix {m.shape} does not match space dimension {self.space.dim}"
            )
        object.__setattr__(self, "matrix", m)

    def with_matrix(self, matrix, label: str) -> "TruncatedOperator":
        return TruncatedOperator(self.space, matrix, label)


@dataclass(frozen=True)
class CompressionSchedule:
    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ScheduleError("compression schedule is empty")
        if dims[0] < 1 or any(b <= a for a, b in zip(dims, dims[1:])):
            raise ScheduleError(f"schedule must be strictly increasing positive integers, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def parse(cls, text: str) -> "CompressionSchedule":
        return cls(tuple(int(part) for part in text.split(",") if part.strip()))

    @property
    def largest(self) -> int:
        return self.dims[-1]

    def check_two_scale(self, space: SpaceModel):
        if 2 * self.largest > space.dim:
            raise TwoScaleViolationError(
                f"largest compression {self.largest} exceeds half the ambient dimension {space.dim}"
            )


# --- REPORTS ---
class Verdict(str, Enum):
    SUMMABLE = "Summable"
    DIVERGING = "Diverging"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class FredholmReport:
    label: str
    per_m: List[Tuple[int, complex]]
    stabilized_value: complex
    spread: float
    converged: bool
    # None when no rebuilder was supplied
    ambient_consistency: Optional[float]
    tolerance: float


@dataclass
class TailDiagnostic:
    label: str
    per_m: List[Tuple[int, float]]
    verdict: Verdict
    growth_slope: float


PRODUCT_NAMES = ("(A-I)(B-I)", "(B-I)(A-I)", "(A*-I)(B-I)", "(B-I)(A*-I)")
CONDITION_II = PRODUCT_NAMES[:2]
CONDITION_III = PRODUCT_NAMES[2:]


@dataclass
class HypothesisReport:
    products: Dict[str, TailDiagnostic]
    invertibility: Tuple[float, float]

    def verdicts(self, names: Sequence[str] = PRODUCT_NAMES) -> List[Verdict]:
        return [self.products[name].verdict for name in names]

    def all_summable(self) -> bool:
        return all(v is Verdict.SUMMABLE for v in self.verdicts())

    def any_diverging(self) -> bool:
        return any(v is Verdict.DIVERGING for v in self.verdicts())


@dataclass
class TraceTable:
    """Windowed traces of one operator plus its full-space trace."""

    label: str
    per_window: List[Tuple[int, complex]]
    full_trace: complex


# --- WINDOW BASIS ---
@functools.lru_cache(maxsize=8)
def _oscillator_basis(space: FourierGrid) -> lc.ComplexMatrix:
    x = space.positions()
    p_sq = space.momentum_function(space.momenta() ** 2)
    hamiltonian = 0.5 * (p_sq + np.diag(x**2))
    eig = lc.hermitian_eig(hamiltonian)
    logger.debug("oscillator basis for %s, residual %.2e", space, eig.residual)
    return eig.vectors


def window_basis(space: SpaceModel) -> Optional[lc.ComplexMatrix]:
    """Columns ordered so that leading columns span the compression windows.

    Sequence spaces use the canonical basis (returns None). On a grid, f(x)
    is diagonal in the position basis, so windows are taken in the
    eigenbasis of (x^2 + p^2)/2 ordered by energy, which grows symmetrically
    from the phase-space origin.
    """
    if isinstance(space, FourierGrid):
        return _oscillator_basis(space)
    return None


def compress(op: TruncatedOperator, m: int) -> lc.ComplexMatrix:
    if not 1 <= m <= op.space.dim:
        raise ScheduleError(f"compression {m} out of range 1..{op.space.dim}")
    basis = window_basis(op.space)
    if basis is None:
        return op.matrix[:m, :m].copy()
    vm = basis[:, :m]
    return vm.conj().T @ op.matrix @ vm


def _check_same_space(a: TruncatedOperator, b: TruncatedOperator):
    if a.space != b.space:
        raise DimensionMismatchError(f"operators live on different spaces: {a.space} vs {b.space}")


# --- FREDHOLM DETERMINANT ---
def _spread(values: Sequence[complex]) -> float:
    tail = list(values)[-3:]
    return max((abs(u - v) for u in tail for v in tail), default=0.0)


def fredholm_det(
    k: TruncatedOperator,
    schedule: CompressionSchedule,
    tolerance: float = config.SEQUENCE_TOLERANCE,
    rebuild: Optional[Callable[[SpaceModel], TruncatedOperator]] = None,
) -> FredholmReport:
    """Two-scale determinant of I + k; ``k`` is the perturbation without the identity.

    ``rebuild`` recreates k on a given space; when supplied, k is rebuilt on
    the doubled space and the largest compressed block is compared.
    """
    schedule.check_two_scale(k.space)
    per_m = []
    for m in schedule.dims:
        block = compress(k, m)
        logdet = lc.log_determinant(lc.identity(m) + block)
        per_m.append((m, complex(np.exp(logdet))))

    consistency = None
    if rebuild is not None:
        bigger = rebuild(k.space.doubled())
        m = schedule.largest
        consistency = float(np.max(np.abs(compress(bigger, m) - compress(k, m))))

    spread = _spread([det for _, det in per_m])
    converged = spread < tolerance and (consistency is None or consistency < tolerance)
    report = FredholmReport(
        label=k.label,
        per_m=per_m,
        stabilized_value=per_m[-1][1],
        spread=spread,
        converged=converged,
        ambient_consistency=consistency,
        tolerance=tolerance,
    )
    logger.info("fredholm_det[%s] -> %s (spread %.2e, converged=%s)", k.label, report.stabilized_value, spread, converged)
    return report


# --- TRACE-CLASS DIAGNOSTIC ---
def _fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) < 2:
        return 0.0
    return float(np.polyfit(np.asarray(xs), np.asarray(ys), 1)[0])


def classify_tail(per_m: Sequence[Tuple[int, float]]) -> Tuple[Verdict, float]:
    """Heuristic S1 verdict from partial singular-value sums; never a proof."""
    ms = [m for m, _ in per_m]
    sums = [s for _, s in per_m]
    upper = slice(len(ms) // 2, None) if len(ms) >= 4 else slice(max(len(ms) - 2, 0), None)
    logs = [math.log(m) for m in ms[upper]]
    tail = sums[upper]
    slope = _fit_slope(logs, tail)
    first = sums[0]
    atol = 1e-12

    local = [(b - a) / (lb - la) for a, b, la, lb in zip(tail, tail[1:], logs, logs[1:])]
    decaying = len(local) >= 2 and local[-1] < 0.75 * local[0]

    if slope <= 0.01 * first + atol:
        return Verdict.SUMMABLE, slope
    if decaying and slope < 0.1 * first:
        return Verdict.SUMMABLE, slope
    if slope > 0.1 * first and not decaying:
        return Verdict.DIVERGING, slope
    return Verdict.INCONCLUSIVE, slope


def trace_class_diagnostic(k: TruncatedOperator, schedule: CompressionSchedule) -> TailDiagnostic:
    schedule.check_two_scale(k.space)
    sigma = np.linalg.svd(k.matrix, compute_uv=False)
    cumulative = np.cumsum(sigma)
    per_m = [(m, float(cumulative[m - 1])) for m in schedule.dims]
    verdict, slope = classify_tail(per_m)
    logger.info("trace-class diagnostic[%s]: %s (slope %.3e)", k.label, verdict.value, slope)
    return TailDiagnostic(label=k.label, per_m=per_m, verdict=verdict, growth_slope=slope)


def check_hypotheses(a: TruncatedOperator, b: TruncatedOperator, schedule: CompressionSchedule) -> HypothesisReport:
    _check_same_space(a, b)
    eye = lc.identity(a.space.dim)
    a_i = a.matrix - eye
    b_i = b.matrix - eye
    a_star_i = lc.adjoint(a.matrix) - eye
    products = {
        PRODUCT_NAMES[0]: a_i @ b_i,
        PRODUCT_NAMES[1]: b_i @ a_i,
        PRODUCT_NAMES[2]: a_star_i @ b_i,
        PRODUCT_NAMES[3]: b_i @ a_star_i,
    }
    diagnostics = {
        name: trace_class_diagnostic(a.with_matrix(matrix, name), schedule) for name, matrix in products.items()
    }
    smallest = (
        float(np.linalg.svd(a.matrix, compute_uv=False)[-1]),
        float(np.linalg.svd(b.matrix, compute_uv=False)[-1]),
    )
    return HypothesisReport(products=diagnostics, invertibility=smallest)


# --- DETERMINANT ENGINES ---
def kitaev_perturbation(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    """K = [A,B] A^-1 B^-1, so that ABA^-1B^-1 = I + K."""
    _check_same_space(a, b)
    a_inv = lc.inverse(a.matrix)
    b_inv = lc.inverse(b.matrix)
    k = lc.commutator(a.matrix, b.matrix) @ a_inv @ b_inv
    return a.with_matrix(k, f"[{a.label},{b.label}]{a.label}^-1{b.label}^-1")


def kitaev_det(
    a: TruncatedOperator,
    b: TruncatedOperator,
    schedule: CompressionSchedule,
    tolerance: float = config.SEQUENCE_TOLERANCE,
    rebuild: Optional[Callable[[SpaceModel], Tuple[TruncatedOperator, TruncatedOperator]]] = None,
) -> FredholmReport:
    k_rebuild = None
    if rebuild is not None:

        def k_rebuild(space):
            return kitaev_perturbation(*rebuild(space))

    return fredholm_det(kitaev_perturbation(a, b), schedule, tolerance, k_rebuild)


def trace_window(k: TruncatedOperator, window_dims: CompressionSchedule) -> List[Tuple[int, complex]]:
    window_dims.check_two_scale(k.space)
    basis = window_basis(k.space)
    if basis is None:
        diagonal = np.diag(k.matrix)
    else:
        vm = basis[:, : window_dims.largest]
        diagonal = np.sum(vm.conj() * (k.matrix @ vm), axis=0)
    partial = np.cumsum(diagonal)
    return [(m, complex(partial[m - 1])) for m in window_dims.dims]


def _windowed_commutator_trace(c: TruncatedOperator, d: TruncatedOperator, schedule: CompressionSchedule) -> complex:
    comm = c.with_matrix(lc.commutator(c.matrix, d.matrix), f"[{c.label},{d.label}]")
    return trace_window(comm, CompressionSchedule((schedule.largest,)))[-1][1]


def hhp_det(
    c: TruncatedOperator,
    d: TruncatedOperator,
    schedule: CompressionSchedule,
    tolerance: float = config.SEQUENCE_TOLERANCE,
) -> Tuple[FredholmReport, complex]:
    """det(e^C e^D e^{-C-D}) against exp(tr[C,D]/2)."""
    _check_same_space(c, d)
    s = lc.expm(c.matrix) @ lc.expm(d.matrix) @ lc.expm(-c.matrix - d.matrix) - lc.identity(c.space.dim)
    report = fredholm_det(c.with_matrix(s, f"e^{c.label}e^{d.label}e^-({c.label}+{d.label})-I"), schedule, tolerance)
    predicted = complex(np.exp(0.5 * _windowed_commutator_trace(c, d, schedule)))
    return report, predicted


def pincus_commutator_det(
    c: TruncatedOperator,
    d: TruncatedOperator,
    schedule: CompressionSchedule,
    tolerance: float = config.SEQUENCE_TOLERANCE,
) -> Tuple[FredholmReport, complex]:
    """det(e^C e^D e^-C e^-D) against exp(tr[C,D])."""
    _check_same_space(c, d)
    ec, ed = lc.expm(c.matrix), lc.expm(d.matrix)
    emc, emd = lc.expm(-c.matrix), lc.expm(-d.matrix)
    s = ec @ ed @ emc @ emd - lc.identity(c.space.dim)
    report = fredholm_det(c.with_matrix(s, f"e^{c.label}e^{d.label}e^-{c.label}e^-{d.label}-I"), schedule, tolerance)
    predicted = complex(np.exp(_windowed_commutator_trace(c, d, schedule)))
    return report, predicted


def winding_integer(t: complex, tolerance: float = 0.05 * 2 * math.pi) -> Tuple[int, float]:
    """Nearest point of the 2*pi*i*Z lattice; the residual is reported, not enforced."""
    k = int(round(t.imag / (2.0 * math.pi)))
    residual = abs(t - 2j * math.pi * k)
    if residual > tolerance:
        logger.warning("trace %s is %.3e away from the 2*pi*i lattice", t, residual)
    return k, float(residual)


# --- POLAR SPLIT ---
@dataclass
class PolarSplitReport:
    total: FredholmReport
    modulus_factor: FredholmReport
    phase_factor: FredholmReport
    diagnostics: Dict[str, TailDiagnostic]

    @property
    def factors(self) -> Tuple[complex, complex, complex]:
        return (
            self.total.stabilized_value,
            self.modulus_factor.stabilized_value,
            self.phase_factor.stabilized_value,
        )

    @property
    def product_deviation(self) -> float:
        total, first, second = self.factors
        return abs(first * second - total)


def polar_split(
    a: TruncatedOperator,
    b: TruncatedOperator,
    schedule: CompressionSchedule,
    tolerance: float = config.SEQUENCE_TOLERANCE,
) -> Tuple[TruncatedOperator, TruncatedOperator, PolarSplitReport]:
    """A = U|A| with |A| = e^C, U = e^D; returns C, D and the three two-scale determinants.

    The factorization checked is det(ABA^-1B^-1) = det(e^C B e^-C B^-1) det(e^D B e^-D B^-1).
    """
    _check_same_space(a, b)
    u, modulus = lc.polar(a.matrix)
    c = a.with_matrix(lc.logm_normal(modulus), f"log|{a.label}|")
    d = a.with_matrix(lc.logm_normal(u), f"log U({a.label})")

    total = kitaev_det(a, b, schedule, tolerance)
    e_c = a.with_matrix(lc.expm(c.matrix), f"e^{c.label}")
    e_d = a.with_matrix(lc.expm(d.matrix), f"e^{d.label}")
    modulus_factor = kitaev_det(e_c, b, schedule, tolerance)
    phase_factor = kitaev_det(e_d, b, schedule, tolerance)

    eye = lc.identity(a.space.dim)
    b_i = b.matrix - eye
    ec_i = e_c.matrix - eye
    ed_i = e_d.matrix - eye
    products = {
        "(e^C-I)(B-I)": ec_i @ b_i,
        "(B-I)(e^C-I)": b_i @ ec_i,
        "(e^D-I)(B-I)": ed_i @ b_i,
        "(B-I)(e^D-I)": b_i @ ed_i,
    }
    diagnostics = {name: trace_class_diagnostic(a.with_matrix(m, name), schedule) for name, m in products.items()}
    return c, d, PolarSplitReport(total, modulus_factor, phase_factor, diagnostics)


# --- SPECTRAL SPLIT ---
def lattice_distance(value: complex) -> float:
    """Distance from value to 2*pi*i*Z."""
    nearest = round(value.imag / (2.0 * math.pi))
    return abs(value - 2j * math.pi * nearest)


@dataclass
class SplitRow:
    delta: float
    q_rank: int
    q_part: complex
    p_part: complex
    q_factor: complex
    product: complex
    unsplit: complex
    deviation: float
    p_limit_gap: float


@dataclass
class SpectralSplitReport:
    rows: List[SplitRow]
    unsplit: FredholmReport
    lattice_rank: int
    lattice_exponential_defect: float


def _projected_exponential(a: lc.ComplexMatrix, projection: lc.ComplexMatrix, sign: float) -> lc.ComplexMatrix:
    return lc.expm(sign * (a @ projection))


def spectral_split(
    a: TruncatedOperator,
    b: TruncatedOperator,
    deltas: Sequence[float],
    schedule: CompressionSchedule,
    tolerance: float = config.SEQUENCE_TOLERANCE,
) -> SpectralSplitReport:
    """Split e^A e^B e^-A e^-B along Q = chi_{dist(., 2 pi i Z) >= delta}(A) and P = I - Q.

    ``a`` is the exponent A itself (normal), ``b`` the exponent B.
    """
    _check_same_space(a, b)
    a_mat = lc.require_normal(a.matrix)
    n = a.space.dim
    eye = lc.identity(n)
    e_b, e_mb = lc.expm(b.matrix), lc.expm(-b.matrix)
    eb_op = b.with_matrix(e_b, f"e^{b.label}")
    unsplit = kitaev_det(a.with_matrix(lc.expm(a_mat), f"e^{a.label}"), eb_op, schedule, tolerance)

    lattice = lc.spectral_projection(
        a_mat,
        lambda lam: lattice_distance(lam) < config.LATTICE_TOLERANCE,
        lambda lam: abs(lattice_distance(lam) - config.LATTICE_TOLERANCE),
    )
    lattice_defect = lc.norm2(_projected_exponential(a_mat, lattice, 1.0) - eye)

    rows = []
    for delta in deltas:
        if not 0 < delta <= 0.5:
            raise ScheduleError(f"delta must lie in (0, 1/2], got {delta}")
        q = lc.spectral_projection(
            a_mat,
            lambda lam, delta=delta: lattice_distance(lam) >= delta,
            lambda lam, delta=delta: abs(lattice_distance(lam) - delta),
        )
        p = eye - q
        e_aq, e_maq = _projected_exponential(a_mat, q, 1.0), _projected_exponential(a_mat, q, -1.0)
        e_ap = _projected_exponential(a_mat, p, 1.0)
        e_aq_op = a.with_matrix(e_aq, f"e^{a.label}Q")
        e_ap_op = a.with_matrix(e_ap, f"e^{a.label}P")

        q_part = kitaev_det(e_aq_op, eb_op, schedule, tolerance).stabilized_value
        p_part = kitaev_det(e_ap_op, eb_op, schedule, tolerance).stabilized_value
        # second factor of the split: det(e^B e^{-AQ} e^{-B} e^{AQ})
        q_factor = kitaev_det(eb_op, a.with_matrix(e_maq, f"e^-{a.label}Q"), schedule, tolerance).stabilized_value
        product = p_part * q_factor
        rows.append(
            SplitRow(
                delta=float(delta),
                q_rank=int(round(float(np.trace(q).real))),
                q_part=q_part,
                p_part=p_part,
                q_factor=q_factor,
                product=product,
                unsplit=unsplit.stabilized_value,
                deviation=abs(product - unsplit.stabilized_value),
                p_limit_gap=lc.norm2(e_ap - eye),
            )
        )
        logger.info("spectral split delta=%.3g: rank Q=%d, product %s", delta, rows[-1].q_rank, product)
    return SpectralSplitReport(
        rows=rows,
        unsplit=unsplit,
        lattice_rank=int(round(float(np.trace(lattice).real))),
        lattice_exponential_defect=lattice_defect,
    )
