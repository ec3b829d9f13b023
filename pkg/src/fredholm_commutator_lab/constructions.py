"""Builders for the concrete operators and the seeded random pairs."""
import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from . import linalg_core as lc
from .errors import PreconditionError
from .operator_spaces import (
    CompressionSchedule,
    FourierGrid,
    HypothesisReport,
    SequenceTruncation,
    TruncatedOperator,
    check_hypotheses,
)

logger = logging.getLogger(__name__)

DSERIES_MAX_TERMS = 200
CORE_CUTOFF = 1e-18
# half-width, in same-parity steps, of the conjecture pair columns
CONJECTURE_SPREAD = 4


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream; the identifier in config.RNG_ALGORITHM goes into every seeded report."""
    return np.random.Generator(np.random.PCG64(seed))


def _random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    # real and imaginary parts uniform on [-1/2, 1/2], so |entry| < 1
    return (rng.random(shape) - 0.5) + 1j * (rng.random(shape) - 0.5)


def _decay_envelope(n: int, rate: float) -> np.ndarray:
    idx = np.arange(1, n + 1)
    return float(rate) ** np.maximum.outer(idx, idx).astype(float)


def core_size(rate: float) -> int:
    """Leading block outside of which rate**j is below 1e-18.

    Random draws are confined to this block, independent of the ambient
    dimension, so the same seed gives the same leading entries at every N.
    """
    if not 0 <= rate < 1:
        raise PreconditionError(f"decay rate must lie in [0, 1), got {rate}")
    if rate == 0:
        return 1
    return int(math.ceil(math.log(CORE_CUTOFF) / math.log(rate)))


def _embedded(n: int, core: np.ndarray) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.complex128)
    c = min(n, core.shape[0])
    out[:c, :c] = core[:c, :c]
    return out


# --- GRID FUNCTIONS ---
def japanese_bracket(t):
    return np.sqrt(1.0 + np.asarray(t, dtype=float) ** 2)


@dataclass(frozen=True)
class GridFunctions:
    """f(t) = 2 pi i t / <t>, optionally scaled by a winding multiplier k."""

    k: int = 1

    @staticmethod
    def f(t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return 2j * np.pi * t / japanese_bracket(t)

    def scaled(self, t) -> np.ndarray:
        return self.k * self.f(t)


class FourierOperators(NamedTuple):
    x_op: TruncatedOperator
    p_op: TruncatedOperator
    f_of_x: TruncatedOperator
    f_of_p: TruncatedOperator


def fourier_grid_ops(space: FourierGrid, k: int = 1) -> FourierOperators:
    """Position, momentum (p = i d/dx) and f of each on the grid; f(x) carries the multiplier k."""
    x = space.positions()
    p = space.momenta()
    funcs = GridFunctions(k)
    return FourierOperators(
        x_op=TruncatedOperator(space, np.diag(x.astype(np.complex128)), "x"),
        p_op=TruncatedOperator(space, space.momentum_function(p.astype(np.complex128)), "p"),
        f_of_x=TruncatedOperator(space, np.diag(funcs.scaled(x)), "C"),
        f_of_p=TruncatedOperator(space, space.momentum_function(GridFunctions.f(p)), "D"),
    )


def momentum_sign_oracle(space: FourierGrid) -> int:
    """Apply p to a lattice-commensurate plane wave e^{i w x}; returns the sign of the eigenvalue relative to w."""
    omega = float(space.wavenumbers()[3])
    wave = np.exp(1j * omega * space.positions())
    p_op = space.momentum_function(space.momenta().astype(np.complex128))
    ratio = np.vdot(wave, p_op @ wave) / np.vdot(wave, wave)
    return int(round(ratio.real / omega))


def saturation_constant(space: FourierGrid) -> float:
    """max_j |e^{f(x_j)} - 1| <x_j>^2, bounded independently of L and N."""
    x = space.positions()
    return float(np.max(np.abs(np.exp(GridFunctions.f(x)) - 1.0) * japanese_bracket(x) ** 2))


# --- SEQUENCE-SPACE OPERATORS ---
def shift_forward(space: SequenceTruncation) -> TruncatedOperator:
    """R e_n = e_{n+1}; the last basis vector is sent to 0 by the truncation."""
    return TruncatedOperator(space, np.eye(space.dim, k=-1, dtype=np.complex128), "R")


def shift_backward(space: SequenceTruncation) -> TruncatedOperator:
    """L e_n = e_{n-1}, L e_1 = 0."""
    return TruncatedOperator(space, np.eye(space.dim, k=1, dtype=np.complex128), "L")


def commutator_sign_oracle() -> int:
    """Sign s with [R, L] = s P_1 read off the 4x4 truncation."""
    space = SequenceTruncation(4)
    comm = lc.commutator(shift_forward(space).matrix, shift_backward(space).matrix)
    return int(round(comm[0, 0].real))


def weighted_multiplier(space: SequenceTruncation) -> TruncatedOperator:
    """M e_n = n^{-1/2} e_n for even n, 0 for odd n (1-based)."""
    n = np.arange(1, space.dim + 1)
    diag = np.where(n % 2 == 0, 1.0 / np.sqrt(n), 0.0)
    return TruncatedOperator(space, np.diag(diag.astype(np.complex128)), "M")


def nilpotent_example(space: SequenceTruncation) -> TruncatedOperator:
    """C = ML, nilpotent of order two."""
    m = weighted_multiplier(space)
    l_op = shift_backward(space)
    return TruncatedOperator(space, m.matrix @ l_op.matrix, "ML")


Weights = Union[Callable[[int], float], Sequence[float], None]


def quasinilpotent_example(space: SequenceTruncation, weights: Weights = None) -> TruncatedOperator:
    """Weighted forward shift C e_n = w_n e_{n+1}; default w_n = 1/n.

    At truncation it is strictly lower triangular, hence nilpotent, standing
    in for the quasinilpotent limit.
    """
    n = space.dim
    if weights is None:
        w = 1.0 / np.arange(1, n)
    elif callable(weights):
        w = np.array([weights(j) for j in range(1, n)], dtype=float)
    else:
        w = np.asarray(weights, dtype=float)[: n - 1]
    return TruncatedOperator(space, np.diag(w.astype(np.complex128), k=-1), "C_w")


def dseries(a, tolerance: float = 1e-17) -> Tuple[lc.ComplexMatrix, float]:
    """D = sum_k A^k/(k+1)!, so that e^A - I = DA; returns D and ||e^A - I - DA||."""
    a = lc.as_matrix(a)
    eye = lc.identity(a.shape[0])
    d = eye.copy()
    term = eye.copy()
    for k in range(1, DSERIES_MAX_TERMS):
        term = (term @ a) / (k + 1)
        d = d + term
        if np.linalg.norm(term, 1) <= tolerance * np.linalg.norm(d, 1):
            break
    residual = lc.norm2(lc.expm(a) - eye - d @ a)
    return d, residual


def random_banded(
    seed: int, space: SequenceTruncation, decay_rate: float, bandwidth: int = 3, label: str = "D"
) -> TruncatedOperator:
    """Seeded banded matrix with |D_jk| bounded by decay_rate^max(j,k)."""
    rng = make_rng(seed)
    c = core_size(decay_rate)
    band = np.abs(np.subtract.outer(np.arange(c), np.arange(c))) <= bandwidth
    core = _random_complex(rng, (c, c)) * _decay_envelope(c, decay_rate) * band
    return TruncatedOperator(space, _embedded(space.dim, core), label)


def decaying_exponent(rng: np.random.Generator, n: int, decay_rate: float, hermitian: bool = False) -> np.ndarray:
    c = core_size(decay_rate)
    core = _random_complex(rng, (c, c)) * _decay_envelope(c, decay_rate)
    if hermitian:
        core = 0.5 * (core + core.conj().T)
    return _embedded(n, core)


# --- RANDOM PAIRS ---
def random_theorem1_pair(
    seed: int, space: SequenceTruncation, decay_rate: float, unitary: bool = False
) -> Tuple[TruncatedOperator, TruncatedOperator]:
    """A = e^C, B = e^D with |C_jk|, |D_jk| bounded by decay_rate^max(j,k) (1-based indices).

    With ``unitary`` the exponents are i times Hermitian matrices, the
    setting of Kitaev's unitary pair.
    """
    rng = make_rng(seed)
    n = space.dim
    exponents = [decaying_exponent(rng, n, decay_rate, hermitian=unitary) for _ in range(2)]
    if unitary:
        exponents = [1j * g for g in exponents]
    a = TruncatedOperator(space, lc.expm(exponents[0]), "A")
    b = TruncatedOperator(space, lc.expm(exponents[1]), "B")
    return a, b


def _parity_factor(
    rng: np.random.Generator, n: int, rate: float, parity: int, fast_decay: float, spread: int
) -> np.ndarray:
    """Columns k = 1..n/2, column k centred on index 2(k-1) + parity.

    Entries sit on indices of the column's parity and fall off like
    rate**distance; a copy weighted fast_decay**k leaks onto the neighbouring
    indices of the other parity.
    """
    offsets = np.arange(-spread, spread + 1)
    profile = float(rate) ** np.abs(offsets)
    count = n // 2
    out = np.zeros((n, count), dtype=np.complex128)
    for col in range(count):
        draws = _random_complex(rng, offsets.size) * profile
        idx = 2 * col + parity + 2 * offsets
        keep = (idx >= 0) & (idx < n)
        out[idx[keep], col] += draws[keep]
        leak = idx ^ 1
        keep = (leak >= 0) & (leak < n)
        out[leak[keep], col] += fast_decay ** (col + 1) * draws[keep]
    return out


def conjecture_pair_operators(
    seed: int,
    space: SequenceTruncation,
    slow_decay: float,
    fast_decay: float,
    spread: int = CONJECTURE_SPREAD,
) -> Tuple[TruncatedOperator, TruncatedOperator]:
    """A = I + sum_k w_k u_k v_k^*, B = I + sum_k w_k s_k f_k^*, perturbations scaled to norm 1/2.

    u_k, s_k live on even indices and v_k, f_k on odd ones, so (A-I)(B-I)
    and (B-I)(A-I) only see the fast_decay**k leaks between parities, while
    (A*-I)(B-I) pairs u_k with s_k. Left factors of A and right factors of B
    use the fast profile, the others the slow one. The weights w_k = k^-1/2
    are those of the nilpotent example, so the (iii)-products have
    singular values of order 1/k. The rank grows with the ambient dimension.
    """
    for rate in (slow_decay, fast_decay):
        if not 0 <= rate < 1:
            raise PreconditionError(f"decay rate must lie in [0, 1), got {rate}")
    n = space.dim
    # one stream per factor keeps the leading columns independent of n
    streams = [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(4)]
    u = _parity_factor(streams[0], n, fast_decay, 0, fast_decay, spread)
    v = _parity_factor(streams[1], n, slow_decay, 1, fast_decay, spread)
    s = _parity_factor(streams[2], n, slow_decay, 0, fast_decay, spread)
    f = _parity_factor(streams[3], n, fast_decay, 1, fast_decay, spread)
    weights = 1.0 / np.sqrt(np.arange(1, n // 2 + 1))

    a_pert = (u * weights) @ v.conj().T
    b_pert = (s * weights) @ f.conj().T
    eye = lc.identity(n)
    a = TruncatedOperator(space, eye + 0.5 * a_pert / lc.norm2(a_pert), "A")
    b = TruncatedOperator(space, eye + 0.5 * b_pert / lc.norm2(b_pert), "B")
    return a, b


def random_conjecture_pair(
    seed: int,
    space: SequenceTruncation,
    slow_decay: float,
    fast_decay: float,
    spread: int = CONJECTURE_SPREAD,
    schedule: Optional[CompressionSchedule] = None,
) -> Tuple[TruncatedOperator, TruncatedOperator, HypothesisReport]:
    """Pair aimed at condition (ii) with the (iii)-products left slowly summing.

    The attached hypothesis report says what was achieved.
    """
    a, b = conjecture_pair_operators(seed, space, slow_decay, fast_decay, spread)
    if schedule is None:
        schedule = CompressionSchedule(config.DEFAULT_SCHEDULE)
    return a, b, check_hypotheses(a, b, schedule)


def random_invertible(seed: int, dim: int) -> Tuple[lc.ComplexMatrix, lc.ComplexMatrix]:
    """Two well-conditioned random matrices I + G/(2 sqrt(dim))."""
    rng = make_rng(seed)
    scale = 0.5 / math.sqrt(dim)
    g1 = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    g2 = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    eye = lc.identity(dim)
    return eye + scale * g1, eye + scale * g2


# lattice point and offset for each eigenvalue placed near 2 pi i Z
SPLIT_OFFSETS = ((1, 0.45), (-1, 0.27), (0, 0.162), (2, 0.0972))
SPLIT_EXTRA = (2j * math.pi, -2j * math.pi, 0.3j, 5.0)


def lattice_normal_operator(
    seed: int,
    space: SequenceTruncation,
    offsets: Sequence[Tuple[int, float]] = SPLIT_OFFSETS,
    extra: Sequence[complex] = SPLIT_EXTRA,
) -> TruncatedOperator:
    """Normal A = V diag(lambda) V^* with eigenvalues placed in and near 2 pi i Z.

    Eigenvalues 2 pi i k + eps from ``offsets``, the values in ``extra``, and 0
    on the rest of the space; V is a seeded unitary mixing the leading block.
    """
    rng = make_rng(seed)
    placed = [2j * math.pi * k + eps for k, eps in offsets] + list(extra)
    n = space.dim
    lam = np.zeros(n, dtype=np.complex128)
    lam[: len(placed)] = placed
    block = len(placed) + 2
    q, _ = np.linalg.qr(rng.standard_normal((block, block)) + 1j * rng.standard_normal((block, block)))
    v = lc.identity(n)
    v[:block, :block] = q
    matrix = (v * lam) @ v.conj().T
    return TruncatedOperator(space, matrix, "A")
