"""Dense complex linear algebra kernels.

Every operator in the lab is a dense ``complex128`` numpy array. The kernels
here wrap numpy/scipy (LAPACK) where those already do the job and add the
pieces the lab needs on top: log-determinants with phase tracking, a
Taylor scaling-and-squaring exponential, principal logarithms and spectral
projections of normal matrices.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from . import config
from .errors import (
    AmbiguousSpectrumError,
    BranchCutError,
    ConvergenceError,
    DimensionMismatchError,
    NonFiniteError,
    PreconditionError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

EXPM_SCALE_TARGET = 0.5
EXPM_TERM_RATIO = 1e-17
EXPM_MAX_TERMS = 64


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    vectors: ComplexMatrix
    residual: float


# --- VALIDATION ---
def as_matrix(m) -> ComplexMatrix:
    """Coerce to a 2-D complex128 array and reject NaN/Inf entries."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix contains NaN or Inf entries")
    return arr


def _square(m) -> ComplexMatrix:
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def identity(n: int) -> ComplexMatrix:
    return np.eye(n, dtype=np.complex128)


def norm2(m) -> float:
    return float(np.linalg.norm(m, 2))


# --- ELEMENTARY OPERATIONS ---
def multiply(a, b) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(m) -> ComplexMatrix:
    return as_matrix(m).conj().T


def commutator(a, b) -> ComplexMatrix:
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"commutator of {a.shape} and {b.shape}")
    return a @ b - b @ a


def trace(m) -> complex:
    return complex(np.trace(_square(m)))


def schatten1(m) -> float:
    return float(np.sum(np.linalg.svd(as_matrix(m), compute_uv=False)))


def normality_defect(m) -> float:
    """Frobenius norm of m*m - mm*."""
    m = _square(m)
    mh = m.conj().T
    return float(np.linalg.norm(mh @ m - m @ mh))


def require_normal(m, tolerance: Optional[float] = None) -> ComplexMatrix:
    m = _square(m)
    tol = config.NORMALITY_TOLERANCE if tolerance is None else tolerance
    scale = float(np.linalg.norm(m)) ** 2
    defect = normality_defect(m)
    if defect > tol * max(scale, 1.0):
        raise PreconditionError(f"matrix is not normal: |m*m - mm*| = {defect:.3e}")
    return m


# --- FACTORIZATIONS ---
def _lu(m: ComplexMatrix):
    # scipy warns on exactly singular input; the pivot check below reports it instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    pivots = np.diag(lu)
    scale = float(np.linalg.norm(m, 1))
    smallest = float(np.min(np.abs(pivots)))
    if smallest < config.PIVOT_TOLERANCE * scale or smallest == 0.0:
        raise SingularMatrixError(
            f"matrix is singular to working precision (pivot {smallest:.3e}, norm {scale:.3e})"
        )
    return lu, piv, pivots


def _logdet_from_lu(piv: np.ndarray, pivots: np.ndarray) -> complex:
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    # accumulate in log space: truncations like e^{zR} at dim 400 overflow plain products
    logs = np.log(pivots)
    real = float(np.sum(logs.real))
    phase = float(np.sum(logs.imag)) + math.pi * (swaps % 2)
    return complex(real, math.remainder(phase, 2.0 * math.pi))


def log_determinant(m) -> complex:
    m = _square(m)
    _, piv, pivots = _lu(m)
    return _logdet_from_lu(piv, pivots)


def determinant(m) -> complex:
    return complex(np.exp(log_determinant(m)))


def lu_solve_and_logdet(m) -> Tuple[ComplexMatrix, complex]:
    """Inverse and log-determinant from one pivoted LU factorization.

    The log-determinant is ``sum(log(u_ii))`` plus ``i*pi`` per row swap, with
    the phase reduced to (-pi, pi], so ``exp(logdet) == det(m)``.
    """
    m = _square(m)
    lu, piv, pivots = _lu(m)
    inverse = scipy.linalg.lu_solve((lu, piv), identity(m.shape[0]), check_finite=False)
    return inverse, _logdet_from_lu(piv, pivots)


def inverse(m) -> ComplexMatrix:
    return lu_solve_and_logdet(m)[0]


def svd(m) -> Tuple[ComplexMatrix, np.ndarray, ComplexMatrix]:
    """Return ``(u, sigma, v)`` with ``m = u @ diag(sigma) @ v^*``, sigma descending."""
    m = as_matrix(m)
    try:
        u, sigma, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    return u, sigma, vh.conj().T


def schur(m) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """Complex Schur form ``m = q t q^*`` (LAPACK Hessenberg + shifted QR)."""
    m = _square(m)
    try:
        t, q = scipy.linalg.schur(m, output="complex", check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"QR iteration did not converge: {exc}") from exc
    residual = float(np.linalg.norm(m - q @ t @ q.conj().T))
    bound = config.KERNEL_TOLERANCE * max(float(np.linalg.norm(m)), 1.0) * m.shape[0]
    if residual > bound:
        raise ConvergenceError(f"Schur residual {residual:.3e} exceeds {bound:.3e}", residual)
    return q, t


def normal_eig(m, tolerance: Optional[float] = None) -> EigenDecomposition:
    m = require_normal(m, tolerance)
    q, t = schur(m)
    eigenvalues = np.diag(t).copy()
    residual = float(np.max(np.linalg.norm(m @ q - q * eigenvalues, axis=0)))
    return EigenDecomposition(eigenvalues=eigenvalues, vectors=q, residual=residual)


def hermitian_eig(m) -> EigenDecomposition:
    m = _square(m)
    h = 0.5 * (m + m.conj().T)
    try:
        w, v = scipy.linalg.eigh(h, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"Hermitian eigensolver failed: {exc}") from exc
    residual = float(np.max(np.linalg.norm(h @ v - v * w, axis=0)))
    return EigenDecomposition(eigenvalues=w.astype(np.complex128), vectors=v, residual=residual)


# --- MATRIX FUNCTIONS ---
def expm(m) -> ComplexMatrix:
    """Matrix exponential by Taylor series with scaling and squaring.

    Scales by ``2**-s`` until the 1-norm is at most 0.5, sums Taylor terms
    until a term is below ``1e-17`` of the partial sum, then squares ``s`` times.
    """
    m = _square(m)
    n = m.shape[0]
    norm = float(np.linalg.norm(m, 1))
    squarings = 0
    if norm > EXPM_SCALE_TARGET:
        squarings = int(math.ceil(math.log2(norm / EXPM_SCALE_TARGET)))
    scaled = m / 2.0**squarings

    result = identity(n)
    term = identity(n)
    for k in range(1, EXPM_MAX_TERMS):
        term = (term @ scaled) / k
        result = result + term
        if np.linalg.norm(term, 1) <= EXPM_TERM_RATIO * np.linalg.norm(result, 1):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def logm_normal(m, tolerance: Optional[float] = None) -> ComplexMatrix:
    """Principal logarithm of a normal matrix through its eigendecomposition."""
    eig = normal_eig(m, tolerance)
    lam = eig.eigenvalues
    if np.any(np.abs(lam) < config.LOG_ZERO_TOLERANCE):
        raise SingularMatrixError("logarithm of a matrix with an eigenvalue at 0")
    on_cut = (lam.real < 0) & (np.abs(lam.imag) <= config.BRANCH_CUT_TOLERANCE * np.abs(lam))
    if np.any(on_cut):
        raise BranchCutError(
            f"{int(np.count_nonzero(on_cut))} eigenvalue(s) on the negative real axis; rotate before taking log"
        )
    v = eig.vectors
    return (v * np.log(lam)) @ v.conj().T


def polar(m) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """Right polar decomposition ``m = u @ p`` of an invertible square matrix."""
    m = _square(m)
    w, sigma, v = svd(m)
    if sigma[-1] <= 1e-12 * sigma[0]:
        raise SingularMatrixError(f"polar factor of a near-singular matrix (sigma_min = {sigma[-1]:.3e})")
    u = w @ v.conj().T
    p = (v * sigma) @ v.conj().T
    return u, 0.5 * (p + p.conj().T)


def spectral_projection(
    m,
    region: Callable[[complex], bool],
    boundary_distance: Optional[Callable[[complex], float]] = None,
    tolerance: Optional[float] = None,
) -> ComplexMatrix:
    """Orthogonal projection onto the eigenvectors of a normal m with eigenvalue in region.

    ``boundary_distance`` gives the distance of an eigenvalue to the region
    boundary; eigenvalues closer than ``BOUNDARY_TOLERANCE`` cannot be
    classified and raise.
    """
    eig = normal_eig(m, tolerance)
    lam = eig.eigenvalues
    if boundary_distance is not None:
        for value in lam:
            if boundary_distance(complex(value)) < config.BOUNDARY_TOLERANCE:
                raise AmbiguousSpectrumError(f"eigenvalue {complex(value)} lies on the region boundary")
    indicator = np.array([1.0 if region(complex(value)) else 0.0 for value in lam])
    v = eig.vectors
    p = (v * indicator) @ v.conj().T
    logger.debug("spectral projection of rank %d out of %d", int(indicator.sum()), lam.size)
    return 0.5 * (p + p.conj().T)


def nilpotency_profile(m, n_max: int) -> list:
    """``[||m^n||^(1/n) for n = 1..n_max]`` in the spectral norm."""
    m = _square(m)
    profile = []
    power = identity(m.shape[0])
    for n in range(1, n_max + 1):
        power = power @ m
        profile.append(norm2(power) ** (1.0 / n))
    return profile
