import numpy as np
import scipy.linalg as sla

from twisted.logger import Logger

from ..errors import DimensionMismatchError, DegenerateDivisorError, RankDeficiencyError


__all__ = [
    'DEFAULT_PINV_TOL',
    'DIVISOR_FLOOR',
    'as_complex_matrix',
    'matmul',
    'hadamard_mul',
    'hadamard_div',
    'kronecker',
    'right_pinv',
]


DEFAULT_PINV_TOL = 1e-9
DIVISOR_FLOOR = 1e-300

logger = Logger()


def as_complex_matrix(a):
    """
    Returns a 2-D complex128 view of a. Vectors become single-row matrices.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 1:
        a = a[np.newaxis, :]
    return a


def matmul(a, b):
    """
    Complex matrix product a @ b.
    :type a: array-like r x k
    :type b: array-like k x c
    :return: ndarray r x c
    """
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)

    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionMismatchError('matmul', a.shape, b.shape)

    return a @ b


def hadamard_mul(a, b):
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)

    if a.shape != b.shape:
        raise DimensionMismatchError('hadamard_mul', a.shape, b.shape)

    return a * b


def hadamard_div(a, b):
    """
    Elementwise quotient a / b. Every divisor must have modulus above DIVISOR_FLOOR,
    otherwise the first offending entry is reported.
    """
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)

    if a.shape != b.shape:
        raise DimensionMismatchError('hadamard_div', a.shape, b.shape)

    degenerate = np.argwhere(np.abs(b) <= DIVISOR_FLOOR)
    if len(degenerate) > 0:
        i, j = degenerate[0]
        raise DegenerateDivisorError((i, j), b[i, j])

    return a / b


def kronecker(u, v):
    """
    Kronecker product of two complex vectors: out[i * len(v) + j] = u[i] * v[j]
    """
    u = np.ravel(np.asarray(u, dtype=np.complex128))
    v = np.ravel(np.asarray(v, dtype=np.complex128))

    if u.size == 0 or v.size == 0:
        raise DimensionMismatchError('kronecker', u.shape, v.shape)

    return np.kron(u, v)


def right_pinv(a, tol=DEFAULT_PINV_TOL):
    """
    Moore-Penrose pseudo-inverse of a wide (K <= M) matrix.

    The common path is the right-inverse closed form A^H (A A^H)^-1 computed with a Cholesky
    solve on the small K x K Gram matrix. When the Gram matrix condition number exceeds 1/tol
    (or Cholesky fails) the SVD with relative cutoff tol * sigma_max is used instead.

    :type a: array-like K x M with K <= M
    :type tol: float relative tolerance
    :return: ndarray M x K
    """
    a = as_complex_matrix(a)
    k, m = a.shape

    if k > m:
        raise DimensionMismatchError('right_pinv', a.shape, (m, k))

    a_h = a.conj().T
    gram = a @ a_h

    condition = np.linalg.cond(gram)
    if np.isfinite(condition) and condition <= 1. / tol:
        try:
            factor = sla.cho_factor(gram, lower=False, check_finite=False)
            return sla.cho_solve(factor, a, check_finite=False).conj().T
        except np.linalg.LinAlgError:
            pass

    logger.warn('right_pinv: Gram matrix condition {condition:.3e} exceeds 1/tol, using SVD', condition=condition)

    u, s, vh = sla.svd(a, full_matrices=False)

    if s.size == 0 or s[0] == 0.:
        raise RankDeficiencyError(0, k)

    rank = int(np.sum(s > tol * s[0]))
    if rank < k:
        raise RankDeficiencyError(rank, k)

    return (vh.conj().T / s[np.newaxis, :]) @ u.conj().T
