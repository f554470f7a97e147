"""Brute-force classical references: Leibniz determinant, cofactor inverse,
solve and triple-loop matrix product.

These are deliberately naive. They exist to check circuit outputs, not to be
fast or numerically clever.
"""

from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import MalformedInputError, ShapeError, SingularityError, SizeError

LEIBNIZ_MAX_N = 10
SINGULAR_RTOL = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MalformedInputError("matrix entries must be finite")
    return a


def permutation_parity(p) -> int:
    """Sign of a permutation, +1 for even and -1 for odd, by inversion count."""
    p = [int(v) for v in p]
    if sorted(p) != list(range(len(p))):
        raise MalformedInputError(f"not a permutation of 0..{len(p) - 1}: {p}")
    inversions = 0
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def _permutation_table(n):
    perms = np.array(list(permutations(range(n))), dtype=np.intp)
    signs = np.array([permutation_parity(p) for p in perms], dtype=float)
    return perms, signs


def leibniz_det(m) -> complex:
    """Sum over all N! permutations of sign(pi) * prod_i m[pi(i), i]."""
    a = as_matrix(m)
    n, c = a.shape
    if n != c:
        raise ShapeError(f"determinant needs a square matrix, got {a.shape}")
    if n > LEIBNIZ_MAX_N:
        raise SizeError(f"Leibniz oracle limited to N <= {LEIBNIZ_MAX_N}, got {n}")
    perms, signs = _permutation_table(n)
    terms = a[perms, np.arange(n)].prod(axis=1)
    return complex(np.dot(signs, terms))


def singularity_threshold(m) -> float:
    a = as_matrix(m)
    norms = np.linalg.norm(a, axis=1)
    if np.any(norms == 0):
        return np.inf
    geo = float(np.exp(np.mean(np.log(norms))))
    return SINGULAR_RTOL * geo ** a.shape[0]


def _minor(a, i, j):
    return np.delete(np.delete(a, i, axis=0), j, axis=1)


def cofactor_inverse(m) -> np.ndarray:
    """Inverse from signed minors: inv[j, i] = (-1)**(i+j) M_ij / det."""
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ShapeError(f"inverse needs a square matrix, got {a.shape}")
    det = leibniz_det(a)
    if abs(det) < singularity_threshold(a):
        raise SingularityError(f"matrix is singular (|det| = {abs(det):.3e})", abs(det))
    if n == 1:
        return np.array([[1.0 / det]], dtype=complex)
    inv = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            inv[j, i] = (-1) ** (i + j) * leibniz_det(_minor(a, i, j)) / det
    return inv


def oracle_solve(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
        raise ShapeError(f"cannot solve {a.shape} system with rhs of length {b.shape[0]}")
    return oracle_matmul(cofactor_inverse(a), b[:, None])[:, 0]


def oracle_matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for k in range(b.shape[1]):
            acc = 0j
            for j in range(a.shape[1]):
                acc += a[i, j] * b[j, k]
            out[i, k] = acc
    return out
