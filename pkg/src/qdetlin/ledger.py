"""Scaling between user matrices and the normalised encodings, and readout of
determinants, inverses, products and solutions from flagged amplitudes.

The circuits only accept unit-norm rows (determinant), rows of norm
sqrt(1-q^2) (inverse, solve) or unit Frobenius norm (product). A
:class:`ScaleLedger` records what was divided out so results for the
original matrix can be restored.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError, SingularityError
from .layout import tilde_N as tilde_N_of
from .oracle import as_matrix

SCHEMES = ("row-wise", "bordered", "frobenius")


@dataclass(frozen=True)
class ScaleLedger:
    row_norms: tuple
    target_norm: float
    q: float | None
    scheme: str

    @property
    def scales(self) -> np.ndarray:
        """Per-row factors s_i applied to the original matrix (scaled = diag(s) @ original)."""
        return self.target_norm / np.asarray(self.row_norms)

    @property
    def dim(self) -> int:
        return len(self.row_norms)


def _row_norms(a):
    norms = np.linalg.norm(a, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise SingularityError(f"row {int(zero[0])} is zero; the matrix is singular", 0.0)
    return norms


def normalize_for_det(m):
    a = as_matrix(m)
    norms = _row_norms(a)
    return a / norms[:, None], ScaleLedger(tuple(float(x) for x in norms), 1.0, None, "row-wise")


def normalize_for_inverse(m, q: float = 1 / math.sqrt(2)):
    a = as_matrix(m)
    q = float(q)
    if not 0.0 < q < 1.0:
        raise ParameterError(f"q must lie in (0, 1), got {q}")
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"inverse needs a square matrix, got {a.shape}")
    norms = _row_norms(a)
    target = math.sqrt(1.0 - q * q)
    return (a * (target / norms)[:, None],
            ScaleLedger(tuple(float(x) for x in norms), target, q, "bordered"))


def normalize_for_matmul(m):
    a = as_matrix(m)
    nrm = float(np.linalg.norm(a))
    if nrm == 0:
        raise SingularityError("matrix is all zeros", 0.0)
    return a / nrm, ScaleLedger((nrm,), 1.0, None, "frobenius")


def recover_det(amplitude, ledger: ScaleLedger, tilde_n: int) -> complex:
    return complex(amplitude) * 2.0 ** (tilde_n / 2) * float(np.prod(ledger.row_norms))


def _bordered_consts(ledger):
    if ledger.scheme != "bordered":
        raise ParameterError(f"ledger scheme {ledger.scheme!r} is not bordered")
    N = ledger.dim + 1
    n = N.bit_length() - 1
    return N, n, tilde_N_of(N)


def recover_inverse(table, ledger: ScaleLedger, det_scaled) -> np.ndarray:
    """Inverse of the original matrix from the flagged (R, C) amplitudes.

    ``det_scaled`` is the determinant of the encoded (scaled) inner matrix.
    Since scaled = D @ original, inv(original) = inv(scaled) @ D.
    """
    _, n, tn = _bordered_consts(ledger)
    if det_scaled == 0:
        raise SingularityError("determinant of the encoded matrix is zero", 0.0)
    inv_scaled = -np.asarray(table) * 2.0 ** ((tn + n) / 2) / (ledger.q * det_scaled)
    return inv_scaled * ledger.scales[None, :]


def encode_rhs(b, ledger: ScaleLedger):
    """Return the length-N rhs register state D b / |D b| (with b_0 = 0) and |D b|."""
    b = np.asarray(b, dtype=complex).ravel()
    if b.shape[0] != ledger.dim:
        raise ShapeError(f"rhs has length {b.shape[0]}, system has {ledger.dim} rows")
    db = ledger.scales * b
    nrm = float(np.linalg.norm(db))
    if nrm == 0:
        raise ParameterError("rhs is zero; the solution is trivially zero")
    return np.concatenate([[0.0], db / nrm]), nrm


def recover_solution(x_amplitudes, G: float, ledger: ScaleLedger, b_norm: float,
                     det_scaled) -> np.ndarray:
    """Solution of the original system from the normalised output amplitudes on R = 1..N-1.

    The flagged vector is G * psi = c * inv(scaled) @ b_enc with
    c = -q det(scaled) / 2**((tilde_N + n) / 2), and x = |D b| inv(scaled) @ b_enc.
    """
    _, n, tn = _bordered_consts(ledger)
    if G == 0:
        raise SingularityError("zero flag probability: no solution was produced", 0.0)
    c = -ledger.q * det_scaled / 2.0 ** ((tn + n) / 2)
    return b_norm * G * np.asarray(x_amplitudes) / c


def recover_product(product_scaled, left: ScaleLedger, right: ScaleLedger) -> np.ndarray:
    return np.asarray(product_scaled) * left.row_norms[0] * right.row_norms[0]
