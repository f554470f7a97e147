"""Inversion circuit: border the (N-1)x(N-1) matrix into an N x N one whose
determinant expansion contains every signed minor, tag each minor's terms
with its (row, column) in registers R and C, then run the determinant
machinery.

After post-selecting B = 1 the amplitude on R = j, C = i (1-based) is
``-q det(A) inv(A)[j, i] / 2**((tilde_N + n) / 2)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitPlan, execute, single
from .det import build_det_plan, zero_sa_pattern
from .errors import EncodingError, ShapeError
from .layout import RegisterLayout, build_layout, log2_exact
from .oracle import LEIBNIZ_MAX_N, as_matrix, leibniz_det
from .state import (QuantumState, amplitude_at, choose_backend, init_product_state,
                    pattern, postselect, register_bits, register_probability,
                    sample_counts, zero_assignment)

ROW_TOL = 1e-10
DEFAULT_Q = 1 / math.sqrt(2)


@dataclass(frozen=True)
class BorderedMatrix:
    inner: np.ndarray
    q: float
    N: int
    full: np.ndarray = field(repr=False)


def embed_bordered(inner_scaled, q: float) -> BorderedMatrix:
    """First row all 1/sqrt(N), first column q below the corner, inner block below-right."""
    a = as_matrix(inner_scaled)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"inner matrix must be square, got {a.shape}")
    N = a.shape[0] + 1
    log2_exact(N, "inner size + 1")
    q = float(q)
    if not 0.0 < q < 1.0:
        raise EncodingError(f"border amplitude q must lie in (0, 1), got {q}")
    target = math.sqrt(1.0 - q * q)
    norms = np.linalg.norm(a, axis=1)
    for i, nrm in enumerate(norms):
        if abs(nrm - target) > ROW_TOL:
            raise EncodingError(
                f"inner row {i} has norm {nrm:.12g}, expected sqrt(1-q^2) = {target:.12g}", row=i + 1)
    full = np.empty((N, N), dtype=complex)
    full[0, :] = 1.0 / math.sqrt(N)
    full[1:, 0] = q
    full[1:, 1:] = a
    return BorderedMatrix(a, q, N, full)


def build_W_SRC(layout: RegisterLayout, N: int) -> list:
    """One gate per (i, j) in 1..N-1: if S_i = |0> and S_0 = |j>, write j into R and i into C."""
    gates = []
    for i in range(1, N):
        for j in range(1, N):
            ctrl = pattern(layout, {f"S{i}": 0, "S0": j})
            targets = register_bits(layout, "R", j) + register_bits(layout, "C", i)
            gates.append(single("cx", targets, ctrl, tag=f"W_SRC[{i},{j}]"))
    return gates


def unlabeled_mask(layout: RegisterLayout) -> list:
    """Undo the B flag on the sorted branch whose column register is still 0.

    Those are the terms where row 0 took column 0; they sum to det(A)/sqrt(N)
    and carry no inverse entry.
    """
    ctrl = zero_sa_pattern(layout) + pattern(layout, {"C": 0})
    return [single("cx", layout["B"].qubits, ctrl, tag="W2_mask")]


def build_inverse_plan(N: int, layout: RegisterLayout | None = None,
                       mask_unlabeled: bool = True) -> CircuitPlan:
    if layout is None:
        layout = build_layout("inv", N)
    plan = CircuitPlan(layout, sizes=dict(layout.sizes))
    for g in build_W_SRC(layout, N):
        plan.add("W_SRC", [g])
    plan.extend(build_det_plan(N, layout))
    if mask_unlabeled:
        tag, layers = plan.groups[-1]
        plan.groups[-1] = (tag, layers + unlabeled_mask(layout))
    return plan


@dataclass
class InvRunResult:
    amplitudes: np.ndarray
    success_probability: float
    q: float
    N: int
    n: int
    tilde_N: int
    inner: np.ndarray
    backend: str
    mode: str
    state: QuantumState
    shots: int | None = None
    b1_count: int | None = None
    seed: int | None = None

    @property
    def prefactor_scale(self) -> float:
        return 2.0 ** ((self.tilde_N + self.n) / 2)

    def normalized_table(self) -> np.ndarray:
        """Amplitudes of the post-selected R,C state: -e^{i arg det} inv / G."""
        if self.success_probability <= 0:
            return np.zeros_like(self.amplitudes)
        return self.amplitudes / math.sqrt(self.success_probability)

    @property
    def det_times_G(self) -> float:
        """|det(A)| * G, the magnitude recoverable from the flag probability alone."""
        return math.sqrt(self.success_probability) * self.prefactor_scale / self.q

    def inverse_given_det(self, det) -> np.ndarray:
        """Exact inverse of the encoded inner matrix once its determinant is known."""
        return -self.amplitudes * self.prefactor_scale / (self.q * det)

    def verified_inverse(self) -> np.ndarray:
        return self.inverse_given_det(leibniz_det(self.inner))

    @property
    def G(self) -> float:
        """Frobenius norm of the inverse of the encoded inner matrix."""
        return float(np.linalg.norm(self.verified_inverse()))


def read_table(state: QuantumState, N: int, **fixed) -> np.ndarray:
    """Amplitudes on (R=j, C=i), S=0, A=0, B=1, returned as table[j-1, i-1]."""
    layout = state.layout
    table = np.zeros((N - 1, N - 1), dtype=complex)
    for i in range(1, N):
        for j in range(1, N):
            table[j - 1, i - 1] = amplitude_at(state, zero_assignment(layout, B=1, R=j, C=i, **fixed))
    return table


def run_inverse(a, q: float = DEFAULT_Q, backend: str = "auto", mode: str = "exact",
                shots: int = 10000, seed=None, mask_unlabeled: bool = True,
                max_dense_qubits: int | None = None, use_numba: bool | None = None) -> InvRunResult:
    """Simulate the inversion circuit for an inner matrix whose rows all have norm sqrt(1-q^2).

    A singular inner matrix gives an all-zero table and zero probability.
    ``mask_unlabeled=False`` reproduces the circuit without the C = 0 un-flag,
    in which the R = C = 0 branch also raises B.
    """
    if mode not in ("exact", "shots"):
        raise ValueError(f"unknown mode {mode!r}")
    bm = embed_bordered(a, q)
    N = bm.N
    layout = build_layout("inv", N)
    backend = choose_backend(layout, backend, max_dense_qubits)
    state = init_product_state(layout, list(bm.full), backend=backend,
                               max_dense_qubits=max_dense_qubits)
    plan = build_inverse_plan(N, layout, mask_unlabeled)
    execute(state, plan, fuse_hadamard=(mode == "exact"), use_numba=use_numba)

    res = InvRunResult(read_table(state, N), register_probability(state, "B", 1), bm.q, N,
                       layout.sizes["n"], layout.sizes["tilde_N"], bm.inner, backend, mode,
                       state, seed=seed)
    if mode == "shots":
        res.shots = int(shots)
        res.b1_count = int(sample_counts(state, "B", shots, seed)[1])
    return res


def output_state(result: InvRunResult) -> QuantumState:
    return postselect(result.state, "B", 1)[0]


def can_verify(N: int) -> bool:
    return N - 1 <= LEIBNIZ_MAX_N
