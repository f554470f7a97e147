"""Matrix product circuit and the linear solver built on top of inversion.

Product: encode A1 on (R1, C1) and A2 on (R2, C2), XOR C1 into R2 so that
matching inner indices leave R2 = 0, Hadamard C1, and flag C1 = R2 = 0 in
Bt. The flagged amplitude on (R1 = j1, C2 = l2) is
``2**(-k/2) * (A1 @ A2)[j1, l2]``.

Solve: run the inversion circuit without measuring B, invert B, then use
the product circuit with (R, C, b) in the roles of (R1, C1, R2); the flag
also requires B = 0 after the inversion.
"""

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitPlan, execute, single
from .errors import EncodingError, ShapeError
from .inverse import DEFAULT_Q, build_inverse_plan, embed_bordered
from .layout import RegisterLayout, build_layout, log2_exact
from .oracle import as_matrix
from .state import (QuantumState, amplitude_at, choose_backend, init_product_state,
                    pattern, postselect, product_state, register_probability,
                    sample_counts, zero_assignment)

NORM_TOL = 1e-10


def _cnot_layer(layout, control_reg, target_reg):
    ctrl_q = layout[control_reg].qubits
    tgt_q = layout[target_reg].qubits
    return [single("cx", (t,), ((c, 1),), tag=f"CNOT[{control_reg}->{target_reg}]")
            for c, t in zip(ctrl_q, tgt_q)]


def build_matmul_plan(layout: RegisterLayout) -> CircuitPlan:
    plan = CircuitPlan(layout, sizes=dict(layout.sizes))
    plan.add("CNOT", _cnot_layer(layout, "C1", "R2"))
    plan.add("H_C", [single("hblock", layout["C1"].qubits, tag="H_C1")])
    plan.add("W3", [single("cx", layout["Bt"].qubits, pattern(layout, {"C1": 0, "R2": 0}), tag="W3")])
    return plan


def build_solve_plan(N: int, layout: RegisterLayout | None = None,
                     mask_unlabeled: bool = True) -> CircuitPlan:
    if layout is None:
        layout = build_layout("solve", N)
    plan = build_inverse_plan(N, layout, mask_unlabeled)
    plan.add("X_B", [single("x", layout["B"].qubits, tag="X_B")])
    plan.add("CNOT", _cnot_layer(layout, "C", "b"))
    plan.add("H_C", [single("hblock", layout["C"].qubits, tag="H_C")])
    plan.add("W3", [single("cx", layout["Bt"].qubits,
                           pattern(layout, {"C": 0, "B": 0, "b": 0}), tag="W3")])
    return plan


@dataclass
class MulRunResult:
    amplitudes: np.ndarray
    success_probability: float
    n: int
    k: int
    m: int
    backend: str
    mode: str
    state: QuantumState
    shots: int | None = None
    b1_count: int | None = None
    seed: int | None = None

    @property
    def G(self) -> float:
        """Norm of the product, inferred from the flag probability G^2 / 2^k."""
        return math.sqrt(self.success_probability * 2 ** self.k)

    @property
    def product(self) -> np.ndarray:
        return self.amplitudes * 2.0 ** (self.k / 2)

    def normalized_product(self) -> np.ndarray:
        if self.success_probability <= 0:
            return np.zeros_like(self.amplitudes)
        return self.amplitudes / math.sqrt(self.success_probability)


def _check_frobenius(a, label):
    nrm = float(np.linalg.norm(a))
    if abs(nrm - 1.0) > NORM_TOL:
        raise EncodingError(f"{label} must have unit Frobenius norm, got {nrm:.12g}")


def run_matmul(a1, a2, backend: str = "auto", mode: str = "exact", shots: int = 10000,
               seed=None, max_dense_qubits: int | None = None,
               use_numba: bool | None = None) -> MulRunResult:
    """Simulate the product circuit for two globally normalised matrices."""
    if mode not in ("exact", "shots"):
        raise ValueError(f"unknown mode {mode!r}")
    a1 = as_matrix(a1)
    a2 = as_matrix(a2)
    if a1.shape[1] != a2.shape[0]:
        raise ShapeError(f"cannot multiply {a1.shape} by {a2.shape}")
    n = log2_exact(a1.shape[0], "rows of the left matrix")
    k = log2_exact(a1.shape[1], "inner dimension")
    m = log2_exact(a2.shape[1], "columns of the right matrix")
    _check_frobenius(a1, "left matrix")
    _check_frobenius(a2, "right matrix")

    layout = build_layout("matmul", n=n, k=k, m=m)
    backend = choose_backend(layout, backend, max_dense_qubits)
    # vector index over (R, C) is row + col * rows, i.e. column-major ravel
    state = product_state(layout, [(("R1", "C1"), a1.T.ravel()), (("R2", "C2"), a2.T.ravel())],
                          backend, max_dense_qubits)
    execute(state, build_matmul_plan(layout), use_numba=use_numba)

    table = np.zeros((a1.shape[0], a2.shape[1]), dtype=complex)
    for j1 in range(a1.shape[0]):
        for l2 in range(a2.shape[1]):
            table[j1, l2] = amplitude_at(state, zero_assignment(layout, R1=j1, C2=l2, Bt=1))
    res = MulRunResult(table, register_probability(state, "Bt", 1), n, k, m,
                       backend, mode, state, seed=seed)
    if mode == "shots":
        res.shots = int(shots)
        res.b1_count = int(sample_counts(state, "Bt", shots, seed)[1])
    return res


@dataclass
class SolveRunResult:
    amplitudes: np.ndarray
    success_probability: float
    q: float
    N: int
    n: int
    tilde_N: int
    inner: np.ndarray
    rhs: np.ndarray
    backend: str
    mode: str
    state: QuantumState
    shots: int | None = None
    b1_count: int | None = None
    seed: int | None = None

    @property
    def G(self) -> float:
        """Norm of the flagged R vector, inferred from the flag probability G^2 / 2^n."""
        return math.sqrt(self.success_probability * 2 ** self.n)

    def normalized_solution(self) -> np.ndarray:
        """Post-selected amplitudes on R = 1..N-1."""
        if self.success_probability <= 0:
            return np.zeros_like(self.amplitudes)
        return self.amplitudes / math.sqrt(self.success_probability)


def check_rhs(b, N: int) -> np.ndarray:
    b = np.asarray(b, dtype=complex).ravel()
    if b.shape[0] != N:
        raise ShapeError(f"rhs register needs {N} amplitudes, got {b.shape[0]}")
    if not np.all(np.isfinite(b)):
        raise EncodingError("rhs has non-finite entries")
    if b[0] != 0:
        raise EncodingError("rhs amplitude b_0 must be zero: R = 0 and C = 0 carry no inverse entries")
    nrm = float(np.linalg.norm(b))
    if abs(nrm - 1.0) > NORM_TOL:
        raise EncodingError(f"rhs must have unit norm, got {nrm:.12g}")
    return b


def run_solve(a, b, q: float = DEFAULT_Q, backend: str = "auto", mode: str = "exact",
              shots: int = 10000, seed=None, max_dense_qubits: int | None = None,
              use_numba: bool | None = None) -> SolveRunResult:
    """Simulate inversion followed by multiplication with the encoded rhs.

    ``a`` is the pre-scaled (N-1)x(N-1) inner matrix, ``b`` the length-N rhs
    register state with ``b[0] == 0``.
    """
    if mode not in ("exact", "shots"):
        raise ValueError(f"unknown mode {mode!r}")
    bm = embed_bordered(a, q)
    N = bm.N
    b = check_rhs(b, N)
    layout = build_layout("solve", N)
    backend = choose_backend(layout, backend, max_dense_qubits)
    state = init_product_state(layout, list(bm.full), backend=backend,
                               register_states={"b": b}, max_dense_qubits=max_dense_qubits)
    execute(state, build_solve_plan(N, layout), fuse_hadamard=(mode == "exact"), use_numba=use_numba)

    amps = np.array([amplitude_at(state, zero_assignment(layout, R=j, Bt=1)) for j in range(1, N)])
    res = SolveRunResult(amps, register_probability(state, "Bt", 1), bm.q, N, layout.sizes["n"],
                         layout.sizes["tilde_N"], bm.inner, b, backend, mode, state, seed=seed)
    if mode == "shots":
        res.shots = int(shots)
        res.b1_count = int(sample_counts(state, "Bt", shots, seed)[1])
    return res


def output_state(result) -> QuantumState:
    return postselect(result.state, "Bt", 1)[0]
