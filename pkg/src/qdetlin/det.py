"""Determinant circuit: swap-sort each product term into |0>|1>...|N-1>,
recording every transposition in an ancilla with a -1 phase, then sum the
ancilla branches with Hadamards and flag the sorted term.

Ancilla A_k holds ``j - k`` when S_k was swapped with S_j at stage k and
|0> when no swap happened.
"""

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitPlan, execute, single
from .errors import CircuitConstructionError, PostselectionError, ShapeError
from .layout import RegisterLayout, build_layout, log2_exact
from .oracle import as_matrix
from .state import (QuantumState, amplitude_at, choose_backend, init_product_state,
                    pattern, postselect, register_bits, register_probability,
                    sample_counts, zero_assignment)


def _stage_check(layout, j, k):
    N = layout.sizes["N"]
    if not (0 <= k <= N - 2 and k < j <= N - 1):
        raise CircuitConstructionError(f"need 0 <= k <= N-2 and k < j <= N-1, got j={j}, k={k}")


def build_V(j: int, k: int, layout: RegisterLayout) -> list:
    """If S_j holds |k>, write j-k into A_k and flip the sign of that branch."""
    _stage_check(layout, j, k)
    ctrl = pattern(layout, {f"S{j}": k})
    bits = register_bits(layout, f"A{k}", j - k)
    return [single("cx", bits, ctrl, tag=f"V[{j},{k}]"),
            single("cz", bits[:1], ctrl, tag=f"Z[{j},{k}]")]


def build_U(k: int, j: int, layout: RegisterLayout) -> list:
    """If A_k holds j-k, exchange S_k and S_j qubit by qubit."""
    _stage_check(layout, j, k)
    ctrl = pattern(layout, {f"A{k}": j - k})
    return [single("cswap", layout[f"S{k}"].qubits, ctrl,
                   partners=layout[f"S{j}"].qubits, tag=f"U[{k},{j}]")]


def sorted_pattern_bits(layout: RegisterLayout) -> tuple:
    """Qubits that are 1 in |0>_{S_0}|1>_{S_1}...|N-1>_{S_{N-1}}."""
    N = layout.sizes["N"]
    return tuple(q for j in range(1, N) for q in register_bits(layout, f"S{j}", j))


def zero_sa_pattern(layout: RegisterLayout) -> tuple:
    regs = [r.name for r in layout.by_role("row_state") + layout.by_role("swap_record")]
    return pattern(layout, {name: 0 for name in regs})


def build_det_plan(N: int, layout: RegisterLayout | None = None,
                   max_qubits: int | None = None) -> CircuitPlan:
    """Sorting network, Hadamards on A, X on the sorted pattern, then the B flag.

    ``layout`` may be a larger layout (inverse, solve) that contains the
    determinant registers.
    """
    if layout is None:
        layout = build_layout("det", N, max_qubits=max_qubits)
    plan = CircuitPlan(layout, sizes=dict(layout.sizes))
    for k in range(N - 1):
        for j in range(k + 1, N):
            plan.add("V", build_V(j, k, layout))
            plan.add("U", build_U(k, j, layout))
    a_qubits = layout.qubits_of(r.name for r in layout.by_role("swap_record"))
    plan.add("H_A", [single("hblock", a_qubits, tag="H_A")])
    plan.add("X_S", [single("x", sorted_pattern_bits(layout), tag="X_S")])
    plan.add("W2", [single("cx", layout["B"].qubits, zero_sa_pattern(layout), tag="W2")])
    return plan


@dataclass
class DetRunResult:
    amplitude: complex
    success_probability: float
    N: int
    n: int
    tilde_N: int
    backend: str
    mode: str
    state: QuantumState
    shots: int | None = None
    b1_count: int | None = None
    seed: int | None = None

    @property
    def det_scaled(self) -> complex:
        """Determinant of the row-normalised matrix read off the flagged amplitude."""
        return self.amplitude * 2.0 ** (self.tilde_N / 2)

    def output_state(self) -> QuantumState:
        """The B = 1 branch, renormalised; raises if that branch is empty."""
        return postselect(self.state, "B", 1)[0]


def _square_pow2(m):
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"determinant needs a square matrix, got {a.shape}")
    log2_exact(a.shape[0])
    return a


def run_determinant(m, backend: str = "auto", mode: str = "exact", shots: int = 10000,
                    seed=None, max_dense_qubits: int | None = None,
                    use_numba: bool | None = None) -> DetRunResult:
    """Simulate the determinant circuit on a matrix with unit-norm rows.

    ``exact`` fuses the ancilla Hadamards with the projection onto A = 0.
    ``shots`` applies real Hadamards and also samples B ``shots`` times.
    A zero determinant is a valid outcome with zero success probability.
    """
    if mode not in ("exact", "shots"):
        raise ValueError(f"unknown mode {mode!r}")
    a = _square_pow2(m)
    N = a.shape[0]
    layout = build_layout("det", N)
    backend = choose_backend(layout, backend, max_dense_qubits)
    state = init_product_state(layout, list(a), backend=backend, max_dense_qubits=max_dense_qubits)
    plan = build_det_plan(N, layout)
    execute(state, plan, fuse_hadamard=(mode == "exact"), use_numba=use_numba)

    amp = amplitude_at(state, zero_assignment(layout, B=1))
    prob = register_probability(state, "B", 1)
    res = DetRunResult(amp, prob, N, layout.sizes["n"], layout.sizes["tilde_N"],
                       backend, mode, state, seed=seed)
    if mode == "shots":
        counts = sample_counts(state, "B", shots, seed)
        res.shots = int(shots)
        res.b1_count = int(counts[1])
    return res


def detsign_state_check(state: QuantumState, tol: float = 1e-10) -> bool:
    """True iff ``state`` (already post-selected on B = 1) is a single unit-modulus
    amplitude on S = 0, A = 0."""
    layout = state.layout
    if state.backend == "dense":
        support = [int(i) for i in np.flatnonzero(np.abs(state.amplitudes) > tol)]
    else:
        support = sorted(i for i, a in state.amplitudes.items() if abs(a) > tol)
    target = layout.index_of(zero_assignment(layout, B=1))
    if support != [target]:
        return False
    amp = amplitude_at(state, zero_assignment(layout, B=1))
    return abs(abs(amp) - 1.0) <= tol


def output_phase(result: DetRunResult) -> complex:
    """arg(det) carried by the post-selected output state."""
    if result.success_probability <= 0:
        raise PostselectionError("determinant is zero; no B = 1 branch")
    return result.amplitude / math.sqrt(result.success_probability)
