"""Dense and sparse state vectors plus the small gate set the circuits use.

A dense state is a complex128 array of length ``2**total_qubits``. A sparse
state is a ``{basis_index: amplitude}`` dict with entries below
``PRUNE_THRESHOLD`` dropped after each layer. Both index bits the same way
(see :mod:`qdetlin.layout`), so amplitudes are directly comparable.
"""

import math
import os
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import kernels
from .errors import (CircuitConstructionError, EncodingError, ParameterError,
                     PostselectionError, ResourceCapError)
from .layout import RegisterLayout

PRUNE_THRESHOLD = 1e-15
AUTO_DENSE_MAX = 22
DEFAULT_DENSE_CAP = 26
NORM_TOL = 1e-10

KINDS = ("x", "z", "h", "cx", "cz", "cswap", "hblock")


def dense_cap(override: int | None = None) -> int:
    """Largest qubit count the dense backend will allocate.

    An explicit ``override`` wins over ``QDL_MAX_QUBITS``, which wins over the
    default of 26.
    """
    if override is not None:
        return int(override)
    env = os.environ.get("QDL_MAX_QUBITS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"QDL_MAX_QUBITS must be an integer, got {env!r}") from None
    return DEFAULT_DENSE_CAP


def choose_backend(layout: RegisterLayout, backend: str = "auto",
                   max_dense_qubits: int | None = None) -> str:
    """``auto`` picks dense up to 22 qubits (or the dense cap, if lower)."""
    if backend == "auto":
        limit = min(AUTO_DENSE_MAX, dense_cap(max_dense_qubits))
        return "dense" if layout.total_qubits <= limit else "sparse"
    if backend not in ("dense", "sparse"):
        raise ParameterError(f"unknown backend {backend!r}")
    return backend


@dataclass(frozen=True)
class GateLayer:
    """One primitive at the circuits' granularity.

    ``controls`` is a tuple of ``(qubit, bit)`` pairs; the gate acts only on
    the branch where every listed qubit holds its bit. For ``cswap`` the
    qubits ``targets[i]`` and ``partners[i]`` are exchanged.
    """

    kind: str
    targets: tuple = ()
    controls: tuple = ()
    partners: tuple = ()
    tag: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitConstructionError(f"unknown gate kind {self.kind!r}")
        if not self.targets:
            raise CircuitConstructionError(f"{self.kind} gate has no targets")
        ctrl = {q for q, _ in self.controls}
        touched = set(self.targets) | set(self.partners)
        if ctrl & touched:
            raise CircuitConstructionError(
                f"{self.kind} gate: control qubits {sorted(ctrl & touched)} are also targets")
        if len(touched) != len(self.targets) + len(self.partners):
            raise CircuitConstructionError(f"{self.kind} gate repeats a target qubit")
        if self.kind == "cswap" and len(self.partners) != len(self.targets):
            raise CircuitConstructionError("cswap needs one partner per target")
        if self.kind in ("x", "z", "h", "hblock") and self.controls:
            raise CircuitConstructionError(f"{self.kind} gate takes no controls")

    @property
    def control_mask(self) -> int:
        return sum(1 << q for q, _ in self.controls)

    @property
    def control_value(self) -> int:
        return sum(int(b) << q for q, b in self.controls)

    @property
    def qubits(self) -> set:
        return {q for q, _ in self.controls} | set(self.targets) | set(self.partners)


def pattern(layout: RegisterLayout, values: dict) -> tuple:
    """Turn ``{register: basis value}`` into a ``(qubit, bit)`` control tuple."""
    out = []
    for name, value in values.items():
        reg = layout[name]
        if not 0 <= value < (1 << reg.width):
            raise CircuitConstructionError(f"value {value} does not fit register {name}")
        out.extend((q, (value >> t) & 1) for t, q in enumerate(reg.qubits))
    return tuple(out)


def register_bits(layout: RegisterLayout, name: str, value: int) -> tuple:
    """Qubits of ``name`` that are set in ``value``."""
    reg = layout[name]
    return tuple(q for t, q in enumerate(reg.qubits) if (value >> t) & 1)


@dataclass
class QuantumState:
    layout: RegisterLayout
    backend: str
    amplitudes: object
    meta: dict = field(default_factory=dict)

    @property
    def total_qubits(self) -> int:
        return self.layout.total_qubits

    def norm_squared(self) -> float:
        if self.backend == "dense":
            return float(np.vdot(self.amplitudes, self.amplitudes).real)
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def copy(self) -> "QuantumState":
        amps = self.amplitudes.copy()
        return QuantumState(self.layout, self.backend, amps, dict(self.meta))

    def to_dense(self) -> np.ndarray:
        if self.backend == "dense":
            return self.amplitudes.copy()
        out = np.zeros(1 << self.total_qubits, dtype=complex)
        for idx, amp in self.amplitudes.items():
            out[idx] = amp
        return out

    def support(self) -> list:
        if self.backend == "dense":
            return [int(i) for i in np.flatnonzero(np.abs(self.amplitudes) > PRUNE_THRESHOLD)]
        return sorted(self.amplitudes)


def _factor_vector(layout, names, vec):
    names = tuple(names)
    regs = sorted((layout[n] for n in names), key=lambda r: r.offset)
    for a, b in zip(regs, regs[1:]):
        if a.offset + a.width != b.offset:
            raise EncodingError(f"factor registers {names} are not contiguous")
    width = sum(r.width for r in regs)
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.shape[0] != 1 << width:
        raise EncodingError(f"factor over {names} needs {1 << width} amplitudes, got {vec.shape[0]}")
    if not np.all(np.isfinite(vec)):
        raise EncodingError(f"factor over {names} has non-finite amplitudes")
    return regs[0].offset, width, vec


def product_state(layout: RegisterLayout, factors, backend: str = "auto",
                  max_dense_qubits: int | None = None) -> QuantumState:
    """Tensor product of per-register amplitude vectors; uncovered registers start in |0>.

    ``factors`` is a sequence of ``(register_names, vector)`` where the names
    span contiguous bits and the vector is indexed little-endian over them.
    Vectors are written as given; normalisation is the caller's business.
    """
    backend = choose_backend(layout, backend, max_dense_qubits)
    placed = sorted((_factor_vector(layout, names, vec) for names, vec in factors),
                    key=lambda t: t[0])
    for (o1, w1, _), (o2, _, _) in zip(placed, placed[1:]):
        if o1 + w1 > o2:
            raise EncodingError("state factors overlap")
    total = layout.total_qubits

    if backend == "dense":
        cap = dense_cap(max_dense_qubits)
        if total > cap:
            raise ResourceCapError(f"dense state needs {total} qubits, cap is {cap}")
        vec = np.ones(1, dtype=complex)
        pos = 0
        for off, width, v in placed:
            if off > pos:
                vec = np.kron(_ground(off - pos), vec)
            vec = np.kron(v, vec)
            pos = off + width
        if pos < total:
            vec = np.kron(_ground(total - pos), vec)
        return QuantumState(layout, "dense", vec)

    supports = []
    for off, _, v in placed:
        nz = np.flatnonzero(np.abs(v) > PRUNE_THRESHOLD)
        supports.append([(int(i) << off, complex(v[i])) for i in nz])
    amps = {}
    for combo in product(*supports):
        idx = 0
        amp = 1.0 + 0j
        for i, a in combo:
            idx |= i
            amp *= a
        if abs(amp) > PRUNE_THRESHOLD:
            amps[idx] = amp
    return QuantumState(layout, "sparse", amps)


def _ground(width):
    v = np.zeros(1 << width, dtype=complex)
    v[0] = 1.0
    return v


def init_product_state(layout: RegisterLayout, row_states, extras_zeroed: bool = True,
                       backend: str = "auto", register_states: dict | None = None,
                       max_dense_qubits: int | None = None) -> QuantumState:
    """Write prod_j row_states[j][k_j] onto |k_0>_{S_0}...|k_{N-1}>_{S_{N-1}}.

    Every row must have unit norm. ``register_states`` adds further
    unit-norm factors (the rhs register in the solver, for example).
    """
    if not extras_zeroed:
        raise ParameterError("ancilla and index registers must start in |0>")
    rows = layout.by_role("row_state")
    if len(row_states) != len(rows):
        raise EncodingError(f"layout has {len(rows)} row registers, got {len(row_states)} rows")
    factors = []
    for j, (reg, row) in enumerate(zip(rows, row_states)):
        row = np.asarray(row, dtype=complex).ravel()
        if row.shape[0] != 1 << reg.width:
            raise EncodingError(f"row {j} has length {row.shape[0]}, expected {1 << reg.width}", row=j)
        norm = float(np.linalg.norm(row))
        if not math.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise EncodingError(f"row {j} is not normalised (norm {norm:.12g})", row=j)
        factors.append(((reg.name,), row))
    for name, vec in (register_states or {}).items():
        names = (name,) if isinstance(name, str) else tuple(name)
        v = np.asarray(vec, dtype=complex).ravel()
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > NORM_TOL:
            raise EncodingError(f"state for {names} is not normalised (norm {norm:.12g})")
        factors.append((names, v))
    return product_state(layout, factors, backend, max_dense_qubits)


def _check_layer(state, layer):
    bad = [q for q in layer.qubits if not 0 <= q < state.total_qubits]
    if bad:
        raise CircuitConstructionError(f"{layer.kind} gate touches qubits {bad} outside the layout")


def _swap_runs(layer):
    """Group a cswap into contiguous (off_a, off_b, width) runs."""
    pairs = sorted(zip(layer.targets, layer.partners))
    runs = []
    for a, b in pairs:
        if runs and runs[-1][0] + runs[-1][2] == a and runs[-1][1] + runs[-1][2] == b:
            runs[-1][2] += 1
        else:
            runs.append([a, b, 1])
    return [tuple(r) for r in runs]


def _apply_dense(amps, layer, kset):
    cmask, cval = layer.control_mask, layer.control_value
    kind = layer.kind
    if kind in ("x", "cx"):
        xmask = sum(1 << q for q in layer.targets)
        kset["xor_flip"](amps, cmask, cval, xmask)
    elif kind in ("z", "cz"):
        for q in layer.targets:
            kset["phase_flip"](amps, cmask, cval, 1 << q)
    elif kind in ("h", "hblock"):
        for q in layer.targets:
            kset["hadamard"](amps, q)
    elif kind == "cswap":
        for off_a, off_b, width in _swap_runs(layer):
            kset["swap_fields"](amps, cmask, cval, off_a, off_b, width)


def _apply_sparse(amps, layer):
    cmask, cval = layer.control_mask, layer.control_value
    kind = layer.kind
    out = {}
    if kind in ("x", "cx"):
        xmask = sum(1 << q for q in layer.targets)
        for idx, a in amps.items():
            out[idx ^ xmask if (idx & cmask) == cval else idx] = a
    elif kind in ("z", "cz"):
        zmask = 0
        for q in layer.targets:
            zmask |= 1 << q
        for idx, a in amps.items():
            if (idx & cmask) == cval and bin(idx & zmask).count("1") % 2:
                a = -a
            out[idx] = a
    elif kind == "cswap":
        pairs = list(zip(layer.targets, layer.partners))
        for idx, a in amps.items():
            if (idx & cmask) == cval:
                for qa, qb in pairs:
                    ba, bb = (idx >> qa) & 1, (idx >> qb) & 1
                    if ba != bb:
                        idx ^= (1 << qa) | (1 << qb)
            out[idx] = a
    else:
        out = amps
        for q in layer.targets:
            bit = 1 << q
            nxt = {}
            for idx, a in out.items():
                h = a * 0.7071067811865476
                i0 = idx & ~bit
                nxt[i0] = nxt.get(i0, 0j) + h
                nxt[i0 | bit] = nxt.get(i0 | bit, 0j) + (-h if idx & bit else h)
            out = nxt
    return {i: a for i, a in out.items() if abs(a) > PRUNE_THRESHOLD}


def apply_layer(state: QuantumState, layer: GateLayer, use_numba: bool | None = None) -> QuantumState:
    """Apply one gate in place and return the state."""
    _check_layer(state, layer)
    if state.backend == "dense":
        _apply_dense(state.amplitudes, layer, kernels.kernel_set(use_numba))
    else:
        state.amplitudes = _apply_sparse(state.amplitudes, layer)
    return state


def apply_layers(state: QuantumState, layers, use_numba: bool | None = None) -> QuantumState:
    for layer in layers:
        apply_layer(state, layer, use_numba)
    return state


def hadamard_project_zero(state: QuantumState, registers) -> tuple:
    """H on every qubit of ``registers`` followed by projection of them onto |0>.

    The new amplitude of each remaining basis configuration is
    ``2**(-w/2)`` times the sum of the old amplitudes over all values of the
    projected registers (``w`` = their total width). The result is not
    renormalised. Returns ``(state, 2**(-w/2))``.
    """
    names = list(registers)
    if not names or len(set(names)) != len(names):
        raise CircuitConstructionError(f"bad register list {names}")
    for name in names:
        if name not in state.layout:
            raise CircuitConstructionError(f"register {name} is not in the layout")
    qubits = state.layout.qubits_of(names)
    factor = 2.0 ** (-len(qubits) / 2)
    if state.backend == "dense":
        nq = state.total_qubits
        psi = state.amplitudes.reshape([2] * nq)
        axes = tuple(nq - 1 - q for q in qubits)
        summed = psi.sum(axis=axes, keepdims=True) * factor
        out = np.zeros_like(psi)
        pick = tuple(0 if ax in axes else slice(None) for ax in range(nq))
        out[pick] = summed[pick]
        state.amplitudes = out.reshape(-1)
    else:
        clear = ~sum(1 << q for q in qubits)
        out = {}
        for idx, a in state.amplitudes.items():
            key = idx & clear
            out[key] = out.get(key, 0j) + a
        state.amplitudes = {i: a * factor for i, a in out.items() if abs(a * factor) > PRUNE_THRESHOLD}
    return state, factor


def zero_assignment(layout: RegisterLayout, **values) -> dict:
    out = {name: 0 for name in layout.names}
    for name, v in values.items():
        if name not in out:
            raise KeyError(name)
        out[name] = v
    return out


def amplitude_at(state: QuantumState, assignment: dict) -> complex:
    missing = set(state.layout.names) - set(assignment)
    if missing:
        raise KeyError(f"assignment misses registers {sorted(missing)}")
    idx = state.layout.index_of(assignment)
    if state.backend == "dense":
        return complex(state.amplitudes[idx])
    return complex(state.amplitudes.get(idx, 0j))


def register_distribution(state: QuantumState, register: str) -> np.ndarray:
    """Unnormalised marginal weights sum |amp|^2 per register value."""
    reg = state.layout[register]
    if state.backend == "dense":
        probs = np.abs(state.amplitudes) ** 2
        return probs.reshape(-1, 1 << reg.width, 1 << reg.offset).sum(axis=(0, 2))
    out = np.zeros(1 << reg.width)
    for idx, a in state.amplitudes.items():
        out[reg.extract(idx)] += abs(a) ** 2
    return out


def register_probability(state: QuantumState, register: str, value: int) -> float:
    reg = state.layout[register]
    if not 0 <= value < (1 << reg.width):
        raise IndexError(f"value {value} out of range for register {register}")
    return float(register_distribution(state, register)[value])


def postselect(state: QuantumState, register: str, value: int) -> tuple:
    """Keep the branch where ``register == value`` and renormalise it.

    Returns ``(new_state, probability)`` where ``probability`` is the weight
    of that branch before collapse.
    """
    prob = register_probability(state, register, value)
    if prob <= 0.0:
        raise PostselectionError(f"outcome {register}={value} has zero probability")
    reg = state.layout[register]
    scale = 1.0 / math.sqrt(prob)
    if state.backend == "dense":
        out = state.amplitudes.copy().reshape(-1, 1 << reg.width, 1 << reg.offset)
        keep = out[:, value, :] * scale
        out[:] = 0
        out[:, value, :] = keep
        amps = out.reshape(-1)
    else:
        amps = {i: a * scale for i, a in state.amplitudes.items() if reg.extract(i) == value}
    return QuantumState(state.layout, state.backend, amps, dict(state.meta)), prob


def sample_measure(state: QuantumState, register: str, rng_seed) -> int:
    """Draw one outcome of measuring ``register``; fixed seed, fixed result."""
    return int(sample_counts(state, register, 1, rng_seed).nonzero()[0][0])


def sample_counts(state: QuantumState, register: str, shots: int, rng_seed) -> np.ndarray:
    """Outcome histogram of ``shots`` independent draws of ``register``."""
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    weights = register_distribution(state, register)
    total = weights.sum()
    if total <= 0:
        raise PostselectionError("state has zero norm")
    rng = np.random.default_rng(rng_seed)
    draws = rng.choice(weights.shape[0], size=shots, p=weights / total)
    return np.bincount(draws, minlength=weights.shape[0])
