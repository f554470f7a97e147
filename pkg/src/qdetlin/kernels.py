"""Dense state-vector gate kernels.

Every kernel exists twice: a numba ``@njit`` version and a vectorised numpy
version with the same signature. Both mutate ``state`` in place. The module
level names (``xor_flip`` ...) point at the numba versions unless numba is
missing or ``QDL_DISABLE_NUMBA`` is set to a truthy value.

Masks are plain ints over the global basis index. A "controlled" kernel acts
only on indices with ``idx & cmask == cval``; callers guarantee the targets
are disjoint from the controls.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit, prange
    HAS_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # probing an outdated TBB first only produces a warning
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

_SQRT1_2 = 0.7071067811865476


def _env_disabled() -> bool:
    return os.environ.get("QDL_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAS_NUMBA and not _env_disabled()


# numpy path

_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(size):
    idx = _INDEX_CACHE.get(size)
    if idx is None:
        idx = np.arange(size, dtype=np.int64)
        _INDEX_CACHE.clear()
        _INDEX_CACHE[size] = idx
    return idx


def xor_flip_np(state, cmask, cval, xmask):
    idx = _indices(state.shape[0])
    low = xmask & -xmask
    sel = idx[((idx & cmask) == cval) & ((idx & low) == 0)]
    partner = sel ^ xmask
    tmp = state[sel].copy()
    state[sel] = state[partner]
    state[partner] = tmp


def phase_flip_np(state, cmask, cval, zmask):
    idx = _indices(state.shape[0])
    sel = ((idx & cmask) == cval) & ((idx & zmask) != 0)
    state[sel] *= -1.0


def swap_fields_np(state, cmask, cval, off_a, off_b, width):
    idx = _indices(state.shape[0])
    w = (1 << width) - 1
    va = (idx >> off_a) & w
    vb = (idx >> off_b) & w
    sel = idx[((idx & cmask) == cval) & (va < vb)]
    va, vb = va[sel], vb[sel]
    partner = (sel & ~((w << off_a) | (w << off_b))) | (vb << off_a) | (va << off_b)
    tmp = state[sel].copy()
    state[sel] = state[partner]
    state[partner] = tmp


def hadamard_np(state, qubit):
    view = state.reshape(-1, 2, 1 << qubit)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = (a + b) * _SQRT1_2
    view[:, 1, :] = (a - b) * _SQRT1_2


# numba path

if HAS_NUMBA:
    _jit = dict(nogil=True, cache=True, parallel=True)

    @njit(**_jit)
    def xor_flip_nb(state, cmask, cval, xmask):
        low = xmask & -xmask
        for i in prange(state.shape[0]):
            if (i & cmask) == cval and (i & low) == 0:
                j = i ^ xmask
                t = state[i]
                state[i] = state[j]
                state[j] = t

    @njit(**_jit)
    def phase_flip_nb(state, cmask, cval, zmask):
        for i in prange(state.shape[0]):
            if (i & cmask) == cval and (i & zmask) != 0:
                state[i] = -state[i]

    @njit(**_jit)
    def swap_fields_nb(state, cmask, cval, off_a, off_b, width):
        w = (1 << width) - 1
        clear = ~((w << off_a) | (w << off_b))
        for i in prange(state.shape[0]):
            if (i & cmask) == cval:
                va = (i >> off_a) & w
                vb = (i >> off_b) & w
                if va < vb:
                    j = (i & clear) | (vb << off_a) | (va << off_b)
                    t = state[i]
                    state[i] = state[j]
                    state[j] = t

    @njit(**_jit)
    def hadamard_nb(state, qubit):
        step = 1 << qubit
        lower = step - 1
        for g in prange(state.shape[0] // 2):
            i0 = ((g & ~lower) << 1) | (g & lower)
            i1 = i0 | step
            a = state[i0]
            b = state[i1]
            state[i0] = (a + b) * 0.7071067811865476
            state[i1] = (a - b) * 0.7071067811865476
else:  # pragma: no cover
    xor_flip_nb = xor_flip_np
    phase_flip_nb = phase_flip_np
    swap_fields_nb = swap_fields_np
    hadamard_nb = hadamard_np


NUMPY_KERNELS = {"xor_flip": xor_flip_np, "phase_flip": phase_flip_np,
                 "swap_fields": swap_fields_np, "hadamard": hadamard_np}
NUMBA_KERNELS = {"xor_flip": xor_flip_nb, "phase_flip": phase_flip_nb,
                 "swap_fields": swap_fields_nb, "hadamard": hadamard_nb}


def kernel_set(use_numba: bool | None = None) -> dict:
    if use_numba is None:
        use_numba = USE_NUMBA
    return NUMBA_KERNELS if (use_numba and HAS_NUMBA) else NUMPY_KERNELS


_active = kernel_set()
xor_flip = _active["xor_flip"]
phase_flip = _active["phase_flip"]
swap_fields = _active["swap_fields"]
hadamard = _active["hadamard"]
