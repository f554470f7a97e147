import math

import numpy as np


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def unit_rows(rng, N):
    m = random_complex(rng, (N, N))
    return m / np.linalg.norm(m, axis=1)[:, None]


def well_conditioned(rng, N, max_cond=20.0):
    while True:
        m = random_complex(rng, (N, N))
        if np.linalg.cond(m) < max_cond:
            return m


def bordered_inner(rng, N_inner, q=1 / math.sqrt(2), max_cond=20.0):
    m = well_conditioned(rng, N_inner, max_cond)
    return m * (math.sqrt(1 - q * q) / np.linalg.norm(m, axis=1))[:, None]


def frobenius_unit(rng, shape):
    m = random_complex(rng, shape)
    return m / np.linalg.norm(m)


def unit_vector(rng, size):
    v = random_complex(rng, size)
    return v / np.linalg.norm(v)
