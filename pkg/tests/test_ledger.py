import math

import numpy as np
import pytest

from helpers import random_complex, well_conditioned
from qdetlin.det import run_determinant
from qdetlin.errors import ParameterError, SingularityError
from qdetlin.inverse import run_inverse
from qdetlin.ledger import (encode_rhs, normalize_for_det, normalize_for_inverse,
                            normalize_for_matmul, recover_det, recover_inverse,
                            recover_product, recover_solution)
from qdetlin.mulsolve import run_matmul, run_solve
from qdetlin.oracle import leibniz_det

S = 1 / math.sqrt(2)


def test_det_normalisation_examples():
    m, lg = normalize_for_det(np.eye(3))
    np.testing.assert_array_equal(m, np.eye(3))
    assert lg.row_norms == (1.0, 1.0, 1.0)
    m, lg = normalize_for_det(np.diag([2.0, 2.0]))
    np.testing.assert_array_equal(m, np.eye(2))
    assert np.prod(lg.row_norms) == 4
    with pytest.raises(SingularityError):
        normalize_for_det([[1, 0], [0, 0]])


def test_recover_det_examples():
    _, ones = normalize_for_det(np.eye(2))
    assert recover_det(2 ** -0.5, ones, 1) == pytest.approx(1)
    assert recover_det(-(2 ** -0.5), ones, 1) == pytest.approx(-1)
    _, lg = normalize_for_det(np.diag([2.0, 1, 1, 1]))
    assert recover_det(2 ** -2.5, lg, 5) == pytest.approx(2)


def test_det_round_trip(rng):
    for N in (2, 4):
        for _ in range(10):
            m = 3 * random_complex(rng, (N, N))
            scaled, lg = normalize_for_det(m)
            r = run_determinant(scaled)
            assert abs(recover_det(r.amplitude, lg, r.tilde_N) - leibniz_det(m)) <= 1e-9 * max(
                1, abs(leibniz_det(m)))


def test_inverse_normalisation_examples():
    m, lg = normalize_for_inverse(3 * np.eye(2))
    np.testing.assert_allclose(m, S * np.eye(2))
    np.testing.assert_allclose(lg.scales, [S / 3, S / 3])
    m, lg = normalize_for_inverse(np.diag([2.0, 4.0]), S)
    np.testing.assert_allclose(m, S * np.eye(2))
    np.testing.assert_allclose(lg.scales, [1 / (2 * math.sqrt(2)), 1 / (4 * math.sqrt(2))])
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ParameterError):
            normalize_for_inverse(np.eye(2), bad)


def test_diag_inverse_recovery():
    m = np.diag([2.0, 4.0, 1.0])
    scaled, lg = normalize_for_inverse(m)
    r = run_inverse(scaled, lg.q)
    inv = recover_inverse(r.amplitudes, lg, leibniz_det(scaled))
    np.testing.assert_allclose(inv, np.diag([0.5, 0.25, 1.0]), atol=1e-12)


@pytest.mark.parametrize("q", [0.5, S, 0.9])
def test_recovery_independent_of_q(rng, q):
    m = 2 * well_conditioned(np.random.default_rng(5), 3)
    b = random_complex(np.random.default_rng(6), 3)
    scaled, lg = normalize_for_inverse(m, q)
    det_s = leibniz_det(scaled)
    r = run_inverse(scaled, q)
    inv = recover_inverse(r.amplitudes, lg, det_s)
    assert np.max(np.abs(m @ inv - np.eye(3))) <= 1e-8
    np.testing.assert_allclose(inv, np.linalg.inv(m), atol=1e-8)

    b_enc, b_norm = encode_rhs(b, lg)
    sr = run_solve(scaled, b_enc, q)
    x = recover_solution(sr.normalized_solution(), sr.G, lg, b_norm, det_s)
    assert np.max(np.abs(m @ x - b)) <= 1e-7
    np.testing.assert_allclose(x, np.linalg.solve(m, b), atol=1e-8)


def test_solution_examples():
    scaled, lg = normalize_for_inverse([[0.6]], 0.8)
    b_enc, b_norm = encode_rhs([1.0], lg)
    r = run_solve(scaled, b_enc, 0.8)
    x = recover_solution(r.normalized_solution(), r.G, lg, b_norm, leibniz_det(scaled))
    assert x[0] == pytest.approx(5 / 3)

    scaled, lg = normalize_for_inverse(np.eye(3))
    b = np.array([1.0, -2.0, 0.5j])
    b_enc, b_norm = encode_rhs(b, lg)
    r = run_solve(scaled, b_enc)
    x = recover_solution(r.normalized_solution(), r.G, lg, b_norm, leibniz_det(scaled))
    np.testing.assert_allclose(x, b, atol=1e-12)
    with pytest.raises(SingularityError):
        recover_solution(x, 0.0, lg, b_norm, 1.0)


def test_encode_rhs_shape():
    _, lg = normalize_for_inverse(np.eye(3))
    b_enc, nrm = encode_rhs([3.0, 0, 4.0], lg)
    assert b_enc[0] == 0 and np.linalg.norm(b_enc) == pytest.approx(1)
    assert nrm == pytest.approx(5 * S)
    with pytest.raises(ParameterError):
        encode_rhs([0, 0, 0], lg)


def test_matmul_round_trip(rng):
    a, b = random_complex(rng, (2, 4)), random_complex(rng, (4, 2))
    sa, la = normalize_for_matmul(a)
    sb, lb = normalize_for_matmul(b)
    r = run_matmul(sa, sb)
    np.testing.assert_allclose(recover_product(r.product, la, lb), a @ b, atol=1e-10)
    with pytest.raises(SingularityError):
        normalize_for_matmul(np.zeros((2, 2)))
