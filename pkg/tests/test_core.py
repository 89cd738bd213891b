import numpy as np
import pytest

from spinlink.core import (
    BELL_PHI_MINUS,
    BELL_PSI_PLUS,
    DIMS,
    KET_H,
    KET_L,
    KET_M45,
    KET_P45,
    KET_R,
    KET_V,
    PAULIS,
    faraday_unitary,
    flat_index,
    hs_coefficients,
    hs_matrix,
    is_density,
    ket_dm,
    partial_trace,
    random_density,
    random_pure,
    tensor,
    unflatten_index,
    validate_density,
)

INV_SQRT2 = 0.7071067811865476


def test_flat_index_layout():
    # photon is the slowest axis, the second spin the fastest
    idx = 0
    for p in range(2):
        for s1 in range(2):
            for s2 in range(2):
                assert flat_index(p, s1, s2) == idx
                assert unflatten_index(idx) == (p, s1, s2)
                idx += 1
    assert idx == 8


def test_flat_index_rejects_out_of_range():
    with pytest.raises(ValueError):
        flat_index(2, 0, 0)
    with pytest.raises(ValueError):
        flat_index(0, -1, 0)
    with pytest.raises(ValueError):
        unflatten_index(8)


def test_tensor_entries_match_index_formula():
    rng = np.random.default_rng(3)
    for _ in range(5):
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        full = tensor(a, b, c)
        assert full.shape == (8, 8)
        for i in range(8):
            for j in range(8):
                pi, s1i, s2i = unflatten_index(i)
                pj, s1j, s2j = unflatten_index(j)
                assert full[i, j] == pytest.approx(a[pi, pj] * b[s1i, s1j] * c[s2i, s2j])


def test_tensor_single_factor_is_copy():
    m = np.arange(4.0).reshape(2, 2)
    out = tensor(m)
    assert np.array_equal(out, m)
    out[0, 0] = 99.0
    assert m[0, 0] == 0.0


def test_polarization_bases():
    assert np.allclose(KET_H, (KET_R - KET_L) * INV_SQRT2, atol=1e-15)
    assert np.allclose(KET_V, (KET_R + KET_L) * INV_SQRT2, atol=1e-15)
    assert np.allclose(KET_P45, (KET_R + 1j * KET_L) * INV_SQRT2, atol=1e-15)
    assert np.allclose(KET_M45, (KET_R - 1j * KET_L) * INV_SQRT2, atol=1e-15)
    for pair in ((KET_H, KET_V), (KET_P45, KET_M45), (KET_R, KET_L)):
        u, v = pair
        assert abs(np.vdot(u, u) - 1) < 1e-14
        assert abs(np.vdot(v, v) - 1) < 1e-14
        assert abs(np.vdot(u, v)) < 1e-14
    # each diagonal ket has equal weight on both linear components
    assert abs(abs(np.vdot(KET_H, KET_P45)) ** 2 - 0.5) < 1e-14
    assert abs(abs(np.vdot(KET_V, KET_M45)) ** 2 - 0.5) < 1e-14


def test_bell_kets():
    psi = np.zeros(4, dtype=complex)
    psi[1] = psi[2] = INV_SQRT2
    phi = np.zeros(4, dtype=complex)
    phi[0] = INV_SQRT2
    phi[3] = -INV_SQRT2
    assert np.allclose(BELL_PSI_PLUS, psi, atol=1e-15)
    assert np.allclose(BELL_PHI_MINUS, phi, atol=1e-15)


def test_partial_trace_product_state():
    rng = np.random.default_rng(5)
    parts = [random_density(rng, 2) for _ in range(3)]
    rho = tensor(*parts)
    for k in range(3):
        red = partial_trace(rho, (k,))
        assert np.allclose(red, parts[k], atol=1e-13)
    pair = partial_trace(rho, (1, 2))
    assert np.allclose(pair, tensor(parts[1], parts[2]), atol=1e-13)


def test_partial_trace_preserves_trace_and_order():
    rng = np.random.default_rng(6)
    rho = random_density(rng, 8)
    for keep in ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2)):
        red = partial_trace(rho, keep)
        assert abs(np.trace(red) - 1) < 1e-12
        dim = int(np.prod([DIMS[k] for k in keep]))
        assert red.shape == (dim, dim)
    # unsorted keep gives the same result as sorted
    assert np.allclose(partial_trace(rho, (2, 0)), partial_trace(rho, (0, 2)), atol=1e-15)
    assert np.allclose(partial_trace(rho, (0, 1, 2)), rho, atol=1e-15)


def test_partial_trace_validation():
    rho = np.eye(8) / 8
    with pytest.raises(ValueError):
        partial_trace(rho, ())
    with pytest.raises(ValueError):
        partial_trace(rho, (0, 0))
    with pytest.raises(ValueError):
        partial_trace(rho, (3,))
    with pytest.raises(ValueError):
        partial_trace(np.eye(4) / 4, (0,), dims=(2, 2, 2))


def test_partial_trace_scattered_state_reduction():
    # balanced noise-free run: tracing out the photon leaves an even mix of
    # the two Bell projectors, with all cross terms gone
    from spinlink.protocol import ProtocolConfig, premeasurement_state

    rho = premeasurement_state(ProtocolConfig())
    spins = partial_trace(rho, (1, 2))
    expected = 0.25 * np.array(
        [
            [1, 0, 0, -1],
            [0, 1, 1, 0],
            [0, 1, 1, 0],
            [-1, 0, 0, 1],
        ],
        dtype=complex,
    )
    assert np.allclose(spins, expected, atol=1e-12)


def test_faraday_unitary_is_unitary():
    rng = np.random.default_rng(7)
    for target in (1, 2):
        for phi in rng.uniform(-2 * np.pi, 2 * np.pi, size=10):
            u = faraday_unitary(phi, target)
            assert np.allclose(u @ u.conj().T, np.eye(8), atol=1e-13)
    assert np.allclose(faraday_unitary(0.0, 1), np.eye(8), atol=1e-15)


def test_faraday_unitary_phase_pattern():
    # e^{i phi} lands exactly on the (L, up-target) and (R, down-target) blocks
    phi = 0.6
    phase = np.exp(1j * phi)
    for target in (1, 2):
        u = faraday_unitary(phi, target)
        assert np.allclose(u, np.diag(np.diag(u)), atol=1e-15)
        for i in range(8):
            p, s1, s2 = unflatten_index(i)
            s = s1 if target == 1 else s2
            hit = (p == 1 and s == 0) or (p == 0 and s == 1)
            assert u[i, i] == pytest.approx(phase if hit else 1.0, abs=1e-15)
    with pytest.raises(ValueError):
        faraday_unitary(0.3, 0)


def test_hs_round_trip():
    rng = np.random.default_rng(8)
    for _ in range(200):
        rho = random_density(rng, 4)
        alpha = hs_coefficients(rho)
        assert alpha.shape == (4, 4)
        assert alpha.dtype == np.float64
        assert abs(alpha[0, 0] - 1.0) < 1e-12
        assert np.max(np.abs(alpha)) <= 1.0 + 1e-10
        back = hs_matrix(alpha)
        assert np.allclose(back, rho, atol=1e-12)


def test_hs_coefficients_of_paulis():
    for i in range(4):
        for j in range(4):
            m = 0.25 * np.kron(PAULIS[i], PAULIS[j])
            alpha = hs_coefficients(m)
            expected = np.zeros((4, 4))
            expected[i, j] = 1.0
            assert np.allclose(alpha, expected, atol=1e-13)


def test_hs_rejects_non_hermitian():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.5j
    with pytest.raises(ValueError):
        hs_coefficients(m)


def test_validate_density():
    assert is_density(np.eye(4) / 4)
    out = validate_density(np.eye(2) / 2)
    assert np.array_equal(out, np.eye(2) / 2)
    with pytest.raises(ValueError):
        validate_density(np.eye(4))  # trace 4
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.3
    with pytest.raises(ValueError):
        validate_density(bad)  # not hermitian
    neg = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
    with pytest.raises(ValueError):
        validate_density(neg)  # negative population
    with pytest.raises(ValueError):
        validate_density(np.zeros((4, 3)))


def test_random_density_invariants():
    rng = np.random.default_rng(9)
    count = 0
    for dim in (2, 4, 8):
        for _ in range(350):
            rho = random_density(rng, dim)
            assert abs(np.trace(rho) - 1) < 1e-12
            assert np.allclose(rho, rho.conj().T, atol=1e-13)
            assert np.linalg.eigvalsh(rho).min() > -1e-12
            count += 1
    assert count >= 1000


def test_random_density_rank_control():
    rng = np.random.default_rng(10)
    pure = random_density(rng, 4, rank=1)
    assert abs(np.trace(pure @ pure) - 1) < 1e-12
    k = random_pure(rng, 4)
    assert abs(np.vdot(k, k) - 1) < 1e-12
    assert np.allclose(ket_dm(k), np.outer(k, k.conj()), atol=1e-15)
