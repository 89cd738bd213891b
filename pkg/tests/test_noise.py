import numpy as np
import pytest
from scipy.linalg import expm

from spinlink.core import partial_trace, random_density
from spinlink.noise import (
    Liouvillian,
    NoiseModel,
    apply_kraus_channel,
    build_liouvillian,
    choi_matrix,
    evolve,
    propagate,
    single_spin_kraus,
    spin_diagonal_projector,
    unvec,
    vec,
)

KINDS = (
    NoiseModel.none(epsilon=3.0),
    NoiseModel.dephasing(1.3, epsilon=2.0),
    NoiseModel.relaxation(0.8, epsilon=1.1),
)


def _single_qubit_closed_form(rho, noise, t):
    # exact one-spin channel: Larmor phase on the coherence plus either
    # coherence decay (dephasing) or population transfer into down (relaxation)
    out = np.array(rho, dtype=complex)
    phase = np.exp(-1j * noise.epsilon * t)
    if noise.kind == "dephasing":
        out[0, 1] *= phase * np.exp(-noise.rate * t)
        out[1, 0] = np.conj(out[0, 1])
    elif noise.kind == "relaxation":
        x = np.exp(-noise.rate * t)
        out[0, 1] *= phase * np.sqrt(x)
        out[1, 0] = np.conj(out[0, 1])
        out[1, 1] = rho[1, 1] + (1 - x) * rho[0, 0]
        out[0, 0] = x * rho[0, 0]
    else:
        out[0, 1] *= phase
        out[1, 0] = np.conj(out[0, 1])
    return out


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel("bogus", 1.0, 0.0)
    with pytest.raises(ValueError):
        NoiseModel("dephasing", -0.5, 0.0)
    assert NoiseModel.none().rate == 0.0


def test_vec_unvec_round_trip():
    rng = np.random.default_rng(31)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.array_equal(unvec(vec(m)), m)


def test_vec_column_stacking_convention():
    # the generator construction relies on vec(A X B) = (B^T (x) A) vec(X)
    rng = np.random.default_rng(32)
    for _ in range(20):
        a, x, b = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
        lhs = vec(a @ x @ b)
        rhs = np.kron(b.T, a) @ vec(x)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_evolve_edge_cases():
    gen = build_liouvillian(NoiseModel.dephasing(1.0), include_photon=False)
    rho = np.eye(4, dtype=complex) / 4
    out = evolve(rho, gen, 0.0)
    assert np.array_equal(out, rho)
    out[0, 0] = 9.0
    assert rho[0, 0] == 0.25  # t=0 returns an independent copy
    with pytest.raises(ValueError):
        evolve(rho, gen, -0.1)
    with pytest.raises(ValueError):
        evolve(np.eye(8) / 8, gen, 0.1)


def test_two_spin_channel_matches_single_qubit_closed_form():
    # product inputs factorize, so the two-spin superoperator must agree with
    # the analytic one-spin channel applied to each factor
    rng = np.random.default_rng(33)
    for noise in KINDS:
        for _ in range(60):
            a = random_density(rng, 2)
            b = random_density(rng, 2)
            t = rng.uniform(0.0, 2.5)
            out = propagate(np.kron(a, b), noise, t, include_photon=False)
            expected = np.kron(
                _single_qubit_closed_form(a, noise, t),
                _single_qubit_closed_form(b, noise, t),
            )
            assert np.allclose(out, expected, atol=1e-12)


def test_superoperator_matches_kraus_route():
    # two independent constructions of the same channel
    rng = np.random.default_rng(34)
    for noise in KINDS[1:]:
        for _ in range(250):
            rho = random_density(rng, 4)
            t = rng.uniform(0.0, 3.0)
            via_expm = propagate(rho, noise, t, include_photon=False)
            via_kraus = apply_kraus_channel(rho, noise, t)
            assert np.allclose(via_expm, via_kraus, atol=1e-10)


def test_superoperator_matches_kraus_with_photon():
    rng = np.random.default_rng(35)
    for noise in KINDS[1:]:
        for _ in range(60):
            rho = random_density(rng, 8)
            t = rng.uniform(0.0, 2.0)
            via_expm = propagate(rho, noise, t)
            via_kraus = apply_kraus_channel(rho, noise, t)
            assert np.allclose(via_expm, via_kraus, atol=1e-10)


def test_photon_sector_untouched():
    rng = np.random.default_rng(36)
    for noise in KINDS:
        photon = random_density(rng, 2)
        spins = random_density(rng, 4)
        out = propagate(np.kron(photon, spins), noise, 1.7)
        assert np.allclose(partial_trace(out, (0,)), photon, atol=1e-12)
        purity = np.trace(photon @ photon).real
        out_purity = np.trace(
            partial_trace(out, (0,)) @ partial_trace(out, (0,))
        ).real
        assert out_purity == pytest.approx(purity, abs=1e-12)


def test_trace_and_hermiticity_preserved():
    rng = np.random.default_rng(37)
    for noise in KINDS:
        for _ in range(100):
            rho = random_density(rng, 4)
            out = propagate(rho, noise, rng.uniform(0, 4), include_photon=False)
            assert abs(np.trace(out) - 1) < 1e-12
            assert np.allclose(out, out.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(out).min() > -1e-10


def test_semigroup_composition():
    rng = np.random.default_rng(38)
    for noise in KINDS:
        for _ in range(40):
            rho = random_density(rng, 4)
            s, t = rng.uniform(0.05, 1.5, size=2)
            two_step = propagate(
                propagate(rho, noise, s, include_photon=False), noise, t, include_photon=False
            )
            one_step = propagate(rho, noise, s + t, include_photon=False)
            assert np.allclose(two_step, one_step, atol=1e-10)


def test_choi_positivity():
    for noise in KINDS:
        gen = build_liouvillian(noise, include_photon=False)
        for t in (0.0, 0.2, 1.0, 3.0):
            channel = expm(gen.matrix * t)
            choi = choi_matrix(channel)
            assert np.allclose(choi, choi.conj().T, atol=1e-10)
            assert np.linalg.eigvalsh(choi).min() > -1e-10
            assert np.trace(choi).real == pytest.approx(4.0, abs=1e-10)


def test_kraus_completeness():
    for noise in KINDS[1:]:
        for t in (0.0, 0.3, 2.0):
            ops = single_spin_kraus(noise, t)
            total = sum(k.conj().T @ k for k in ops)
            assert np.allclose(total, np.eye(2), atol=1e-12)
    with pytest.raises(ValueError):
        single_spin_kraus(NoiseModel.none(), 1.0)


def test_hamiltonian_only_preserves_purity():
    rng = np.random.default_rng(39)
    noise = NoiseModel.none(epsilon=5.0)
    for _ in range(30):
        rho = random_density(rng, 4, rank=1)
        out = propagate(rho, noise, rng.uniform(0, 3), include_photon=False)
        assert np.trace(out @ out).real == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(np.diag(out), np.diag(rho), atol=1e-12)


def test_diagonal_projector_annihilates_dephasing_generator():
    # the spin-diagonal projector and the dephasing generator have exactly
    # disjoint supports, so both products vanish identically
    proj = spin_diagonal_projector()
    gen = build_liouvillian(NoiseModel.dephasing(1.3, epsilon=2.0), include_photon=False)
    left = proj @ gen.matrix
    right = gen.matrix @ proj
    assert np.all(left == 0.0)
    assert np.all(right == 0.0)
    assert np.array_equal(proj @ proj, proj)


def test_diagonal_projector_commutes_with_dephasing_channel():
    gen = build_liouvillian(NoiseModel.dephasing(0.9, epsilon=4.0), include_photon=False)
    proj = spin_diagonal_projector()
    for t in (0.1, 0.7, 2.5):
        channel = expm(gen.matrix * t)
        assert np.max(np.abs(proj @ channel - channel @ proj)) < 1e-12


def test_diagonal_sector_frozen_under_dephasing_only():
    # both channels preserve the population/coherence split, so the naive
    # commutator vanishes for each; what separates them is whether the
    # populations themselves move. Dephasing freezes them exactly,
    # relaxation drains them toward down-down.
    proj = spin_diagonal_projector()
    for noise in (NoiseModel.dephasing(1.3, epsilon=2.0), NoiseModel.relaxation(1.0)):
        gen = build_liouvillian(noise, include_photon=False)
        channel = expm(gen.matrix * 0.5)
        assert np.max(np.abs(proj @ channel - channel @ proj)) < 1e-12
    deph = build_liouvillian(NoiseModel.dephasing(1.3, epsilon=2.0), include_photon=False)
    frozen = expm(deph.matrix * 0.5) @ proj
    assert np.max(np.abs(frozen - proj)) < 1e-12
    relax = build_liouvillian(NoiseModel.relaxation(1.0), include_photon=False)
    moved = expm(relax.matrix * 0.5) @ proj
    assert np.max(np.abs(moved - proj)) > 1e-3


def test_propagate_deterministic_and_cached():
    rho = random_density(np.random.default_rng(40), 4)
    noise = NoiseModel.dephasing(1.0, epsilon=1.0)
    a = propagate(rho, noise, 0.37, include_photon=False)
    b = propagate(rho, noise, 0.37, include_photon=False)
    assert np.array_equal(a, b)
    gen = build_liouvillian(noise, include_photon=False)
    assert np.allclose(a, evolve(rho, gen, 0.37), atol=1e-13)


def test_named_decay_examples():
    from spinlink.core import BELL_PSI_PLUS, ket_dm
    from spinlink.measures import concurrence
    from spinlink.noise import kraus_channel_oracle

    assert kraus_channel_oracle is apply_kraus_channel
    for t in (0.3, 1.0):
        dephased = propagate(
            ket_dm(BELL_PSI_PLUS), NoiseModel.dephasing(1.0), t, include_photon=False
        )
        assert concurrence(dephased) == pytest.approx(np.exp(-2 * t), abs=1e-12)
        up_up = np.zeros(4, dtype=complex)
        up_up[0] = 1.0
        relaxed = propagate(
            ket_dm(up_up), NoiseModel.relaxation(1.0), t, include_photon=False
        )
        assert relaxed[0, 0].real == pytest.approx(np.exp(-2 * t), abs=1e-12)


def test_liouvillian_dims():
    assert build_liouvillian(NoiseModel.none()).dim == 8
    assert build_liouvillian(NoiseModel.none(), include_photon=False).dim == 4
    assert build_liouvillian(NoiseModel.none(epsilon=0.0)).matrix.max() == 0.0
    gen = Liouvillian(4, np.zeros((16, 16)))
    rho = np.eye(4, dtype=complex) / 4
    assert np.allclose(evolve(rho, gen, 2.0), rho, atol=1e-15)
