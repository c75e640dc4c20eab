import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causal_switch import channel as ch
from causal_switch import qmat
from causal_switch.qmat import I2, KET0, KET1, Y
from causal_switch.switch import (
    MINUS,
    P0,
    P1,
    PLUS,
    SwitchConfig,
    apply_switch,
    assemble_control,
    build_switch,
    control_blocks,
    flip_switch,
    pauli_switch_closed_form,
    switched_choi,
)

from test_channel import choi_by_basis_action, random_channel, remix


def brute_force_switch(e, f, omega, rho):
    """sum_ij W_ij (rho (x) omega) W_ij^dag with index-level tensor products."""

    def kron(a, b):
        out = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for l in range(2):
                        out[2 * i + k, 2 * j + l] = a[i, j] * b[k, l]
        return out

    sel0 = np.array([[1, 0], [0, 0]], dtype=complex)
    sel1 = np.array([[0, 0], [0, 1]], dtype=complex)
    total = np.zeros((4, 4), dtype=complex)
    joint = kron(rho, omega)
    for ei in e.kraus:
        for fj in f.kraus:
            w = kron(ei.dot(fj), sel0) + kron(fj.dot(ei), sel1)
            total += w.dot(joint).dot(w.conj().T)
    return total


def test_identity_switch(rng):
    omega = qmat.random_density_matrix(2, rng)
    sc = build_switch(SwitchConfig(ch.identity_channel(), ch.identity_channel(), omega))
    rho = qmat.random_density_matrix(2, rng)
    assert np.allclose(apply_switch(sc, rho), np.kron(rho, omega), atol=1e-14)


def test_flip_switch_matches_closed_form(rng):
    rho = qmat.random_density_matrix(2, rng)
    out = apply_switch(flip_switch(0.3, 0.8), rho)
    assert np.linalg.norm(out - pauli_switch_closed_form(0.3, 0.8, rho)) < 1e-12


def test_random_channels_against_brute_force(rng):
    for _ in range(10):
        e, f = random_channel(rng, 3), random_channel(rng, 2)
        omega = qmat.random_density_matrix(2, rng)
        rho = qmat.random_density_matrix(2, rng)
        sc = build_switch(SwitchConfig(e, f, omega))
        assert np.max(np.abs(apply_switch(sc, rho) - brute_force_switch(e, f, omega, rho))) < 1e-12
        assert ch.validate_cptp(sc.to_kraus_channel()).valid


def test_definite_orders(rng):
    e, f = random_channel(rng), random_channel(rng)
    rho = qmat.random_density_matrix(2, rng)
    ef = build_switch(SwitchConfig(e, f, P0))
    fe = build_switch(SwitchConfig(e, f, P1))
    assert np.allclose(apply_switch(ef, rho), np.kron(ch.apply(ch.compose(e, f), rho), P0), atol=1e-13)
    assert np.allclose(apply_switch(fe, rho), np.kron(ch.apply(ch.compose(f, e), rho), P1), atol=1e-13)


def test_completely_dephasing_minus_block():
    blocks = control_blocks(flip_switch(0.5, 0.5), qmat.proj(KET0))
    minus_block = sum(np.conj(MINUS[k, kk]) * b for (k, kk), b in blocks.items())
    # <-| joint |-> on the control, i.e. the |-><-| component weight times the particle state
    assert np.allclose(minus_block, 0.25 * qmat.proj(KET1))


def test_bad_config():
    with pytest.raises(qmat.DimensionError):
        SwitchConfig(ch.identity_channel(3), ch.identity_channel(), PLUS)
    with pytest.raises(qmat.InvalidStateError):
        SwitchConfig(ch.bit_flip(0.1), ch.phase_flip(0.1), np.eye(2))
    with pytest.raises(ValueError):
        SwitchConfig(ch.KrausChannel([0.9 * I2]), ch.phase_flip(0.1), PLUS)
    with pytest.raises(qmat.DimensionError):
        apply_switch(flip_switch(0.1, 0.1), np.eye(4) / 4)


def test_switched_choi_identity():
    sc = build_switch(SwitchConfig(ch.identity_channel(), ch.identity_channel(), PLUS))
    expected = choi_by_basis_action(lambda r: np.kron(r, PLUS), 2, 4)
    assert np.allclose(switched_choi(sc).mat, expected)


def test_switched_choi_by_basis_action():
    sc = flip_switch(0.5, 0.5)
    expected = choi_by_basis_action(lambda r: brute_force_switch(ch.bit_flip(0.5), ch.phase_flip(0.5), PLUS, r), 2, 4)
    c = switched_choi(sc)
    assert np.linalg.norm(c.mat - expected) < 1e-12
    assert c.mat.shape == (8, 8)


def test_switched_choi_kraus_independent(rng):
    e, f = ch.bit_flip(0.3), ch.phase_flip(0.6)
    base = switched_choi(build_switch(SwitchConfig(e, f, PLUS)))
    for _ in range(5):
        other = switched_choi(build_switch(SwitchConfig(remix(e, rng, 1), f, PLUS)))
        assert ch.choi_distance(base, other) < 1e-10


def test_control_block_difference(rng):
    p, q = 0.35, 0.9
    rho = qmat.random_density_matrix(2, rng)
    blocks = control_blocks(flip_switch(p, q), rho)
    assert np.max(np.abs(blocks[0, 0] - blocks[0, 1] - p * q * Y @ rho @ Y)) < 1e-12
    assert np.max(np.abs(blocks[1, 1] - blocks[1, 0] - p * q * Y @ rho @ Y)) < 1e-12


@pytest.mark.parametrize("p,q", [(0, 0.4), (0.7, 0)])
def test_commuting_orders_blocks_equal(p, q, rng):
    rho = qmat.random_density_matrix(2, rng)
    blocks = control_blocks(flip_switch(p, q), rho)
    assert np.allclose(blocks[0, 0], blocks[0, 1], atol=1e-14)


def test_blocks_reassemble(rng):
    sc = flip_switch(*rng.random(2))
    rho = qmat.random_density_matrix(2, rng)
    assert np.max(np.abs(assemble_control(control_blocks(sc, rho)) - apply_switch(sc, rho))) < 1e-12


def test_closed_form_endpoints(rng):
    rho = qmat.random_density_matrix(2, rng)
    assert np.allclose(pauli_switch_closed_form(0, 0, rho), np.kron(rho, PLUS))
    assert np.allclose(pauli_switch_closed_form(1, 1, rho), np.kron(Y @ rho @ Y, MINUS))
    with pytest.raises(ValueError):
        pauli_switch_closed_form(1.2, 0, rho)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_switch_cptp(seed):
    rng = np.random.default_rng(seed)
    sc = build_switch(SwitchConfig(random_channel(rng), random_channel(rng, 2), qmat.random_density_matrix(2, rng)))
    out = apply_switch(sc, qmat.random_density_matrix(2, rng))
    assert abs(np.trace(out) - 1) < 1e-10
    assert np.linalg.eigvalsh(switched_choi(sc).mat).min() > -1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_y_sign_mechanism(p, q, seed):
    rho = qmat.random_density_matrix(2, np.random.default_rng(seed))
    blocks = control_blocks(flip_switch(p, q), rho)
    # diagonal and off-diagonal particle parts differ only by 2 p q Y rho Y (each scaled by omega = 1/2)
    diff = (blocks[0, 0] - blocks[0, 1]) * 2
    assert np.max(np.abs(diff - 2 * p * q * Y @ rho @ Y)) < 1e-12
