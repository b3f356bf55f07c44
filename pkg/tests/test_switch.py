from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qswitch.channels import (
    Channel,
    apply,
    choi_distance,
    choi_matrix,
    compose_serial,
    identity_channel,
    pauli_channel,
    random_channel,
    remix_kraus,
    validate,
)
from qswitch.linalg import (
    I2,
    KET0,
    KET1,
    KET_MINUS,
    KET_PLUS,
    Z,
    ContractError,
    DimensionError,
    proj,
    random_density,
    random_ket,
    random_unitary,
)
from qswitch.switch import (
    choi_of_map,
    condition_on_control,
    control_support,
    pauli_switch_decomposition,
    pauli_switch_weights,
    reassembly_residual,
    switch_apply,
    switch_channel,
    switch_kraus,
)

E_XY = (0, 0.5, 0.5, 0)
THIRD = Fraction(1, 3)
E_XYZ = (Fraction(0), THIRD, THIRD, THIRD)


def direct_choi(e, f, omega):
    # oracle: the switch evaluated on rho (x) omega with the full 2d x 2d Kraus operators
    return choi_of_map(lambda r: switch_apply(e, f, omega, r), e.dim_in)


def test_switch_kraus_examples():
    ident = identity_channel(2)
    ks = switch_kraus(ident, ident, KET_PLUS)
    assert len(ks) == 1
    assert np.allclose(ks[0], np.kron(I2, KET_PLUS.reshape(2, 1)))
    exy = pauli_channel(E_XY)
    ks = switch_kraus(exy, exy, KET_PLUS)
    assert len(ks) == 4
    # K_{XY} = (XY (x) |0> + YX (x) |1>) / (2 sqrt 2) = iZ (x) |-> / 2
    assert np.allclose(ks[1], 0.5j * np.kron(Z, KET_MINUS.reshape(2, 1)))


def test_switch_kraus_count_and_errors(rng):
    e = random_channel(3, 3, 2, rng)
    f = random_channel(3, 3, 4, rng)
    assert len(switch_kraus(e, f, KET0)) == 8
    with pytest.raises(DimensionError):
        switch_kraus(e, identity_channel(2), KET0)
    with pytest.raises(ContractError):
        switch_kraus(e, f, [1, 1])


def test_switch_of_identity_appends_control(rng):
    omega = random_density(2, rng)
    sw = switch_channel(identity_channel(2), identity_channel(2), omega)
    rho = random_density(2, rng)
    assert np.allclose(sw.base(rho), np.kron(rho, omega))


def test_unitary_switch_appends_control(rng):
    u = random_unitary(2, rng)
    e = Channel.from_kraus([u])
    omega = random_density(2, rng)
    rho = random_density(2, rng)
    out = switch_channel(e, e, omega).base(rho)
    # both uses act, so the system sees U^2 whatever the order
    u2 = u @ u
    assert np.allclose(out, np.kron(u2 @ rho @ u2.conj().T, omega))


def test_definite_order_control_zero(rng):
    # control |0> runs F first, then E
    e = random_channel(2, 2, 3, rng)
    f = random_channel(2, 2, 2, rng)
    rho = random_density(2, rng)
    out = switch_channel(e, f, KET0).base(rho)
    assert np.allclose(out, np.kron(apply(compose_serial(e, f), rho), proj(KET0)))
    out = switch_channel(e, f, KET1).base(rho)
    assert np.allclose(out, np.kron(apply(compose_serial(f, e), rho), proj(KET1)))


@pytest.mark.parametrize("d", [2, 3])
def test_switch_matches_direct_construction(rng, d):
    for _ in range(5):
        e = random_channel(d, d, 2, rng)
        f = random_channel(d, d, 3, rng)
        omega = random_density(2, rng)
        sw = switch_channel(e, f, omega)
        assert validate(sw.base).ok
        assert np.max(np.abs(choi_matrix(sw.base) - direct_choi(e, f, omega))) < 1e-12


def test_linearity_in_omega(rng):
    e = random_channel(2, 2, 3, rng)
    g = random_ket(2, rng)
    sigma = random_density(2, rng)
    t = 0.3
    omega = t * proj(g) + (1 - t) * sigma
    lhs = choi_matrix(switch_channel(e, e, omega).base)
    rhs = t * choi_matrix(switch_channel(e, e, g).base) + (1 - t) * choi_matrix(switch_channel(e, e, sigma).base)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_control_support_of_pure_and_mixed():
    assert len(control_support(KET_PLUS)) == 1
    assert len(control_support(np.eye(2) / 2)) == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_representation_independence(seed):
    rng = np.random.default_rng(seed)
    e = random_channel(2, 2, 2, rng)
    f = random_channel(2, 2, 3, rng)
    omega = random_density(2, rng)
    e2 = remix_kraus(e, random_unitary(4, rng)[:, :2])
    f2 = remix_kraus(f, random_unitary(3, rng))
    assert choi_distance(switch_channel(e, f, omega).base, switch_channel(e2, f2, omega).base) < 1e-8


def test_decomposition_e_xy():
    dec = pauli_switch_decomposition(E_XY, KET_PLUS)
    assert dec.q_plus == 0.5 and dec.q_minus == 0.5
    assert choi_distance(dec.c_plus, identity_channel(2)) < 1e-15
    assert choi_distance(dec.c_minus, Channel.from_kraus([Z])) < 1e-15
    assert np.allclose(dec.omega_minus, proj(KET_MINUS))


def test_decomposition_e_xyz_exact():
    dec = pauli_switch_decomposition(E_XYZ, KET_PLUS)
    assert dec.q_plus == THIRD and dec.q_minus == 2 * THIRD
    assert tuple(dec.p_plus) == (1, 0, 0, 0)
    assert tuple(dec.p_minus) == (0, THIRD, THIRD, THIRD)


def test_decomposition_identity_has_no_minus_branch():
    dec = pauli_switch_decomposition((1, 0, 0, 0), KET_PLUS)
    assert dec.q_minus == 0 and dec.c_minus is None
    assert choi_distance(dec.c_plus, identity_channel(2)) == 0


def test_weights_hand_values():
    p = (0.1, 0.2, 0.3, 0.4)
    q_plus, q_minus = pauli_switch_weights(p)
    assert np.isclose(q_minus, 2 * (0.06 + 0.12 + 0.08))
    assert np.isclose(q_plus + q_minus, 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decomposition_matches_direct_switch(seed):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(4))
    omega = random_ket(2, rng)
    dec = pauli_switch_decomposition(p, omega)
    e = pauli_channel(p)
    assert np.max(np.abs(dec.choi() - direct_choi(e, e, omega))) < 1e-8


def test_condition_on_control_e_xy():
    exy = pauli_channel(E_XY)
    parts = condition_on_control(switch_channel(exy, exy, KET_PLUS), [KET_PLUS, KET_MINUS])
    (q0, c0), (q1, c1) = parts
    assert np.isclose(q0, 0.5) and np.isclose(q1, 0.5)
    assert choi_distance(c0, identity_channel(2)) < 1e-12
    assert choi_distance(c1, Channel.from_kraus([Z])) < 1e-12
    assert reassembly_residual(switch_channel(exy, exy, KET_PLUS), [KET_PLUS, KET_MINUS]) < 1e-9


def test_condition_on_control_e_xyz():
    exyz = pauli_channel(E_XYZ)
    (q0, c0), (q1, c1) = condition_on_control(switch_channel(exyz, exyz, KET_PLUS), [KET_PLUS, KET_MINUS])
    assert np.isclose(q0, 1 / 3) and np.isclose(q1, 2 / 3)
    assert choi_distance(c0, identity_channel(2)) < 1e-12
    assert choi_distance(c1, exyz) < 1e-12


def test_condition_on_control_identity_any_basis(rng):
    g = random_ket(2, rng)
    u = random_unitary(2, rng)
    basis = [u[:, 0], u[:, 1]]
    sw = switch_channel(identity_channel(2), identity_channel(2), g)
    parts = condition_on_control(sw, basis)
    for (q, c), b in zip(parts, basis):
        assert np.isclose(q, abs(np.vdot(b, g)) ** 2)
        assert choi_distance(c, identity_channel(2)) < 1e-12
    # coherences survive in a generic basis, so the block-diagonal reassembly differs
    assert reassembly_residual(sw, basis) > 1e-3


def test_condition_on_control_rejects_input_dependent_outcomes():
    exy = pauli_channel(E_XY)
    # a non-Pauli channel: amplitude damping makes outcome probabilities depend on rho
    ad = Channel.from_kraus([np.array([[1, 0], [0, np.sqrt(0.5)]]), np.array([[0, np.sqrt(0.5)], [0, 0]])])
    with pytest.raises(ContractError, match="does not decompose"):
        condition_on_control(switch_channel(ad, ad, KET_PLUS), [KET_PLUS, KET_MINUS])
    with pytest.raises(ContractError):
        condition_on_control(switch_channel(exy, exy, KET_PLUS), [KET_PLUS, KET_PLUS])
