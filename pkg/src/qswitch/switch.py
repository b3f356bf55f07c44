"""The quantum SWITCH of two channels and its closed form for Pauli channels.

Output factor order of every switched channel is ``[system, control]``. For control
``|0>`` the Kraus operators are ``E_i F_j`` (``F`` acts first), for control ``|1>`` they
are ``F_j E_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channels import (
    Channel,
    PauliVector,
    choi_matrix,
    pauli_channel,
    require_valid,
)
from .linalg import (
    KET0,
    KET1,
    Z,
    ContractError,
    DimensionError,
    dag,
    ket,
    validate_density,
)

SUPPORT_TOL = 1e-14
DECOMPOSE_TOL = 1e-9


def control_state(omega) -> np.ndarray:
    """Validated 2x2 control density matrix; accepts a 2-vector for pure states."""
    arr = np.asarray(omega, dtype=complex)
    if arr.ndim == 1:
        v = ket(arr)
        if abs(np.linalg.norm(v) - 1) > 1e-10:
            raise ContractError("pure control state must be a unit vector")
        arr = np.outer(v, np.conj(v))
    if arr.shape != (2, 2):
        raise DimensionError(f"control state must be 2x2, got {arr.shape}")
    return validate_density(arr)


def control_support(omega) -> list[tuple[float, np.ndarray]]:
    """Eigen-decomposition ``omega = sum_k w_k |g_k><g_k|`` restricted to ``w_k > 0``."""
    w, v = np.linalg.eigh(control_state(omega))
    return [(float(w[k]), v[:, k]) for k in (1, 0) if w[k] > SUPPORT_TOL]


def _check_pair(e: Channel, f: Channel) -> int:
    if e.dim_in != e.dim_out or f.dim_in != f.dim_out or e.dim_in != f.dim_in:
        raise DimensionError(
            f"SWITCH needs two endomorphic channels of equal dimension, got "
            f"{e.dim_in}->{e.dim_out} and {f.dim_in}->{f.dim_out}"
        )
    return e.dim_in


def switch_kraus(e: Channel, f: Channel, gamma) -> list[np.ndarray]:
    """Kraus operators ``c0 E_i F_j (x) |0> + c1 F_j E_i (x) |1>`` for pure control ``gamma``.

    Each operator maps the ``d``-dim system to ``system (x) control`` (shape ``2d x d``).
    """
    _check_pair(e, f)
    g = ket(gamma)
    if g.size != 2 or abs(np.linalg.norm(g) - 1) > 1e-10:
        raise ContractError("control vector must be a unit 2-vector")
    c0 = g[0] * KET0.reshape(2, 1)
    c1 = g[1] * KET1.reshape(2, 1)
    return [np.kron(ei @ fj, c0) + np.kron(fj @ ei, c1) for ei in e.kraus for fj in f.kraus]


def switch_full_kraus(e: Channel, f: Channel) -> list[np.ndarray]:
    """The ``2d x 2d`` operators ``E_i F_j (x) |0><0| + F_j E_i (x) |1><1|`` acting on system and control."""
    _check_pair(e, f)
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    return [np.kron(ei @ fj, p0) + np.kron(fj @ ei, p1) for ei in e.kraus for fj in f.kraus]


def switch_apply(e: Channel, f: Channel, omega, rho) -> np.ndarray:
    """Evaluate ``sum_ij K_ij (rho (x) omega) K_ij^dag`` directly."""
    big = np.kron(np.asarray(rho, dtype=complex), control_state(omega))
    return sum(k @ big @ dag(k) for k in switch_full_kraus(e, f))


def choi_of_map(fn: Callable[[np.ndarray], np.ndarray], d_in: int) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_nm fn(|n><m|) (x) |n><m|`` of a linear map, order ``[out, in]``."""
    blocks = None
    for n in range(d_in):
        for m in range(d_in):
            e_nm = np.zeros((d_in, d_in), dtype=complex)
            e_nm[n, m] = 1
            term = np.kron(fn(e_nm), e_nm)
            blocks = term if blocks is None else blocks + term
    return blocks


@dataclass(frozen=True, eq=False)
class SwitchedChannel:
    base: Channel
    e: Channel
    f: Channel
    omega: np.ndarray

    @property
    def d(self) -> int:
        return self.e.dim_in


def switch_channel(e: Channel, f: Channel, omega) -> SwitchedChannel:
    """``S_omega(E, F)`` as a channel ``d -> 2d``.

    A mixed control is split into its eigenvectors; each pure branch contributes
    ``sqrt(w_k)`` times its pure-control Kraus operators.
    """
    omega = control_state(omega)
    kraus = []
    for w, g in control_support(omega):
        kraus.extend(np.sqrt(w) * k for k in switch_kraus(e, f, g))
    d = _check_pair(e, f)
    base = require_valid(Channel(d, 2 * d, tuple(kraus)))
    return SwitchedChannel(base, e, f, omega)


@dataclass(frozen=True)
class PauliSwitchDecomposition:
    """``S_omega(E_p, E_p)(rho) = q+ C+(rho) (x) omega+ + q- C-(rho) (x) omega-``.

    ``c_plus`` / ``c_minus`` are ``None`` when the matching weight vanishes.
    """

    p: PauliVector
    q_plus: object
    q_minus: object
    p_plus: PauliVector | None
    p_minus: PauliVector | None
    omega_plus: np.ndarray
    omega_minus: np.ndarray

    @property
    def c_plus(self) -> Channel | None:
        return None if self.p_plus is None else pauli_channel(self.p_plus)

    @property
    def c_minus(self) -> Channel | None:
        return None if self.p_minus is None else pauli_channel(self.p_minus)

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros((4, 4), dtype=complex)
        for q, c, w in ((self.q_plus, self.c_plus, self.omega_plus), (self.q_minus, self.c_minus, self.omega_minus)):
            if c is not None:
                out += float(q) * np.kron(c(rho), w)
        return out

    def choi(self) -> np.ndarray:
        return choi_of_map(self.apply, 2)


def pauli_switch_weights(p):
    """``(q+, q-)`` with ``q- = 2(p1 p2 + p2 p3 + p3 p1)``; exact for rational input."""
    p = PauliVector(p)
    _, p1, p2, p3 = p
    q_minus = 2 * (p1 * p2 + p2 * p3 + p3 * p1)
    return 1 - q_minus, q_minus


def pauli_switch_decomposition(p, omega) -> PauliSwitchDecomposition:
    p = PauliVector(p)
    omega = control_state(omega)
    p0, p1, p2, p3 = p
    q_plus, q_minus = pauli_switch_weights(p)
    plus_w = (p.norm2, 2 * p0 * p1, 2 * p0 * p2, 2 * p0 * p3)
    # X <- 2 p2 p3, Y <- 2 p1 p3, Z <- 2 p1 p2
    minus_w = (0 * p0, 2 * p2 * p3, 2 * p1 * p3, 2 * p1 * p2)
    p_plus = PauliVector(tuple(w / q_plus for w in plus_w)) if float(q_plus) > 0 else None
    p_minus = PauliVector(tuple(w / q_minus for w in minus_w)) if float(q_minus) > 0 else None
    return PauliSwitchDecomposition(p, q_plus, q_minus, p_plus, p_minus, omega, Z @ omega @ Z)


def _basis(basis: Sequence) -> list[np.ndarray]:
    b = [ket(v) for v in basis]
    if len(b) != 2 or any(v.size != 2 for v in b):
        raise DimensionError("basis must be two 2-vectors")
    gram = np.array([[np.vdot(u, v) for v in b] for u in b])
    if np.max(np.abs(gram - np.eye(2))) > 1e-10:
        raise ContractError("control basis is not orthonormal")
    return b


def condition_on_control(sw: SwitchedChannel, basis: Sequence, tol: float = DECOMPOSE_TOL) -> list[tuple[float, Channel | None]]:
    """Split a switched channel by measuring the control in an orthonormal basis.

    Returns ``(probability, conditional channel)`` per outcome; the channel is ``None``
    for an outcome of probability 0.

    :raises ContractError: if the basis is not orthonormal or an outcome probability
        depends on the input state, in which case the basis does not decompose the channel.
    """
    b = _basis(basis)
    d = sw.d
    out = []
    for v in b:
        proj_out = np.kron(np.eye(d), np.conj(v).reshape(1, 2))
        ks = [proj_out @ k for k in sw.base.kraus]
        effect = sum(dag(k) @ k for k in ks)
        prob = float(np.real(np.trace(effect))) / d
        if np.max(np.abs(effect - prob * np.eye(d))) > tol:
            raise ContractError("basis does not decompose the channel: outcome probability depends on the input")
        ch = None if prob <= tol else Channel(d, d, tuple(k / np.sqrt(prob) for k in ks))
        out.append((prob, ch))
    return out


def reassembly_residual(sw: SwitchedChannel, basis: Sequence, tol: float = DECOMPOSE_TOL) -> float:
    """Choi max-abs distance between ``sum_i q_i C_i (x) |b_i><b_i|`` and the switched channel.

    Zero exactly when the control coherences vanish in ``basis``.
    """
    b = _basis(basis)
    pieces = [(p, c, np.outer(v, np.conj(v))) for (p, c), v in zip(condition_on_control(sw, b, tol), b) if c is not None]

    def reassembled(rho):
        return sum(p * np.kron(c(rho), bb) for p, c, bb in pieces)

    return float(np.max(np.abs(choi_of_map(reassembled, sw.d) - choi_matrix(sw.base))))
