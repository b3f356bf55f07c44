"""Knill-Laflamme checks, qubit classification and recovery for switched channels."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .capacity import hashing_bound
from .channels import (
    Channel,
    is_entanglement_breaking,
    pauli_coefficients,
)
from .linalg import I2, PAULIS, X, Y, Z, ContractError, DimensionError, dag, ket
from .switch import control_support, switch_channel, switch_kraus

KL_TOL = 1e-8
Q_TOL = 1e-6
CHI_TOL = 1e-8
RANK_TOL = 1e-9
EQUAL_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class KLReport:
    satisfied: bool
    sigma: np.ndarray
    residual: float


def kl_check(kraus: Sequence[np.ndarray], tol: float = KL_TOL) -> KLReport:
    """Knill-Laflamme test ``K_i^dag K_j = sigma_ij I`` on the full input space.

    ``sigma_ij = Tr(K_i^dag K_j) / d``; the residual is the largest max-abs entry of
    ``K_i^dag K_j - sigma_ij I`` over all pairs.
    """
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if not ops:
        raise ContractError("empty Kraus list")
    shape = ops[0].shape
    if any(k.shape != shape for k in ops):
        raise DimensionError("Kraus operators disagree in shape")
    d = shape[1]
    stack = np.array(ops)
    # products[i, j] = K_i^dag K_j
    products = np.einsum("iba,jbc->ijac", np.conj(stack), stack)
    sigma = np.trace(products, axis1=2, axis2=3) / d
    resid = products - sigma[:, :, None, None] * np.eye(d)
    residual = float(np.max(np.abs(resid)))
    return KLReport(residual <= tol, sigma, residual)


def switched_kl_check(e: Channel, gamma, tol: float = KL_TOL) -> KLReport:
    """KL test of ``S_{|gamma><gamma|}(E, E)`` built from the pure-control Kraus form."""
    return kl_check(switch_kraus(e, e, gamma), tol)


def switched_correctable(e: Channel, omega, tol: float = KL_TOL) -> bool:
    """Every pure branch in the support of ``omega`` and the mixed switch itself must pass KL."""
    for _, g in control_support(omega):
        if not switched_kl_check(e, g, tol).satisfied:
            return False
    return kl_check(switch_channel(e, e, omega).base.kraus, tol).satisfied


class QubitKind(enum.Enum):
    UNITARY = "Unitary"
    SELF_ADJOINT_PAIR = "SelfAdjointPair"
    NONE = "None"


@dataclass(frozen=True)
class QubitClassification:
    """Classification of a qubit channel.

    For ``SELF_ADJOINT_PAIR``: ``E(rho) = q U1 rho U1 + (1 - q) U2 rho U2`` with
    ``Uk = mk . sigma`` and ``basis`` a unitary taking ``X, Y`` to ``U1, U2``.
    """

    kind: QubitKind
    q: float | None = None
    m1: np.ndarray | None = None
    m2: np.ndarray | None = None
    basis: np.ndarray | None = None
    unitary: np.ndarray | None = None
    chi_eigenvalues: np.ndarray | None = field(default=None, repr=False)

    @property
    def u1(self) -> np.ndarray:
        return bloch_operator(self.m1)

    @property
    def u2(self) -> np.ndarray:
        return bloch_operator(self.m2)

    def reconstruct(self) -> Channel:
        if self.kind is QubitKind.UNITARY:
            return Channel(2, 2, (self.unitary,))
        if self.kind is QubitKind.SELF_ADJOINT_PAIR:
            ks = [np.sqrt(self.q) * self.u1, np.sqrt(1 - self.q) * self.u2]
            return Channel(2, 2, tuple(k for k in ks if np.max(np.abs(k)) > 0))
        raise ContractError("channel has no canonical form")


def bloch_operator(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return m[0] * X + m[1] * Y + m[2] * Z


def _fix_sign(v: np.ndarray) -> np.ndarray:
    for c in v:
        if abs(c) > 1e-9:
            return v if c > 0 else -v
    return v


def su2_from_axes(m1, m2) -> np.ndarray:
    """Unitary ``U`` with ``U X U^dag = m1 . sigma`` and ``U Y U^dag = m2 . sigma``.

    ``m1, m2`` must be orthonormal; ``U Z U^dag = (m1 x m2) . sigma``.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    rot = np.column_stack([m1, m2, np.cross(m1, m2)])
    x, y, z, w = Rotation.from_matrix(rot).as_quat()
    return w * I2 - 1j * (x * X + y * Y + z * Z)


def classify(e: Channel) -> QubitClassification:
    """Unitary / self-adjoint pair / neither, from the process matrix in the Pauli basis.

    The process matrix is the Choi operator written in the ``|sigma_a>>`` basis, so it
    is basis-of-Kraus independent. A self-adjoint pair has a real process matrix with
    no identity component; diagonalizing its real 3x3 block with a real orthogonal
    matrix gives orthogonal Bloch axes and weights ``q, 1 - q``.
    """
    if e.dim_in != 2 or e.dim_out != 2:
        raise DimensionError("classify is defined for qubit channels only")
    chi = pauli_coefficients(e)
    w = np.linalg.eigvalsh(chi)[::-1]
    rank = int(np.sum(w > RANK_TOL))
    if rank == 1:
        # the single Kraus direction, normalized to a unitary
        vals, vecs = np.linalg.eigh(chi)
        c = vecs[:, -1]
        u = sum(ci * s for ci, s in zip(c, PAULIS))
        u = u / np.sqrt(abs(np.linalg.det(u)))
        return QubitClassification(QubitKind.UNITARY, unitary=u, chi_eigenvalues=w)
    if rank != 2:
        return QubitClassification(QubitKind.NONE, chi_eigenvalues=w)
    if np.max(np.abs(chi[0, :])) > CHI_TOL or np.max(np.abs(chi.imag)) > CHI_TOL:
        return QubitClassification(QubitKind.NONE, chi_eigenvalues=w)
    block = chi.real[1:, 1:]
    lam, vecs = np.linalg.eigh((block + block.T) / 2)
    q = float(lam[2])
    n1, n2 = vecs[:, 2], vecs[:, 1]
    if abs(lam[2] - lam[1]) <= Q_TOL:
        # degenerate plane: anchor m1 at the first coordinate axis with a nonzero projection
        normal = np.cross(n1, n2)
        for axis in np.eye(3):
            proj = axis - np.dot(axis, normal) * normal
            if np.linalg.norm(proj) > 1e-6:
                n1 = proj / np.linalg.norm(proj)
                n2 = np.cross(normal, n1)
                break
    m1 = _fix_sign(n1 / np.linalg.norm(n1))
    m2 = _fix_sign(n2 / np.linalg.norm(n2))
    return QubitClassification(
        QubitKind.SELF_ADJOINT_PAIR,
        q=q,
        m1=m1,
        m2=m2,
        basis=su2_from_axes(m1, m2),
        chi_eigenvalues=w,
    )


def is_equal_weight(gamma, tol: float = EQUAL_WEIGHT_TOL) -> bool:
    g = ket(gamma)
    return abs(abs(g[0]) - abs(g[1])) <= tol


def synthesize_recovery(e: Channel, gamma) -> Channel:
    """Recovery ``R: system (x) control -> system`` with ``R o S_gamma(E, E) = id``.

    Unitary ``E = U``: both uses act, so discard the control and apply ``(U^2)^dag``. Self-adjoint pair: measure
    the control in ``{gamma, Z gamma}`` and apply the identity or ``k . sigma`` with
    ``k = m1 x m2 / |m1 x m2|``.
    """
    cls = classify(e)
    g = ket(gamma)
    if cls.kind is QubitKind.UNITARY:
        u2 = cls.unitary @ cls.unitary
        return Channel(4, 2, tuple(np.kron(dag(u2), b.reshape(1, 2)) for b in np.eye(2)))
    if cls.kind is QubitKind.SELF_ADJOINT_PAIR:
        if not is_equal_weight(g):
            raise ContractError("no recovery: the control state must satisfy |<0|g>| = |<1|g>|")
        k = np.cross(cls.m1, cls.m2)
        k = k / np.linalg.norm(k)
        g_plus = g
        g_minus = Z @ g
        return Channel(
            4,
            2,
            (
                np.kron(I2, np.conj(g_plus).reshape(1, 2)),
                np.kron(bloch_operator(k), np.conj(g_minus).reshape(1, 2)),
            ),
        )
    raise ContractError("no recovery: channel is neither unitary nor a self-adjoint pair")


class ActivationKind(enum.Enum):
    MAXIMAL = "MaximalActivation"
    POSITIVE = "PositiveCapacity"
    NONE = "NoActivation"


@dataclass(frozen=True)
class ActivationVerdict:
    kind: ActivationKind
    classification: QubitClassification
    evidence: dict


def verify_maximal_activation(e: Channel) -> ActivationVerdict:
    cls = classify(e)
    eb = is_entanglement_breaking(e)
    evidence = {"eb": eb.status.value, "min_pt_eigenvalue": eb.min_pt_eigenvalue, "class": cls.kind.value}
    if cls.kind is QubitKind.SELF_ADJOINT_PAIR:
        hb = hashing_bound(cls.q)
        evidence.update(q=cls.q, hashing_bound=hb)
        if abs(cls.q - 0.5) <= Q_TOL and eb.is_eb:
            return ActivationVerdict(ActivationKind.MAXIMAL, cls, evidence)
        if hb > 0:
            return ActivationVerdict(ActivationKind.POSITIVE, cls, evidence)
    elif cls.kind is QubitKind.UNITARY:
        evidence.update(q=0.0, hashing_bound=1.0)
        return ActivationVerdict(ActivationKind.POSITIVE, cls, evidence)
    return ActivationVerdict(ActivationKind.NONE, cls, evidence)
