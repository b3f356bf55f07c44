"""Entanglement-breaking certificates for switched complete-erasure channels.

The Choi state ``Gamma`` of ``S_omega(E0, F0)`` on ``A (x) B (x) C`` splits as
``(2/d) Sigma + ((d-2)/d) Theta``. ``Theta`` is a sum of product terms and
``Sigma = (I_A (x) V) Xi (I_A (x) V^dag)`` with ``V = |phi>|0><0| + |psi>|1><1|``
an isometry on the control. ``Xi`` lives on a 2-dim subspace of ``A`` times the
control qubit, where a positive partial transpose proves separability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import apply_extended, erasure_channel, max_entangled
from .linalg import (
    KET0,
    KET1,
    ContractError,
    dag,
    ket,
    partial_transpose,
    proj,
    validate_density,
)
from .switch import control_state, switch_channel

PT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ErasurePair:
    phi: np.ndarray
    psi: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        phi, psi = ket(self.phi), ket(self.psi)
        if phi.size != psi.size or phi.size < 2:
            raise ContractError("phi and psi must be vectors of the same dimension d >= 2")
        for v in (phi, psi):
            if abs(np.linalg.norm(v) - 1) > 1e-10:
                raise ContractError("erasure targets must be unit vectors")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "omega", control_state(self.omega))

    @property
    def d(self) -> int:
        return self.phi.size

    def channels(self):
        return erasure_channel(self.phi, self.d), erasure_channel(self.psi, self.d)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> "ErasurePair":
        from .linalg import random_density, random_ket

        return cls(random_ket(d, rng), random_ket(d, rng), random_density(2, rng))


def switched_erasure_choi(pair: ErasurePair) -> np.ndarray:
    """``(id_A (x) S_omega(E0, F0))(|Phi+><Phi+|)`` on ``[A, B, C]`` with dims ``[d, d, 2]``."""
    e0, f0 = pair.channels()
    sw = switch_channel(e0, f0, pair.omega)
    d = pair.d
    phi_plus = proj(max_entangled(d))
    return apply_extended(sw.base, phi_plus, [d, d])


def span_projector(phi, psi) -> np.ndarray:
    """Projector onto ``Span{conj(phi), conj(psi)}``, padded to rank 2 when the vectors are parallel."""
    a, b = np.conj(ket(phi)), np.conj(ket(psi))
    d = a.size
    cols = [a, b] + list(np.eye(d))
    q, r = np.linalg.qr(np.column_stack(cols))
    # the first two Householder columns span {a, b} when independent; otherwise q[:, 1] completes it
    basis = q[:, :2]
    return basis @ dag(basis)


def xi_state(omega, phi, psi, p: np.ndarray | None = None) -> np.ndarray:
    """``Xi`` on ``A (x) C``."""
    omega = np.asarray(omega, dtype=complex)
    a, b = np.conj(ket(phi)), np.conj(ket(psi))
    if p is None:
        p = span_projector(phi, psi)
    c00, c01, c10, c11 = (np.outer(u, np.conj(v)) for u in (KET0, KET1) for v in (KET0, KET1))
    return 0.5 * (
        omega[0, 0] * np.kron(p, c00)
        + omega[0, 1] * np.kron(np.outer(a, np.conj(b)), c01)
        + omega[1, 0] * np.kron(np.outer(b, np.conj(a)), c10)
        + omega[1, 1] * np.kron(p, c11)
    )


def control_isometry(phi, psi) -> np.ndarray:
    """``V = |phi>_B |0><0|_C + |psi>_B |1><1|_C`` as a ``2d x 2`` matrix (output order ``[B, C]``)."""
    return np.column_stack([np.kron(ket(phi), KET0), np.kron(ket(psi), KET1)])


@dataclass(frozen=True, eq=False)
class Decomposition:
    sigma: np.ndarray
    theta: np.ndarray | None
    xi: np.ndarray
    projector: np.ndarray
    weights: tuple[float, float]


def decompose_sigma_theta(pair: ErasurePair) -> Decomposition:
    d = pair.d
    p = span_projector(pair.phi, pair.psi)
    xi = xi_state(pair.omega, pair.phi, pair.psi, p)
    iv = np.kron(np.eye(d), control_isometry(pair.phi, pair.psi))
    sigma = iv @ xi @ dag(iv)
    theta = None
    if d > 2:
        rest = (np.eye(d) - p) / (d - 2)
        om = pair.omega
        theta = om[0, 0] * np.kron(rest, np.kron(proj(pair.phi), proj(KET0))) + om[1, 1] * np.kron(
            rest, np.kron(proj(pair.psi), proj(KET1))
        )
    return Decomposition(sigma, theta, xi, p, (2 / d, (d - 2) / d))


def reconstruction_residual(pair: ErasurePair, dec: Decomposition | None = None, gamma=None) -> float:
    dec = dec or decompose_sigma_theta(pair)
    gamma = switched_erasure_choi(pair) if gamma is None else gamma
    recon = dec.weights[0] * dec.sigma
    if dec.theta is not None:
        recon = recon + dec.weights[1] * dec.theta
    return float(np.max(np.abs(gamma - recon)))


@dataclass(frozen=True, eq=False)
class EBCertificate:
    gamma: np.ndarray
    sigma_part: np.ndarray
    theta_part: np.ndarray | None
    weights: tuple[float, float]
    xi: np.ndarray
    ppt_ok: bool
    min_pt_eig: float
    reconstruction_residual: float
    transpose_identity_residual: float

    @property
    def d(self) -> int:
        return round(np.sqrt(self.gamma.shape[0] / 2))


def certify_entanglement_breaking(pair: ErasurePair) -> EBCertificate:
    """Check the decomposition, the partial-transpose symmetry of ``Xi`` and its PPT property."""
    gamma = switched_erasure_choi(pair)
    validate_density(gamma)
    dec = decompose_sigma_theta(pair)
    recon = reconstruction_residual(pair, dec, gamma)
    xi_pt = partial_transpose(dec.xi, [pair.d, 2], on=1)
    swapped = xi_state(pair.omega.T, pair.psi, pair.phi, dec.projector)
    t_resid = float(np.max(np.abs(xi_pt - swapped)))
    min_eig = float(np.linalg.eigvalsh((xi_pt + dag(xi_pt)) / 2)[0])
    return EBCertificate(
        gamma=gamma,
        sigma_part=dec.sigma,
        theta_part=dec.theta,
        weights=dec.weights,
        xi=dec.xi,
        ppt_ok=min_eig >= -PT_TOL,
        min_pt_eig=min_eig,
        reconstruction_residual=recon,
        transpose_identity_residual=t_resid,
    )
