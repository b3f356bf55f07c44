"""Quantum channels as Kraus families, Choi conversions and entanglement-breaking tests."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import (
    PAULIS,
    ContractError,
    DimensionError,
    as_matrix,
    dag,
    ket,
    partial_trace,
    partial_transpose,
    proj,
    tensor,
    validate_density,
)

TP_TOL = 1e-9
RANK_TOL = 1e-9
PROB_TOL = 1e-12
EB_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Channel:
    """CPTP map ``rho -> sum_i K_i rho K_i^dag`` from ``dim_in`` to ``dim_out``.

    Construction checks shapes only; call :func:`validate` for trace preservation.
    """

    dim_in: int
    dim_out: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus)
        if not ops:
            raise ContractError("a channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (self.dim_out, self.dim_in):
                raise DimensionError(
                    f"Kraus operator has shape {k.shape}, expected {(self.dim_out, self.dim_in)}"
                )
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @classmethod
    def from_kraus(cls, kraus: Sequence) -> "Channel":
        ops = [as_matrix(k) for k in kraus]
        if not ops:
            raise ContractError("a channel needs at least one Kraus operator")
        rows, cols = ops[0].shape
        return cls(cols, rows, tuple(ops))

    def __call__(self, rho):
        return apply(self, rho)

    @cached_property
    def stack(self) -> np.ndarray:
        """Kraus operators as one ``(r, dim_out, dim_in)`` array."""
        arr = np.array(self.kraus)
        arr.setflags(write=False)
        return arr

    def __len__(self):
        return len(self.kraus)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    deviation: float


def validate(ch: Channel, tol: float = TP_TOL) -> ValidationReport:
    """Max-abs deviation of ``sum K^dag K`` from the identity."""
    shapes = {k.shape for k in ch.kraus}
    if len(shapes) != 1:
        raise DimensionError(f"Kraus operators disagree in shape: {sorted(shapes)}")
    s = sum(dag(k) @ k for k in ch.kraus)
    dev = float(np.max(np.abs(s - np.eye(ch.dim_in))))
    return ValidationReport(dev <= tol, dev)


def require_valid(ch: Channel) -> Channel:
    rep = validate(ch)
    if not rep.ok:
        raise ContractError(f"channel is not trace preserving (deviation {rep.deviation:.3g})")
    return ch


class PauliVector(tuple):
    """Probability vector ``(p0, p1, p2, p3)`` weighting ``I, X, Y, Z``.

    Entries may be floats or :class:`fractions.Fraction`; rationals stay exact through
    :mod:`qswitch.switch`.
    """

    def __new__(cls, p):
        vals = tuple(p)
        if len(vals) != 4:
            raise ContractError(f"Pauli vector needs 4 entries, got {len(vals)}")
        vals = tuple(v if isinstance(v, Fraction) else float(v) for v in vals)
        for v in vals:
            if not (-PROB_TOL <= float(v) <= 1 + PROB_TOL):
                raise ContractError(f"Pauli probability {v} outside [0, 1]")
        if abs(float(sum(vals)) - 1.0) > PROB_TOL:
            raise ContractError(f"Pauli probabilities sum to {float(sum(vals))!r}, not 1")
        return super().__new__(cls, vals)

    @property
    def norm2(self):
        """``|p|^2 = sum p_i^2``."""
        return sum(v * v for v in self)


def pauli_channel(p) -> Channel:
    """Pauli channel with Kraus ``sqrt(p_i) sigma_i``; zero-weight terms are dropped."""
    p = PauliVector(p)
    kraus = [np.sqrt(float(pi)) * s for pi, s in zip(p, PAULIS) if float(pi) > 0]
    return Channel(2, 2, tuple(kraus))


def unitary_channel(u) -> Channel:
    u = as_matrix(u)
    return Channel(u.shape[1], u.shape[0], (u,))


def identity_channel(d: int = 2) -> Channel:
    return unitary_channel(np.eye(d))


def erasure_channel(phi, dim_in: int) -> Channel:
    """Complete erasure channel ``rho -> |phi><phi|`` with Kraus ``|phi><n|``."""
    phi = ket(phi)
    if abs(np.linalg.norm(phi) - 1) > 1e-10:
        raise ContractError(f"erasure target must be a unit vector, norm is {np.linalg.norm(phi):.6g}")
    basis = np.eye(dim_in)
    return Channel(dim_in, phi.size, tuple(np.outer(phi, basis[n]) for n in range(dim_in)))


def apply(ch: Channel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise DimensionError(f"state is {rho.shape}, channel input dimension is {ch.dim_in}")
    return sum(k @ rho @ dag(k) for k in ch.kraus)


def apply_extended(ch: Channel, rho_ab, dims: Sequence[int]) -> np.ndarray:
    """Apply ``id_A (x) ch`` to a bipartite state with ``dims = [d_A, d_B]``."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    da, db = (int(d) for d in dims)
    if db != ch.dim_in or rho_ab.shape != (da * db, da * db):
        raise DimensionError(f"dims {list(dims)} do not match channel input {ch.dim_in} / state {rho_ab.shape}")
    ia = np.eye(da)
    out = 0
    for k in ch.kraus:
        big = np.kron(ia, k)
        out = out + big @ rho_ab @ dag(big)
    return out


def max_entangled(d: int) -> np.ndarray:
    """``|Phi+> = sum_n |n>|n> / sqrt(d)``."""
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class ChoiOperator:
    """Choi matrix with factor order ``[output, input]``.

    Unnormalized: ``sum_i |K_i>><<K_i|`` with ``|K>> = (K (x) I)|I>>``, whose trace over
    the output is ``I_in``. Normalized (Choi state): the same divided by ``dim_in``.
    """

    dim_in: int
    dim_out: int
    matrix: np.ndarray
    normalized: bool

    @property
    def dims(self) -> list[int]:
        return [self.dim_out, self.dim_in]


def vec(k) -> np.ndarray:
    """``|K>> = (K (x) I)|I>>``; equals the row-major flattening of ``K``."""
    return np.asarray(k, dtype=complex).reshape(-1)


def kraus_to_choi(ch: Channel, normalized: bool = False) -> ChoiOperator:
    vs = np.array([vec(k) for k in ch.kraus])
    m = vs.T @ np.conj(vs)
    if normalized:
        m = m / ch.dim_in
    return ChoiOperator(ch.dim_in, ch.dim_out, m, normalized)


def choi_matrix(ch: Channel) -> np.ndarray:
    """Unnormalized Choi matrix, the common currency for channel comparison."""
    return kraus_to_choi(ch).matrix


def choi_distance(a: Channel, b: Channel) -> float:
    """Max-abs distance between unnormalized Choi matrices."""
    ma, mb = choi_matrix(a), choi_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionError(f"channels have different shapes: {ma.shape} vs {mb.shape}")
    return float(np.max(np.abs(ma - mb)))


def choi_to_kraus(c: ChoiOperator, tol: float = RANK_TOL) -> Channel:
    """Kraus operators from the scaled eigenvectors of a Choi matrix."""
    m = np.asarray(c.matrix, dtype=complex)
    n = c.dim_in * c.dim_out
    if m.shape != (n, n):
        raise DimensionError(f"Choi matrix is {m.shape}, expected {(n, n)}")
    if c.normalized:
        m = m * c.dim_in
    if np.max(np.abs(m - dag(m))) > 1e-9:
        raise ContractError("Choi matrix is not Hermitian")
    w, v = np.linalg.eigh((m + dag(m)) / 2)
    if w[0] < -1e-9:
        raise ContractError(f"Choi matrix is not positive semidefinite (eigenvalue {w[0]:.3g})")
    marg = partial_trace(m, [c.dim_out, c.dim_in], keep=[1])
    if np.max(np.abs(marg - np.eye(c.dim_in))) > 1e-8:
        raise ContractError("Choi matrix does not satisfy the trace-preservation marginal")
    kraus = [
        np.sqrt(w[i]) * v[:, i].reshape(c.dim_out, c.dim_in)
        for i in range(len(w) - 1, -1, -1)
        if w[i] > tol
    ]
    return Channel(c.dim_in, c.dim_out, tuple(kraus))


def compose_serial(f: Channel, e: Channel) -> Channel:
    """``f o e``: apply ``e`` first, then ``f``; Kraus ``F_j E_i``."""
    if f.dim_in != e.dim_out:
        raise DimensionError(f"cannot compose: outer input {f.dim_in} != inner output {e.dim_out}")
    return Channel(e.dim_in, f.dim_out, tuple(fk @ ek for ek in e.kraus for fk in f.kraus))


def compose_parallel(e: Channel, f: Channel) -> Channel:
    """``e (x) f`` with Kraus ``E_i (x) F_j``."""
    return Channel(
        e.dim_in * f.dim_in,
        e.dim_out * f.dim_out,
        tuple(np.kron(ek, fk) for ek in e.kraus for fk in f.kraus),
    )


def remix_kraus(ch: Channel, v: np.ndarray) -> Channel:
    """New Kraus family ``K'_a = sum_i V[a, i] K_i`` for an isometry ``V`` (``V^dag V = I``)."""
    v = np.asarray(v, dtype=complex)
    if v.shape[1] != len(ch.kraus):
        raise DimensionError("isometry column count must match the number of Kraus operators")
    stack = np.array(ch.kraus)
    return Channel(ch.dim_in, ch.dim_out, tuple(np.tensordot(v, stack, axes=(1, 0))))


def gram_matrix(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix ``G[i, j] = Tr(A_i^dag A_j)``."""
    vs = np.array([np.asarray(o, dtype=complex).reshape(-1) for o in ops])
    return np.conj(vs) @ vs.T


def span_rank(ops: Sequence[np.ndarray], tol: float = RANK_TOL) -> int:
    """Dimension of the linear span of ``ops`` (Gram eigenvalues above ``tol``)."""
    if len(ops) == 0:
        return 0
    w = np.linalg.eigvalsh(gram_matrix(ops))
    return int(np.sum(w > tol))


def kraus_rank(ch: Channel, tol: float = RANK_TOL) -> int:
    return span_rank(ch.kraus, tol)


class EBStatus(enum.Enum):
    ENTANGLEMENT_BREAKING = "EntanglementBreaking"
    NOT_EB = "NotEB"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class EBVerdict:
    status: EBStatus
    min_pt_eigenvalue: float
    witness: dict = field(default_factory=dict)

    @property
    def is_eb(self) -> bool:
        return self.status is EBStatus.ENTANGLEMENT_BREAKING


def choi_state_pt_min_eig(ch: Channel) -> float:
    c = kraus_to_choi(ch, normalized=True)
    pt = partial_transpose(c.matrix, c.dims, on=1)
    return float(np.linalg.eigvalsh((pt + dag(pt)) / 2)[0])


def is_entanglement_breaking(ch: Channel, tol: float = EB_TOL) -> EBVerdict:
    """PPT test on the normalized Choi state.

    Conclusive (Peres-Horodecki) when ``dim_in * dim_out <= 6``; above that a PPT Choi
    state yields ``UNDETERMINED``.
    """
    c = kraus_to_choi(ch, normalized=True)
    pt = partial_transpose(c.matrix, c.dims, on=1)
    w, v = np.linalg.eigh((pt + dag(pt)) / 2)
    lam = float(w[0])
    if lam < -tol:
        return EBVerdict(EBStatus.NOT_EB, lam, {"negative_pt_eigenvector": v[:, 0]})
    if ch.dim_in * ch.dim_out <= 6:
        return EBVerdict(EBStatus.ENTANGLEMENT_BREAKING, lam, {"note": "PPT is equivalent to separability here"})
    return EBVerdict(EBStatus.UNDETERMINED, lam, {"note": "PPT Choi state; PPT is not sufficient in this dimension"})


def pauli_coefficients(ch: Channel) -> np.ndarray:
    """Process (chi) matrix of a qubit channel in the ``I, X, Y, Z`` basis.

    ``E(rho) = sum_ab chi[a, b] sigma_a rho sigma_b``; for a Pauli channel it is
    ``diag(p)``.
    """
    if ch.dim_in != 2 or ch.dim_out != 2:
        raise DimensionError("process matrix is defined here for qubit channels only")
    # K = sum_a c_a sigma_a with c_a = Tr(sigma_a K) / 2
    coeffs = np.array([[np.trace(s @ k) / 2 for s in PAULIS] for k in ch.kraus])
    return coeffs.T @ np.conj(coeffs)


def random_channel(d_in: int, d_out: int, n_kraus: int, rng: np.random.Generator) -> Channel:
    """Channel from a random Stinespring isometry with ``n_kraus`` Kraus operators."""
    from .linalg import random_isometry

    v = random_isometry(d_out * n_kraus, d_in, rng)
    return Channel(d_in, d_out, tuple(v[i * d_out:(i + 1) * d_out, :] for i in range(n_kraus)))


def state_dm(v) -> np.ndarray:
    """Density matrix of a pure state, validated."""
    return validate_density(proj(v))


__all__ = [
    "Channel",
    "ChoiOperator",
    "EBStatus",
    "EBVerdict",
    "PauliVector",
    "ValidationReport",
    "apply",
    "apply_extended",
    "choi_distance",
    "choi_matrix",
    "choi_to_kraus",
    "compose_parallel",
    "compose_serial",
    "erasure_channel",
    "gram_matrix",
    "identity_channel",
    "is_entanglement_breaking",
    "kraus_rank",
    "kraus_to_choi",
    "max_entangled",
    "pauli_channel",
    "pauli_coefficients",
    "random_channel",
    "remix_kraus",
    "span_rank",
    "tensor",
    "unitary_channel",
    "validate",
]
