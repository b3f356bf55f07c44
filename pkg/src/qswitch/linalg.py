"""Dense complex linear algebra on small Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Tensor products use the
big-endian convention: the first factor is the most significant index, so
``tensor(a, b)[i*rb + k, j*cb + l] == a[i, j] * b[k, l]``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_CLAMP_TOL = 1e-10
TRACE_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when matrix shapes disagree with declared subsystem dimensions."""


class ContractError(ValueError):
    """Raised when an input violates an operation's precondition."""


I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("matrix has non-finite entries")
    return arr


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def ket(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(-1)


def proj(v) -> np.ndarray:
    """Rank-one operator ``|v><v|``."""
    v = ket(v)
    return np.outer(v, np.conj(v))


def tensor(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors), first factor most significant."""
    if not ops:
        raise ValueError("tensor needs at least one factor")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionError(f"dims {dims} have product {int(np.prod(dims))}, matrix is {m.shape[0]}-dim")
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    :param m: square matrix on ``prod(dims)``.
    :param dims: subsystem dimensions, first factor most significant.
    :param keep: indices of the subsystems to keep; order in the result follows ``dims``.
    """
    m = np.asarray(m, dtype=complex)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    t = m.reshape(dims + dims)
    # trace from the highest index down so remaining axis numbers stay valid
    current = n
    for ax in reversed(range(n)):
        if ax in keep:
            continue
        t = np.trace(t, axis1=ax, axis2=ax + current)
        current -= 1
    kd = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(kd, kd)


def partial_transpose(m, dims: Sequence[int], on: int | Iterable[int]) -> np.ndarray:
    """Transpose the named subsystem(s) and leave the rest untouched."""
    m = np.asarray(m, dtype=complex)
    dims = _check_dims(m, dims)
    n = len(dims)
    targets = [on] if isinstance(on, (int, np.integer)) else list(on)
    t = m.reshape(dims + dims)
    perm = list(range(2 * n))
    for k in targets:
        if k < 0 or k >= n:
            raise DimensionError(f"subsystem index {k} out of range")
        perm[k], perm[k + n] = perm[k + n], perm[k]
    return t.transpose(perm).reshape(m.shape)


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and float(np.max(np.abs(m - dag(m)), initial=0.0)) <= tol


def herm_eig(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.

    Columns of the returned matrix are the eigenvectors. LAPACK ``zheevd`` is
    deterministic for a fixed input.
    """
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise ContractError("herm_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh((m + dag(m)) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def trace_norm(m) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)))


def validate_density(rho, tol: float = PSD_CLAMP_TOL) -> np.ndarray:
    """Check a density matrix and return it with tiny negative eigenvalues clamped to zero.

    :raises ContractError: if ``rho`` is not Hermitian, has an eigenvalue below ``-tol``,
        or does not have unit trace.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got {rho.shape}")
    if not is_hermitian(rho, HERMITIAN_TOL):
        raise ContractError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise ContractError(f"density matrix trace {tr.real:.3g} != 1")
    w, v = np.linalg.eigh((rho + dag(rho)) / 2)
    if w[0] < -tol:
        raise ContractError(f"density matrix has eigenvalue {w[0]:.3g} < -{tol:g}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        return (v * w) @ dag(v)
    return rho


def entropy_of_spectrum(eigs) -> float:
    """Shannon entropy in bits of a (possibly slightly negative) spectrum, 0 log 0 = 0."""
    # plain floats: these spectra are tiny and this sits inside optimizer loops
    return -sum(v * math.log2(v) for v in np.asarray(eigs, dtype=float).tolist() if v > 0) + 0.0


def von_neumann_entropy(rho) -> float:
    """von Neumann entropy ``-Tr rho log2 rho`` of a density matrix."""
    rho = validate_density(rho)
    w = np.linalg.eigvalsh((rho + dag(rho)) / 2)
    return entropy_of_spectrum(w)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """``rows x cols`` isometry (``V^dag V = I``) with ``rows >= cols``."""
    if rows < cols:
        raise DimensionError("isometry needs rows >= cols")
    return random_unitary(rows, rng)[:, :cols]


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from a Ginibre matrix of the given rank (full rank by default)."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ dag(g)
    return rho / np.trace(rho).real


def max_abs(m) -> float:
    return float(np.max(np.abs(np.asarray(m)), initial=0.0))
