"""Coherent superposition of N independent channels along alternative paths."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import Channel, kraus_rank, require_valid, span_rank
from .linalg import ContractError, DimensionError

AMP_TOL = 1e-10


class WitnessUnavailable(ContractError):
    """Raised when some path carries a noiseless channel or a zero amplitude."""


@dataclass(frozen=True, eq=False)
class PathConfig:
    """Channels on each path, the path amplitudes ``phi`` and the vacuum-extension amplitudes.

    ``alphas=None`` means the uniform vector ``1/sqrt(r_j)`` on every path.
    """

    channels: tuple[Channel, ...]
    phi: np.ndarray
    alphas: tuple[np.ndarray, ...] | None = field(default=None)

    def __post_init__(self):
        chans = tuple(self.channels)
        if not chans:
            raise ContractError("need at least one path")
        d = chans[0].dim_in
        for ch in chans:
            if ch.dim_in != d or ch.dim_out != d:
                raise DimensionError("every path channel must map the same d-dim system to itself")
        phi = np.asarray(self.phi, dtype=complex).reshape(-1)
        if phi.size != len(chans):
            raise DimensionError(f"{phi.size} path amplitudes for {len(chans)} channels")
        if abs(np.sum(np.abs(phi) ** 2) - 1) > AMP_TOL:
            raise ContractError("path amplitudes must be normalized")
        if self.alphas is None:
            alphas = tuple(np.full(len(ch.kraus), 1 / np.sqrt(len(ch.kraus)), dtype=complex) for ch in chans)
        else:
            alphas = tuple(np.asarray(a, dtype=complex).reshape(-1) for a in self.alphas)
            if len(alphas) != len(chans):
                raise DimensionError("one amplitude list per channel is required")
            for a, ch in zip(alphas, chans):
                if a.size != len(ch.kraus):
                    raise DimensionError(f"amplitude list of length {a.size} for {len(ch.kraus)} Kraus operators")
                if abs(np.sum(np.abs(a) ** 2) - 1) > AMP_TOL:
                    raise ContractError("vacuum-extension amplitudes must be normalized on every path")
        object.__setattr__(self, "channels", chans)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self) -> int:
        return len(self.channels)

    @property
    def d(self) -> int:
        return self.channels[0].dim_in


def superposition_kraus(cfg: PathConfig, idx) -> np.ndarray:
    """The Kraus operator labelled by one index per path, shape ``(N d) x d``, order ``[system, path]``."""
    n, d = cfg.n, cfg.d
    out = np.zeros((n * d, d), dtype=complex)
    for j in range(n):
        coef = cfg.phi[j]
        for k in range(n):
            if k != j:
                coef = coef * cfg.alphas[k][idx[k]]
        tag = np.zeros((n, 1), dtype=complex)
        tag[j, 0] = 1
        out += coef * np.kron(cfg.channels[j].kraus[idx[j]], tag)
    return out


def path_superposition(cfg: PathConfig) -> Channel:
    ranges = [range(len(ch.kraus)) for ch in cfg.channels]
    kraus = tuple(superposition_kraus(cfg, idx) for idx in itertools.product(*ranges))
    return require_valid(Channel(cfg.d, cfg.n * cfg.d, kraus))


def witness_indices(cfg: PathConfig) -> list[tuple[int, int]]:
    """``(p_j, q_j)`` per path: largest-amplitude index and first Kraus index independent of it."""
    out = []
    for j, (ch, a) in enumerate(zip(cfg.channels, cfg.alphas)):
        if abs(cfg.phi[j]) <= AMP_TOL:
            raise WitnessUnavailable(f"path {j} has zero amplitude")
        if kraus_rank(ch) < 2:
            raise WitnessUnavailable(f"witness unavailable: channel on path {j} is noiseless")
        p = int(np.argmax(np.abs(a)))
        q = next(i for i, k in enumerate(ch.kraus) if span_rank([ch.kraus[p], k]) == 2)
        out.append((p, q))
    return out


def independence_witness(cfg: PathConfig) -> list[np.ndarray]:
    """The ``N + 1`` Kraus operators ``E_{p1..pN}`` and ``E_{p1..q_j..pN}`` of the superposed channel."""
    pq = witness_indices(cfg)
    base = [p for p, _ in pq]
    ops = [superposition_kraus(cfg, base)]
    for j, (_, q) in enumerate(pq):
        idx = list(base)
        idx[j] = q
        ops.append(superposition_kraus(cfg, idx))
    return ops


def packing_bound_correctable(ch: Channel) -> bool:
    """Necessary condition for exact correctability: ``rank * d_in <= d_out``."""
    return kraus_rank(ch) * ch.dim_in <= ch.dim_out
