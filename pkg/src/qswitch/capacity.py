"""Entropic quantities and capacity bounds, all in bits."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channels import (
    Channel,
    PauliVector,
    is_entanglement_breaking,
    kraus_rank,
)
from .linalg import (
    KET_PLUS,
    ContractError,
    ket,
    DimensionError,
    dag,
    entropy_of_spectrum,
    partial_trace,
    partial_transpose,
    von_neumann_entropy,
)
from .optimize import OptimizerConfig, complex_to_params, multistart_maximize, unit_vector
from .switch import control_state, pauli_switch_decomposition, pauli_switch_weights

MAX_IC_DIM = 64


class Direction(enum.Enum):
    EXACT = "Exact"
    LOWER = "LowerBound"
    UPPER = "UpperBound"
    HEURISTIC_LOWER = "HeuristicLower"


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    direction: Direction
    method: str
    meta: dict = field(default_factory=dict)


def _entropy_psd(m: np.ndarray) -> float:
    return entropy_of_spectrum(np.linalg.eigvalsh((m + dag(m)) / 2))


def _entropy_sv(m: np.ndarray) -> float:
    """Entropy of ``m m^dag`` (whose nonzero spectrum equals that of ``m^dag m``)."""
    gram = m @ np.conj(m.T) if m.shape[0] <= m.shape[1] else np.conj(m.T) @ m
    return entropy_of_spectrum(np.linalg.eigvalsh(gram))


def coherent_information_of_state(sigma, dims) -> float:
    """``S(B) - S(AB)`` where ``A`` is the first factor of ``dims`` and ``B`` is the rest."""
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise DimensionError("coherent information needs a bipartite state")
    sigma = np.asarray(sigma, dtype=complex)
    sigma_b = partial_trace(sigma, dims, keep=range(1, len(dims)))
    return von_neumann_entropy(sigma_b) - von_neumann_entropy(sigma)


def _input_factor(x: np.ndarray, d: int) -> np.ndarray:
    """Factor ``G`` with input state ``rho = G G^dag`` from purification parameters.

    The purification on ``R (x) A`` has coefficient matrix ``M[r, a]``; its ``A`` marginal
    is ``M^T conj(M)``, so ``G = M^T``.
    """
    return unit_vector(x).reshape(d, d).T


def _state_from_params(x: np.ndarray, d: int) -> np.ndarray:
    g = _input_factor(x, d)
    return g @ dag(g)


def _coherent_information_factor(stack: np.ndarray, g: np.ndarray) -> float:
    # t[k, b, s] = (K_k G)[b, s]; output and environment marginals share its singular values
    t = stack @ g
    r, dout, d = t.shape
    s_out = _entropy_sv(t.transpose(1, 0, 2).reshape(dout, r * d))
    s_env = _entropy_sv(t.reshape(r, dout * d))
    return s_out - s_env


def coherent_information_of_input(ch: Channel, rho) -> float:
    """``S(E(rho)) - S(E^c(rho))``; equals the coherent information of ``(id (x) E)(Psi)``."""
    rho = np.asarray(rho, dtype=complex)
    w, v = np.linalg.eigh((rho + dag(rho)) / 2)
    g = v * np.sqrt(np.clip(w, 0, None))
    return _coherent_information_factor(ch.stack, g)


def purification(rho) -> np.ndarray:
    """Vector on ``R (x) A`` whose ``A`` marginal is ``rho``."""
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0, None)
    return sum(np.sqrt(w[i]) * np.kron(np.conj(v[:, i]), v[:, i]) for i in range(len(w)))


def one_shot_coherent_info(ch: Channel, cfg: OptimizerConfig = OptimizerConfig()) -> CapacityEstimate:
    """Heuristic maximum of the coherent information over pure inputs on reference (x) input.

    The maximally entangled input is refined first, then random starts. The value is
    clamped below at 0 (pure product inputs reach 0); the unclamped maximum is kept
    in ``meta["unclamped"]``.
    """
    d = ch.dim_in
    if d * d > MAX_IC_DIM:
        raise DimensionError(f"input dimension {d} too large for the coherent-information search")

    stack = ch.stack

    def objective(x):
        return _coherent_information_factor(stack, _input_factor(x, d))

    mes = complex_to_params(np.eye(d).reshape(-1) / np.sqrt(d))
    res = multistart_maximize(objective, 2 * d * d, cfg, initial=[mes])
    rho = _state_from_params(res.x, d)
    return CapacityEstimate(
        max(res.value, 0.0),
        Direction.HEURISTIC_LOWER,
        "multistart Nelder-Mead over purified inputs",
        {
            "unclamped": res.value,
            "restarts": cfg.restarts,
            "seed": cfg.seed,
            "trace": res.trace,
            "evaluations": res.evaluations,
            "best_input": rho,
        },
    )


def binary_entropy(q: float) -> float:
    return entropy_of_spectrum([q, 1 - q])


def hashing_bound(q: float) -> float:
    """``1 - h(q)``."""
    q = float(q)
    if not -1e-12 <= q <= 1 + 1e-12:
        raise ContractError(f"probability {q} outside [0, 1]")
    return 1.0 - binary_entropy(min(max(q, 0.0), 1.0))


def pauli_hashing_bound(p) -> float:
    """``max(0, 1 - H(p))`` for a Pauli channel; reduces to :func:`hashing_bound` for two errors."""
    p = PauliVector(p)
    return max(0.0, 1.0 - entropy_of_spectrum([float(v) for v in p]))


def _log2(x) -> float:
    return math.log2(float(x))


def switched_pauli_coherent_info_formula(p) -> float:
    """Closed-form coherent information of ``S_+(E_p, E_p)`` at the maximally entangled input (signed)."""
    p = PauliVector(p)
    p0, p1, p2, p3 = (float(v) for v in p)
    q_plus, q_minus = (float(v) for v in pauli_switch_weights(p))
    total = 1.0
    n2 = float(p.norm2)
    terms_plus = [n2] + [2 * p0 * pi for pi in (p1, p2, p3)]
    terms_minus = [2 * p1 * p2, 2 * p2 * p3, 2 * p1 * p3]
    for t in terms_plus:
        if t > 0:
            total += t * _log2(t / q_plus)
    for t in terms_minus:
        if t > 0:
            total += t * _log2(t / q_minus)
    return total + 0.0


def switched_pauli_coherent_info(p) -> CapacityEstimate:
    """One-shot coherent information of the switched Pauli channel with control ``|+>``.

    The maximally entangled input is optimal whenever the coherent information is
    positive, so the result is ``max(formula, 0)``.
    """
    raw = switched_pauli_coherent_info_formula(p)
    return CapacityEstimate(
        max(raw, 0.0),
        Direction.EXACT,
        "closed form at the maximally entangled input, clamped at 0",
        {"unclamped": raw, "omega": "+"},
    )


def _subchannel_capacity_lower(p_sub: PauliVector) -> tuple[object, str]:
    from .channels import pauli_channel

    ch = pauli_channel(p_sub)
    if kraus_rank(ch) == 1:
        return 1, "unitary"
    if is_entanglement_breaking(ch).is_eb:
        return 0, "entanglement-breaking"
    return pauli_hashing_bound(p_sub), "hashing"


def two_way_assisted_lower_bound(p, omega=KET_PLUS) -> CapacityEstimate:
    """``sum_i q_i Q_lower(C_i)`` for the switched Pauli channel.

    Each subchannel contributes 1 if unitary, 0 if entanglement-breaking and its hashing
    bound otherwise. With rational ``p`` and only unitary / EB branches the result is
    also returned exactly in ``meta["rational"]``.
    """
    omega = control_state(omega)
    if np.max(np.abs(omega - np.outer(KET_PLUS, KET_PLUS))) > 1e-10:
        raise ContractError("the two-way bound is defined here for the |+> control only")
    dec = pauli_switch_decomposition(p, omega)
    total = 0
    parts = {}
    exact = True
    for label, q, p_sub in (("plus", dec.q_plus, dec.p_plus), ("minus", dec.q_minus, dec.p_minus)):
        if p_sub is None:
            parts[label] = {"q": float(q), "capacity": None, "kind": "absent"}
            continue
        cap, kind = _subchannel_capacity_lower(p_sub)
        if kind == "hashing":
            exact = False
        parts[label] = {"q": float(q), "capacity": float(cap), "kind": kind}
        total = total + q * cap
    meta = {
        "branches": parts,
        "note": "teleportation over each heralded branch; reported as a lower bound",
    }
    if exact and all(isinstance(v, Fraction) for v in PauliVector(p)):
        meta["rational"] = Fraction(total)
    return CapacityEstimate(float(total), Direction.LOWER, "sum of branch weights times branch capacity bounds", meta)


def _ensemble_from_params(x: np.ndarray, d: int, n: int):
    states = [unit_vector(x[2 * d * i:2 * d * (i + 1)]) for i in range(n)]
    logits = x[2 * d * n:]
    w = np.exp(logits - np.max(logits))
    return w / np.sum(w), states


def holevo_of_ensemble(ch: Channel, weights, states) -> float:
    """``S(sum_x p_x E(psi_x)) - sum_x p_x S(E(psi_x))`` for pure ``psi_x``."""
    w = np.asarray(weights, dtype=float)
    cols = np.column_stack([ket(s) for s in states])
    # v[k, b, x] = (K_k psi_x)[b]
    v = ch.stack @ cols
    # the environment marginals of each pure output share its spectrum and are r x r
    env = np.einsum("kbx,lbx->xkl", v, np.conj(v))
    ev = np.linalg.eigvalsh(env)
    ev = np.where(ev > 0, ev, 1.0)
    per_state = -np.sum(ev * np.log2(ev), axis=1)
    avg = (v * np.sqrt(w)).transpose(1, 0, 2).reshape(ch.dim_out, -1)
    return _entropy_sv(avg) - float(np.dot(w, per_state))


def ensemble_from_state(rho) -> tuple[np.ndarray, list[np.ndarray]]:
    """Eigen-ensemble of ``rho``: its Holevo quantity is at least ``rho``'s coherent information."""
    w, v = np.linalg.eigh((rho + dag(rho)) / 2)
    return np.clip(w, 0, None), [v[:, i] for i in range(v.shape[1])]


def _ensemble_params(weights, states, n: int) -> np.ndarray:
    states = [ket(states[i % len(states)]) for i in range(n)]
    counts = np.bincount(np.arange(n) % len(weights), minlength=len(weights))
    w = np.array([weights[i % len(weights)] / counts[i % len(weights)] for i in range(n)], dtype=float)
    logits = np.log(np.clip(w, 1e-12, None))
    return np.concatenate([complex_to_params(s) for s in states] + [logits])


HOLEVO_CONFIG = OptimizerConfig(restarts=8)


def holevo_quantity(ch: Channel, cfg: OptimizerConfig = HOLEVO_CONFIG, warm_states=()) -> CapacityEstimate:
    """Heuristic maximum of the Holevo quantity over ensembles of ``d^2`` pure inputs.

    The uniform ensemble of computational basis states (repeated to ``d^2`` members) and
    the eigen-ensembles of any ``warm_states`` are refined first, then random starts.
    Passing the input found by :func:`one_shot_coherent_info` as a warm state guarantees
    the returned value is at least that coherent information.
    """
    d = ch.dim_in
    if d > 4:
        raise DimensionError("Holevo search is limited to input dimension <= 4")
    n = d * d

    def objective(x):
        w, s = _ensemble_from_params(x, d, n)
        return holevo_of_ensemble(ch, w, s)

    basis = np.eye(d, dtype=complex)
    initial = [_ensemble_params(np.full(d, 1 / d), list(basis), n)]
    initial += [_ensemble_params(*ensemble_from_state(np.asarray(r, dtype=complex)), n) for r in warm_states]
    res = multistart_maximize(objective, (2 * d + 1) * n, cfg, initial=initial)
    return CapacityEstimate(
        max(res.value, 0.0),
        Direction.HEURISTIC_LOWER,
        "multistart Nelder-Mead over pure-state ensembles",
        {"unclamped": res.value, "restarts": cfg.restarts, "seed": cfg.seed, "trace": res.trace, "ensemble_size": n},
    )


def transposed_output_norm(ch: Channel, psi) -> float:
    """``|| (id (x) T o C)(|psi><psi|) ||_1`` for ``psi`` on reference (x) input."""
    d = ch.dim_in
    m = np.asarray(psi, dtype=complex).reshape(d, d)
    # (I (x) K)|psi> reshaped is M K^T; stacking over k gives the purified output on [R, B]
    vecs = (m @ ch.stack.transpose(0, 2, 1)).reshape(len(ch.kraus), -1)
    sigma = vecs.T @ np.conj(vecs)
    pt = partial_transpose(sigma, [d, ch.dim_out], on=1)
    return float(np.sum(np.abs(np.linalg.eigvalsh((pt + dag(pt)) / 2))))


def transpose_bound(ch: Channel, cfg: OptimizerConfig = OptimizerConfig()) -> CapacityEstimate:
    """``log2 || T o C ||_diamond`` estimated by maximizing over pure reference-input states."""
    d = ch.dim_in
    if d > 4:
        raise DimensionError("transpose bound search is limited to input dimension <= 4")

    def objective(x):
        return transposed_output_norm(ch, unit_vector(x))

    mes = complex_to_params(np.eye(d).reshape(-1) / np.sqrt(d))
    res = multistart_maximize(objective, 2 * d * d, cfg, initial=[mes])
    return CapacityEstimate(
        math.log2(res.value),
        Direction.UPPER,
        "heuristic estimate of an upper bound (Holevo-Werner transpose bound)",
        {"diamond_norm_estimate": res.value, "restarts": cfg.restarts, "seed": cfg.seed, "trace": res.trace},
    )
