"""Seeded multi-restart derivative-free maximization on unit spheres and simplices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 4000
    step_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class OptimResult:
    x: np.ndarray
    value: float
    trace: list[float] = field(default_factory=list)
    evaluations: int = 0


def unit_vector(x: np.ndarray) -> np.ndarray:
    """Complex unit vector from ``2n`` real parameters; the zero vector maps to ``e_0``."""
    n = x.size // 2
    v = x[:n] + 1j * x[n:]
    norm = np.linalg.norm(v)
    if norm == 0:
        v = np.zeros(n, dtype=complex)
        v[0] = 1
        return v
    return v / norm


def complex_to_params(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.concatenate([v.real, v.imag])


def multistart_maximize(
    objective: Callable[[np.ndarray], float],
    dim: int,
    cfg: OptimizerConfig,
    initial: Sequence[np.ndarray] = (),
) -> OptimResult:
    """Maximize ``objective`` over ``R^dim``.

    Deterministic starts in ``initial`` are refined first, then ``cfg.restarts`` random
    Gaussian starts drawn from ``cfg.seed``. Local refinement is adaptive Nelder-Mead.
    ``trace`` holds the best-so-far value after each start, so it is non-decreasing.
    """
    rng = np.random.default_rng(cfg.seed)
    starts = [np.asarray(x0, dtype=float) for x0 in initial]
    starts += [rng.standard_normal(dim) for _ in range(cfg.restarts)]
    best_x, best_val = starts[0], -np.inf
    trace: list[float] = []
    evals = 0
    for x0 in starts:
        res = minimize(
            lambda x: -objective(x),
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.max_iters,
                "maxfev": 2 * cfg.max_iters,
                # the parameterizations have flat gauge directions (scale, global phase),
                # so convergence is judged on objective values
                "xatol": 1e-4,
                "fatol": cfg.step_tol,
                "adaptive": True,
            },
        )
        evals += int(res.nfev)
        val = -float(res.fun)
        if val > best_val:
            best_x, best_val = np.asarray(res.x), val
        trace.append(best_val)
    return OptimResult(best_x, best_val, trace, evals)
