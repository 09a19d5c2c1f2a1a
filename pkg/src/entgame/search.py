"""Multistart derivative-free search for witness operator sets.

Only the relative operators ``m_i = u_i^† v_i`` enter the overlaps, so the
search runs over ``3N`` angles with ``u_i = I``.  Each start is a Nelder-Mead
descent on the residual, followed by a least-squares polish on the weighted
pattern expectations once the residual is already small.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import least_squares, minimize

from .ortho import FEASIBILITY_TOL, GRAM_MAX_QUBITS, OperatorAssignment, PatternEvaluator
from .qcore import PureState

POLISH_BELOW = 1e-3


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    starts: int = 50
    max_iterations: int = 3000
    tol: float = FEASIBILITY_TOL
    seed: int = 0


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_residual: float
    relative: tuple[np.ndarray, ...]
    starts_completed: int
    converged: bool
    best_start: int
    start_residuals: tuple[float, ...]
    traces: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    def to_json(self) -> dict:
        from .io import encode_matrix

        return {
            "best_residual": self.best_residual,
            "converged": self.converged,
            "starts_completed": self.starts_completed,
            "best_start": self.best_start,
            "start_residuals": list(self.start_residuals),
            "relative_operators": [encode_matrix(m) for m in self.relative],
        }


def su2_from_angles(theta, mu, nu) -> np.ndarray:
    """``[[cos t e^{i mu}, sin t e^{i nu}], [-sin t e^{-i nu}, cos t e^{-i mu}]]``.

    Array arguments give a stack of matrices on a leading axis.
    """
    theta, mu, nu = np.broadcast_arrays(theta, mu, nu)
    a = np.cos(theta) * np.exp(1j * mu)
    b = np.sin(theta) * np.exp(1j * nu)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = -b.conj()
    out[..., 1, 1] = a.conj()
    return out


def relatives_from_angles(x: np.ndarray) -> np.ndarray:
    """Stack of ``N`` matrices from ``3N`` angles ``(theta, mu, nu)`` per player."""
    t = np.asarray(x, dtype=float).reshape(-1, 3)
    a = np.cos(t[:, 0]) * np.exp(1j * t[:, 1])
    b = np.sin(t[:, 0]) * np.exp(1j * t[:, 2])
    out = np.empty((t.shape[0], 2, 2), dtype=complex)
    out[:, 0, 0] = a
    out[:, 0, 1] = b
    out[:, 1, 0] = -b.conj()
    out[:, 1, 1] = a.conj()
    return out


def start_rng(seed: int, start: int) -> np.random.Generator:
    """Independent generator per start; does not depend on how many starts run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(start,)))


def initial_angles(n: int, rng: np.random.Generator) -> np.ndarray:
    x = np.empty(3 * n)
    x[0::3] = rng.uniform(0.0, np.pi, n)
    x[1::3] = rng.uniform(-np.pi, np.pi, n)
    x[2::3] = rng.uniform(-np.pi, np.pi, n)
    return x


class _Objective:
    def __init__(self, state: PureState):
        self.ev = PatternEvaluator(state)
        self.sqrt_w = np.sqrt(self.ev.weights / 2.0)

    def __call__(self, x) -> float:
        return self.ev.residual(relatives_from_angles(x))

    def vector(self, x) -> np.ndarray:
        e = self.ev.expectations(relatives_from_angles(x)) * self.sqrt_w
        return np.concatenate([e.real, e.imag])


def _run_start(obj: _Objective, x0: np.ndarray, config: SearchConfig):
    trace = []

    def record(intermediate_result):
        trace.append(float(intermediate_result.fun))

    res = minimize(obj, x0, method="Nelder-Mead", callback=record,
                   options={"maxiter": config.max_iterations, "xatol": 1e-8,
                            "fatol": 1e-13, "adaptive": True})
    x, j = res.x, float(obj(res.x))
    if not trace or j < trace[-1]:
        trace.append(j)
    if 0 < j < POLISH_BELOW:
        pol = least_squares(obj.vector, x, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        jp = float(obj(pol.x))
        if jp < j:
            x, j = pol.x, jp
            trace.append(j)
    return x, j, tuple(trace)


def optimize(state: PureState, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Run starts in index order, stopping at the first one that reaches ``tol``."""
    n = state.n_qubits
    if not 2 <= n <= GRAM_MAX_QUBITS:
        raise SearchError(f"search supports 2..{GRAM_MAX_QUBITS} qubits, got {n}")
    if config.starts < 1:
        raise SearchError("need at least one start")
    obj = _Objective(state)
    best = (np.inf, None, -1)
    residuals, traces = [], []
    for s in range(config.starts):
        x, j, trace = _run_start(obj, initial_angles(n, start_rng(config.seed, s)), config)
        residuals.append(j)
        traces.append(trace)
        if j < best[0]:
            best = (j, x, s)
        if j <= config.tol:
            break
    j, x, s = best
    rel = tuple(relatives_from_angles(x))
    return SearchResult(j, rel, len(residuals), j <= config.tol, s,
                        tuple(residuals), tuple(traces))


def extract_witness(result: SearchResult, state: PureState | None = None) -> OperatorAssignment:
    """``u_i = I``, ``v_i = m_i``; re-verified against ``state`` when given."""
    if not result.converged:
        raise SearchError(f"search did not converge (best residual {result.best_residual:.3g})")
    witness = OperatorAssignment.from_relative(result.relative)
    if state is not None:
        from .ortho import gram_matrix, is_distinguishable

        if not is_distinguishable(gram_matrix(state, witness), FEASIBILITY_TOL):
            raise SearchError("recovered witness fails the overlap check")
    return witness


def residual_profile(make_state: Callable[[int], PureState], sizes: Iterable[int],
                     config: SearchConfig = SearchConfig()) -> list[tuple[int, float, bool]]:
    rows = []
    for n in sizes:
        res = optimize(make_state(n), config)
        rows.append((n, res.best_residual, res.converged))
    return rows
