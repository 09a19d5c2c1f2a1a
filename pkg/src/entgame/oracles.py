"""Closed-form overlap formulas checked against brute-force statevector overlaps.

Each suite returns an :class:`OracleReport`; the brute-force side always
builds the rotated state with :func:`apply_local` and takes a plain inner
product, never the pattern factorisation used by :mod:`entgame.ortho`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .classify import (
    PhaseConstraintSystem,
    contradiction_certificate,
    halfhalf_pair_residual,
    halfhalf_quad_residual,
    halfhalf_relative,
    phase_system_feasible,
)
from .qcore import apply_local, inner_product
from .states import dicke, random_unitary, w_state

CHECKS = ("eq3", "eq7", "eq10", "eq12", "eq13", "phase")


@dataclass
class OracleReport:
    check: str
    samples: int
    max_deviation: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.max_deviation = float(self.max_deviation)

    def to_json(self) -> dict:
        return {"check": self.check, "samples": self.samples,
                "max_deviation": self.max_deviation, "details": self.details}


def brute_overlap(state, players_ops: dict[int, np.ndarray]) -> complex:
    """``<psi| ⊗ M_i |psi>`` with ``M_i`` given for 1-based players, identity elsewhere."""
    out = state
    for player, op in players_ops.items():
        out = apply_local(out, player, op)
    return inner_product(state, out)


def anti_diagonal(phi: float) -> np.ndarray:
    return np.array([[0, np.exp(1j * phi)], [np.exp(-1j * phi), 0]], dtype=complex)


def eq3_suite(draws: int = 1000, seed: int = 0) -> OracleReport:
    """W states: ``((N-1) <0|m|0> + <1|m|1>) / N`` for one differing player."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(3, 8))
        player = int(rng.integers(1, n + 1))
        m = random_unitary(rng)
        formula = ((n - 1) * m[0, 0] + m[1, 1]) / n
        worst = max(worst, abs(formula - brute_overlap(w_state(n), {player: m})))
    return OracleReport("eq3", draws, worst)


def eq10_suite(draws: int = 1000, seed: int = 0) -> OracleReport:
    """Dicke states: ``((N-m) <0|m|0> + m <1|m|1>) / N``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(2, 8))
        k = int(rng.integers(1, n))
        player = int(rng.integers(1, n + 1))
        m = random_unitary(rng)
        formula = ((n - k) * m[0, 0] + k * m[1, 1]) / n
        worst = max(worst, abs(formula - brute_overlap(dicke(n, k), {player: m})))
    return OracleReport("eq10", draws, worst)


def eq7_suite(draws: int = 1000, seed: int = 0) -> OracleReport:
    """W states, two players with anti-diagonal relatives: ``(2/N) cos(phi_1 - phi_2)``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(3, 8))
        i, j = (int(p) for p in rng.choice(np.arange(1, n + 1), 2, replace=False))
        phi_i, phi_j = rng.uniform(-np.pi, np.pi, 2)
        bf = brute_overlap(w_state(n), {i: anti_diagonal(phi_i), j: anti_diagonal(phi_j)})
        worst = max(worst, abs(bf - 2 / n * np.cos(phi_i - phi_j)))
    return OracleReport("eq7", draws, worst)


def _match_constant(bf: np.ndarray, res: np.ndarray) -> float:
    k = int(np.argmax(np.abs(res) > 1e-2))
    if abs(res[k]) <= 1e-2:
        raise RuntimeError("no sample with a usable nonzero residual")
    return float((bf[k] / res[k]).real)


def eq12_suite(n: int = 6, draws: int = 1000, seed: int = 0, zero_tol: float = 1e-9) -> OracleReport:
    """Half-filled Dicke pair condition vs brute-force two-player overlaps.

    Half of the draws are placed exactly on the zero set by solving for the
    second angle, so zero-set agreement is exercised and not only generic points.
    """
    rng = np.random.default_rng(seed)
    state = dicke(n, n // 2)
    rows = []
    for s in range(draws):
        i, j = (int(p) for p in rng.choice(np.arange(1, n + 1), 2, replace=False))
        ti, pi_, pj = rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi)
        if s % 2:
            tj = np.arctan2(np.cos(ti), n / 2 * np.cos(pi_ - pj) * np.sin(ti))
        else:
            tj = rng.uniform(0, np.pi)
        bf = brute_overlap(state, {i: halfhalf_relative(ti, pi_), j: halfhalf_relative(tj, pj)})
        rows.append((bf, halfhalf_pair_residual(ti, pi_, tj, pj, n)))
    bf, res = (np.array(c) for c in zip(*rows))
    const = _match_constant(bf, res)
    dev = np.abs(bf - const * res)
    zero_res = np.abs(res) <= zero_tol
    zero_bf = np.abs(bf) <= zero_tol
    return OracleReport("eq12", draws, float(dev.max()), {
        "n": n, "constant": const, "zero_points": int(zero_res.sum()),
        "zero_set_mismatches": int((zero_res != zero_bf).sum()),
        "max_imag": float(np.abs(bf.imag).max()),
    })


def _quad_overlap(state, thetas, phis) -> complex:
    return brute_overlap(state, {p + 1: halfhalf_relative(thetas[p], phis[p]) for p in range(4)})


def eq13_grid(n: int = 6, pair_tol: float = 1e-9):
    """Points of a 5^8 grid on four players that satisfy every pairwise condition."""
    t0 = np.arctan(1 / np.sqrt(n / 2))
    theta_vals = np.array([0.0, t0, np.pi / 2, np.pi - t0, np.pi])
    phi_vals = np.array([0.0, np.pi / 4, np.pi / 2, np.pi, 3 * np.pi / 2])
    grid = np.stack(np.meshgrid(*([theta_vals] * 4 + [phi_vals] * 4), indexing="ij"), -1)
    grid = grid.reshape(-1, 8)
    th, ph = grid[:, :4].T, grid[:, 4:].T
    ok = np.ones(len(grid), dtype=bool)
    for a, b in combinations(range(4), 2):
        ok &= np.abs(halfhalf_pair_residual(th[a], ph[a], th[b], ph[b], n)) <= pair_tol
    return grid[ok], len(grid)


def eq13_suite(n: int = 6, draws: int = 200, seed: int = 0, zero_tol: float = 1e-9) -> OracleReport:
    """Four-player condition vs brute force, on points where every pair condition holds.

    Points come from the 5^8 angle grid plus seeded draws of the family
    ``cot(theta_i) = +-sqrt(N/2)`` with phases ``phi_0 + {0, pi}``.
    """
    state = dicke(n, n // 2)
    grid_pts, grid_size = eq13_grid(n)
    rng = np.random.default_rng(seed)
    t0 = np.arctan(1 / np.sqrt(n / 2))
    extra = []
    for _ in range(draws):
        signs = rng.choice([0, 1], 4)
        flips = rng.choice([0, 1], 4)
        thetas = np.where(signs == 0, t0, np.pi - t0) + np.pi * flips
        phis = rng.uniform(-np.pi, np.pi) + np.pi * signs
        extra.append(np.concatenate([thetas, phis]))
    pts = np.vstack([grid_pts] + ([np.array(extra)] if extra else []))
    bf = np.array([_quad_overlap(state, p[:4], p[4:]) for p in pts])
    res = np.array([halfhalf_quad_residual(p[:4], p[4:], n) for p in pts])
    const = _match_constant(bf, res)
    dev = np.abs(bf - const * res)
    zero_res = np.abs(res) <= zero_tol
    zero_bf = np.abs(bf) <= zero_tol
    return OracleReport("eq13", len(pts), float(dev.max()), {
        "n": n, "constant": const, "grid_size": grid_size, "grid_points_on_pair_surface": len(grid_pts),
        "zero_points": int(zero_res.sum()), "zero_set_mismatches": int((zero_res != zero_bf).sum()),
    })


def phase_suite(n: int = 3) -> OracleReport:
    ok, cycle = phase_system_feasible(PhaseConstraintSystem.complete(n))
    details = {"n": n, "feasible": ok}
    if not ok:
        details["certificate"] = contradiction_certificate(cycle)
    return OracleReport("phase", 1, 0.0, details)


def halfhalf_corroboration(n: int = 6, draws: int = 10_000, seed: int = 0,
                           pair_tol: float = 1e-10, iterations: int = 30) -> dict:
    """Project random angles onto all pairwise conditions, then inspect the quad ones.

    Batched Gauss-Newton (pseudo-inverse steps) on the ``C(N, 2)`` pairwise
    residuals.  Returns how many draws landed on the pair surface and the
    smallest worst-quad residual among them.
    """
    rng = np.random.default_rng(seed)
    th = rng.uniform(0, np.pi, (draws, n))
    ph = rng.uniform(-np.pi, np.pi, (draws, n))
    pairs = list(combinations(range(n), 2))
    ii = np.array([p[0] for p in pairs])
    jj = np.array([p[1] for p in pairs])
    half = n / 2
    rows = np.arange(len(pairs))

    def pair_res(th, ph):
        return halfhalf_pair_residual(th[:, ii], ph[:, ii], th[:, jj], ph[:, jj], n)

    for _ in range(iterations):
        ci, si, cj, sj = np.cos(th[:, ii]), np.sin(th[:, ii]), np.cos(th[:, jj]), np.sin(th[:, jj])
        d = ph[:, ii] - ph[:, jj]
        cd, sd = np.cos(d), np.sin(d)
        jac = np.zeros((draws, len(pairs), 2 * n))
        jac[:, rows, ii] = -si * cj - half * cd * ci * sj
        jac[:, rows, jj] = -ci * sj - half * cd * si * cj
        jac[:, rows, n + ii] = half * sd * si * sj
        jac[:, rows, n + jj] = -half * sd * si * sj
        r = pair_res(th, ph)
        step = np.einsum("bij,bj->bi", np.linalg.pinv(jac, rcond=1e-12), r)
        th = th - step[:, :n]
        ph = ph - step[:, n:]
    on_surface = np.abs(pair_res(th, ph)).max(axis=1) <= pair_tol
    quads = list(combinations(range(n), 4))
    quad_vals = np.stack([np.abs(halfhalf_quad_residual(th[:, q].T, ph[:, q].T, n)) for q in quads], 1)
    worst_quad = quad_vals.max(axis=1)[on_surface]
    return {
        "n": n, "draws": draws, "on_pair_surface": int(on_surface.sum()),
        "min_worst_quad": float(worst_quad.min()) if worst_quad.size else None,
        "violations_below_1e-3": int((worst_quad <= 1e-3).sum()),
    }


def run_check(name: str, **params) -> OracleReport:
    suites = {"eq3": eq3_suite, "eq7": eq7_suite, "eq10": eq10_suite,
              "eq12": eq12_suite, "eq13": eq13_suite, "phase": phase_suite}
    if name not in suites:
        raise ValueError(f"unknown oracle check {name!r}; choose from {', '.join(CHECKS)}")
    return suites[name](**params)
