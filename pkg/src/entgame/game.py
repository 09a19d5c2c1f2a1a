"""Classical two-strategy games and their quantum protocol.

The referee prepares ``|psi>``, each player applies a local unitary, and a
rank-one projective measurement ``{|e_j><e_j|}`` selects payoff row ``j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ortho import FEASIBILITY_TOL, OperatorAssignment, joint_index, referee_projectors
from .qcore import PureState, StateError, apply_joint

PROB_FLOOR = -1e-12
PROB_SUM_TOL = 1e-10
REPRODUCTION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GameSpec:
    """Payoff table with row ``k`` (joint strategy index) holding one payoff per player."""

    players: int
    payoffs: np.ndarray

    def __post_init__(self):
        table = np.array(self.payoffs, dtype=float)
        if self.players < 1:
            raise ValueError("a game needs at least one player")
        if table.shape != (2**self.players, self.players):
            raise ValueError(
                f"payoff table must be {2**self.players} rows x {self.players} players, "
                f"got shape {table.shape}"
            )
        if not np.all(np.isfinite(table)):
            raise ValueError("payoffs must be finite")
        table.setflags(write=False)
        object.__setattr__(self, "payoffs", table)

    @classmethod
    def from_json(cls, doc: dict) -> "GameSpec":
        rows = doc["payoffs"]
        n = int(doc["players"])
        if len(rows) != 2**n:
            raise ValueError(f"expected {2**n} payoff rows for {n} players, got {len(rows)}")
        return cls(n, np.array(rows, dtype=float))

    def to_json(self) -> dict:
        return {"players": self.players, "payoffs": self.payoffs.tolist()}


@dataclass(frozen=True, eq=False)
class PlayResult:
    distribution: np.ndarray
    expected_payoffs: np.ndarray

    def to_json(self) -> dict:
        return {"distribution": self.distribution.tolist(),
                "expected_payoffs": self.expected_payoffs.tolist()}


def classical_payoff(spec: GameSpec, choices: Sequence[int]) -> np.ndarray:
    if len(choices) != spec.players:
        raise ValueError(f"need {spec.players} choices, got {len(choices)}")
    return spec.payoffs[joint_index(choices).k].copy()


def _clean_distribution(p: np.ndarray) -> np.ndarray:
    if p.min() < PROB_FLOOR:
        raise ValueError(f"negative outcome probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1) > PROB_SUM_TOL:
        raise ValueError(f"outcome probabilities sum to {total!r}; measurement is incomplete")
    return p / total


def play_quantum(state: PureState, chosen_ops: Sequence, projectors: np.ndarray,
                 spec: GameSpec) -> PlayResult:
    """Outcome distribution ``p_j = |<e_j| x |psi>|^2`` and the expected payoffs."""
    n = state.n_qubits
    dim = 2**n
    proj = np.asarray(projectors, dtype=complex)
    if spec.players != n or len(chosen_ops) != n:
        raise StateError("game, state and operator counts disagree")
    if proj.shape != (dim, dim):
        raise StateError(f"need {dim} projector vectors of length {dim}, got {proj.shape}")
    if not np.allclose(proj.conj() @ proj.T, np.eye(dim), rtol=0, atol=1e-9):
        raise ValueError("projector states are not orthonormal")
    final = apply_joint(state, chosen_ops).amplitudes
    amps = proj.conj() @ final
    p = _clean_distribution(amps.real**2 + amps.imag**2)
    return PlayResult(p, p @ spec.payoffs)


def reproduction_check(state: PureState, witness: OperatorAssignment, spec: GameSpec,
                       tol: float = REPRODUCTION_TOL) -> tuple[bool, float]:
    """Play every joint strategy through the witness; return ``(ok, worst |p_k - 1|)``."""
    projectors = referee_projectors(state, witness, FEASIBILITY_TOL)
    worst = 0.0
    ok = True
    for k in range(2**state.n_qubits):
        result = play_quantum(state, witness.operators_for(k), projectors, spec)
        dev = abs(result.distribution[k] - 1.0)
        worst = max(worst, dev)
        scale = max(1.0, float(np.abs(spec.payoffs).max()))
        if dev > tol or np.abs(result.expected_payoffs - spec.payoffs[k]).max() > 2 * tol * scale:
            ok = False
    return ok, worst
