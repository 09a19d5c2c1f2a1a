"""Analytic verdicts on whether a state admits an orthogonal output basis.

Infeasibility is only ever reported from an exact argument: the odd-cycle
parity test on pairwise phase constraints, or the half-filled Dicke theorem
for ``N >= 6``.  Feasible verdicts always carry a witness that has been
re-checked through :func:`entgame.ortho.gram_matrix`.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, cos, sin

import numpy as np

from .ortho import (
    FEASIBILITY_TOL,
    OperatorAssignment,
    assignment_residual,
    gram_matrix,
    max_offdiagonal,
)
from .qcore import I2, I_SIGMA_Y, SIGMA_X, SIGMA_Y, SIGMA_Z, PureState, schmidt_decompose
from .states import (
    GHZ,
    W,
    Custom,
    Dicke,
    TwoQubit,
    ghz_phase,
    phase_rotation,
    transport_witness,
)

PRODUCT_TOL = 1e-12


class ProductStateError(ValueError):
    """The model excludes product states from the referee's preparation."""


class Status(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True, eq=False)
class Verdict:
    status: Status
    reason: str
    witness: OperatorAssignment | None = None
    residual: float | None = None
    certificate: dict | None = None

    def to_json(self) -> dict:
        from .io import witness_to_json

        return {
            "status": self.status.value,
            "reason": self.reason,
            "witness": None if self.witness is None else witness_to_json(self.witness),
            "residual": self.residual,
            "certificate": self.certificate,
        }


# -- phase constraint parity --------------------------------------------------

@dataclass(frozen=True)
class PhaseConstraintSystem:
    """Each edge ``(i, j)`` asserts ``phi_i - phi_j = pi/2 (mod pi)``.

    In units of ``pi/2`` that is "the difference is odd", so feasibility is
    2-colourability of the edge graph.
    """

    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    @classmethod
    def complete(cls, n: int) -> "PhaseConstraintSystem":
        return cls(n, frozenset(combinations(range(n), 2)))


def phase_system_feasible(sys: PhaseConstraintSystem) -> tuple[bool, list[int] | None]:
    """Return ``(True, None)`` or ``(False, odd_cycle)`` (vertices in cycle order)."""
    adj: dict[int, list[int]] = {v: [] for v in range(sys.n)}
    for i, j in sorted(sys.edges):
        if i == j:
            return False, [i]
        adj[i].append(j)
        adj[j].append(i)
    color: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    for root in range(sys.n):
        if root in color:
            continue
        color[root] = 0
        parent[root] = None
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in color:
                    color[w] = 1 - color[v]
                    parent[w] = v
                    queue.append(w)
                elif color[w] == color[v]:
                    return False, _odd_cycle(parent, v, w)
    return True, None


def _odd_cycle(parent, v, w) -> list[int]:
    def path(x):
        out = [x]
        while parent[x] is not None:
            x = parent[x]
            out.append(x)
        return out

    pv, pw = path(v), path(w)
    ancestors = set(pv)
    meet = next(x for x in pw if x in ancestors)
    # v .. meet, then down to w; the conflicting edge (w, v) closes it
    left = pv[: pv.index(meet) + 1]
    right = pw[: pw.index(meet)]
    return left + right[::-1]


def contradiction_certificate(cycle: list[int]) -> dict:
    """Summed constraints around an odd cycle (players reported 1-based)."""
    players = [c + 1 for c in cycle]
    length = len(players)
    terms = [f"(phi_{a} - phi_{b})" for a, b in zip(players, players[1:] + players[:1])]
    return {
        "kind": "odd-cycle",
        "cycle": players,
        "length": length,
        "constraint": "phi_i - phi_j = pi/2 + n_ij*pi",
        "sum": " + ".join(terms) + f" = 0 = {length}*pi/2 + (sum of n)*pi",
        "parity": f"{length} odd multiples of pi/2 cannot sum to an integer multiple of pi",
    }


# -- single-player and half-filled Dicke conditions ---------------------------

@dataclass(frozen=True)
class SingleConstraint:
    """Orthogonality of outputs differing in one player, as a condition on ``x``.

    With the relative operator written ``[[x, y], [y*, -x*]]`` the overlap is
    ``((N-m) x - m x*) / N``; over ``(Re x, Im x)`` this is ``matrix @ (a, b) = 0``.
    """

    n: int
    m: int
    kind: str  # "anti-diagonal" or "trace-free"
    matrix: np.ndarray
    null_dim: int


def single_player_constraint(n: int, m: int) -> SingleConstraint:
    if not 1 <= m <= n - 1:
        raise ValueError(f"need 1 <= m <= N-1, got N={n}, m={m}")
    mat = np.array([[n - 2 * m, 0.0], [0.0, float(n)]])
    null_dim = 2 - int(np.linalg.matrix_rank(mat))
    kind = "anti-diagonal" if null_dim == 0 else "trace-free"
    return SingleConstraint(n, m, kind, mat, null_dim)


def halfhalf_relative(theta: float, phi: float) -> np.ndarray:
    """``[[cos t, e^{i phi} sin t], [e^{-i phi} sin t, -cos t]]``."""
    return np.array([[cos(theta), np.exp(1j * phi) * sin(theta)],
                     [np.exp(-1j * phi) * sin(theta), -cos(theta)]], dtype=complex)


def _check_even(n: int, minimum: int):
    if n % 2 or n < minimum:
        raise ValueError(f"N must be even and >= {minimum}, got {n}")


def halfhalf_pair_residual(theta_i, phi_i, theta_j, phi_j, n: int):
    """``cos t_i cos t_j - (N/2) cos(phi_i - phi_j) sin t_i sin t_j``; accepts arrays."""
    _check_even(n, 2)
    return (np.cos(theta_i) * np.cos(theta_j)
            - (n / 2) * np.cos(phi_i - phi_j) * np.sin(theta_i) * np.sin(theta_j))


def halfhalf_quad_residual(thetas, phis, n: int):
    """Four-player condition; ``thetas``/``phis`` index players i, j, k, l on axis 0."""
    _check_even(n, 4)
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if thetas.shape[0] != 4 or phis.shape[0] != 4:
        raise ValueError("need angles for exactly four distinct players")
    ti, tj, tk, tl = thetas
    pi_, pj, pk, pl = phis
    betas = (pi_ + pj - pk - pl, pi_ - pj + pk - pl, pi_ - pj - pk + pl)
    c = np.cos(ti) * np.cos(tj) * np.cos(tk) * np.cos(tl)
    s = np.sin(ti) * np.sin(tj) * np.sin(tk) * np.sin(tl)
    return 24.0 / (n * (n - 2)) * c - sum(np.cos(b) for b in betas) * s


def bound_check(n: int) -> tuple[float, float, bool]:
    """``(6N/(N-2), 3, 6N/(N-2) > 3)``."""
    _check_even(n, 6)
    lhs = 6 * n / (n - 2)
    return lhs, 3.0, lhs > 3.0


# -- witnesses ----------------------------------------------------------------

def ghz_witness(n: int, phase: float | None = None) -> OperatorAssignment:
    """``{I, i sigma_y}`` per player, transported to the requested GHZ phase."""
    base = OperatorAssignment.uniform(n, I2, I_SIGMA_Y)
    if phase is None:
        return base
    rot = [phase_rotation(phase - ghz_phase(n))] + [I2] * (n - 1)
    return transport_witness(base, rot)


def halfhalf4_witness() -> OperatorAssignment:
    """u_i = I; v_1 = v_2 = v_3 = (sqrt2 sigma_z + sigma_x)/sqrt3, v_4 = sigma_y."""
    tilt = (np.sqrt(2) * SIGMA_Z + SIGMA_X) / np.sqrt(3)
    return OperatorAssignment(((I2, tilt), (I2, tilt), (I2, tilt), (I2, SIGMA_Y)))


def two_qubit_witness(state: PureState) -> OperatorAssignment:
    """Schmidt form witness ``{I, sigma_x} ⊗ {I, i sigma_y}`` moved back onto ``state``."""
    form = schmidt_decompose(state)
    if form.beta <= PRODUCT_TOL:
        raise ProductStateError("two-qubit state is a product state")
    base = OperatorAssignment(((I2, SIGMA_X), (I2, I_SIGMA_Y)))
    w1, w2 = form.local_rotations
    return transport_witness(base, [w1.conj().T, w2.conj().T])


def is_product(state: PureState, tol: float = PRODUCT_TOL) -> bool:
    """A pure state is a full product iff every one-qubit marginal is pure."""
    psi = state.tensor()
    n = state.n_qubits
    for axis in range(n):
        mat = np.moveaxis(psi, axis, 0).reshape(2, -1)
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[1] > tol:
            return False
    return True


def _checked(state: PureState, witness: OperatorAssignment, reason: str, **cert) -> Verdict:
    g = gram_matrix(state, witness)
    worst = max_offdiagonal(g)
    if worst > FEASIBILITY_TOL:
        raise AssertionError(f"witness for {reason} fails verification (max overlap {worst:.3g})")
    cert = {"kind": "witness", "max_offdiagonal": worst, **cert}
    return Verdict(Status.FEASIBLE, reason, witness, assignment_residual(state, witness), cert)


def classify_state(family, search_config=None) -> Verdict:
    """Decide whether ``family`` can reproduce a classical two-strategy game.

    ``Custom`` states get no analytic verdict; with ``search_config`` they are
    handed to :func:`entgame.search.optimize`, which can find a witness but
    never proves infeasibility.
    """
    if isinstance(family, W):
        family = Dicke(family.n, 1) if family.n >= 3 else family.build()

    if isinstance(family, GHZ):
        state = family.build()
        return _checked(state, ghz_witness(family.n, family.phase), "ghz-witness",
                        phase=family.resolved_phase)

    if isinstance(family, TwoQubit):
        return _checked(family.state, two_qubit_witness(family.state), "two-qubit-schmidt")

    if isinstance(family, Dicke):
        n, m = family.n, family.m
        if m in (0, n):
            raise ProductStateError(f"Dicke({n},{m}) is a product state")
        state = family.build()
        if 2 * m == n:
            if n == 2:
                return _checked(state, two_qubit_witness(state), "two-qubit-schmidt")
            if n == 4:
                return _checked(state, halfhalf4_witness(), "halfhalf-4-witness")
            lhs, rhs, _ = bound_check(n)
            return Verdict(Status.INFEASIBLE, "theorem-halfhalf", certificate={
                "kind": "theorem-halfhalf",
                "n": n,
                "single_player": "trace-free",
                "bound": {"lhs": lhs, "max_rhs": rhs},
            })
        single = single_player_constraint(n, m)
        ok, cycle = phase_system_feasible(PhaseConstraintSystem.complete(n))
        assert single.kind == "anti-diagonal" and not ok
        cert = contradiction_certificate(cycle)
        cert["single_player"] = single.kind
        # pair overlap of anti-diagonal relatives: 2 C(N-2, m-1)/C(N, m) * cos(phi_i - phi_j)
        cert["pair_coefficient"] = 2 * comb(n - 2, m - 1) / comb(n, m)
        return Verdict(Status.INFEASIBLE, "phase-contradiction", certificate=cert)

    if isinstance(family, Custom):
        state = family.state
        if is_product(state):
            raise ProductStateError("custom state is a product state")
        if state.n_qubits == 2:
            return classify_state(TwoQubit(state))
        if search_config is None:
            return Verdict(Status.UNDETERMINED, "no-analytic-verdict")
        from .search import extract_witness, optimize

        result = optimize(state, search_config)
        if result.converged:
            return _checked(state, extract_witness(result, state), "search-witness")
        return Verdict(Status.UNDETERMINED, "search-residual", residual=result.best_residual)

    raise TypeError(f"unsupported state family {family!r}")
