"""Output-state overlaps for two-strategy local-unitary games.

Output states are ``|Phi_k> = (x_1 ⊗ ... ⊗ x_N)|psi>`` with ``x_i = u_i`` when
bit ``i-1`` of ``k`` is 0 and ``x_i = v_i`` when it is 1.  Labels are 0-based;
the first listed output ``Phi_1`` in the usual one-based numbering is ``k = 0``.

Every overlap ``<Phi_a|Phi_b>`` factorises into ``<psi| ⊗ M_i |psi>`` with
``M_i`` one of ``I``, ``m_i = u_i^† v_i`` or ``m_i^†``, so only ``3^N`` distinct
expectation values exist.  They are computed by splitting the players into a
low block ``A`` and a high block ``B``::

    <psi| M_A ⊗ M_B |psi> = Tr(M_A · Psi M_B^T Psi^†)

with ``Psi`` the ``2^|A| x 2^|B|`` amplitude matrix; all patterns then come
out of one matrix product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Sequence

import numpy as np

from .qcore import I2, PureState, StateError, check_unitary

FEASIBILITY_TOL = 1e-9
ORACLE_TOL = 1e-12
GRAM_MAX_QUBITS = 10
RESIDUAL_MAX_QUBITS = 12


class NotDistinguishableError(ValueError):
    """The output states of an assignment are not mutually orthogonal."""


class Diff(IntEnum):
    SAME = 0
    FORWARD = 1  # u on the bra side, v on the ket side: factor m
    BACKWARD = 2  # v on the bra side, u on the ket side: factor m^†


@dataclass(frozen=True, eq=False)
class OperatorAssignment:
    pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    relative: tuple[np.ndarray, ...] = field(init=False)

    def __post_init__(self):
        pairs = tuple((check_unitary(u), check_unitary(v)) for u, v in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "relative", tuple(u.conj().T @ v for u, v in pairs))

    @classmethod
    def from_relative(cls, relative: Sequence) -> "OperatorAssignment":
        """``u_i = I`` and ``v_i = relative[i]``."""
        return cls(tuple((I2.copy(), np.asarray(m, dtype=complex)) for m in relative))

    @classmethod
    def uniform(cls, n: int, u, v) -> "OperatorAssignment":
        return cls(tuple((np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
                         for _ in range(n)))

    @property
    def n_players(self) -> int:
        return len(self.pairs)

    def operators_for(self, k: int) -> list[np.ndarray]:
        return [v if (k >> i) & 1 else u for i, (u, v) in enumerate(self.pairs)]


@dataclass(frozen=True)
class JointStrategyIndex:
    k: int
    choices: tuple[int, ...]


def joint_index(choices: Sequence[int]) -> JointStrategyIndex:
    """``k = sum_i (choices[i] - 1) 2^(i)`` over 0-based player position ``i``."""
    choices = tuple(int(c) for c in choices)
    if not choices or any(c not in (1, 2) for c in choices):
        raise ValueError(f"choices must be a non-empty vector over {{1, 2}}, got {choices}")
    k = sum((c - 1) << i for i, c in enumerate(choices))
    return JointStrategyIndex(k, choices)


def index_choices(k: int, n: int) -> JointStrategyIndex:
    if not 0 <= k < 2**n:
        raise ValueError(f"k={k} outside 0..{2**n - 1}")
    return JointStrategyIndex(k, tuple(((k >> i) & 1) + 1 for i in range(n)))


def difference_pattern(a: JointStrategyIndex, b: JointStrategyIndex) -> tuple[Diff, ...]:
    if len(a.choices) != len(b.choices):
        raise ValueError("indices belong to games with different player counts")
    out = []
    for ca, cb in zip(a.choices, b.choices):
        if ca == cb:
            out.append(Diff.SAME)
        elif ca == 1:
            out.append(Diff.FORWARD)
        else:
            out.append(Diff.BACKWARD)
    return tuple(out)


def _factor(m: np.ndarray, sym: Diff) -> np.ndarray:
    if sym == Diff.SAME:
        return I2
    return m if sym == Diff.FORWARD else m.conj().T


def gram_entry(state: PureState, assignment: OperatorAssignment, pattern: Sequence[Diff]) -> complex:
    """``<psi| ⊗_i M_i |psi>`` for a single difference pattern."""
    n = state.n_qubits
    if assignment.n_players != n or len(pattern) != n:
        raise StateError("assignment/pattern length does not match the state")
    psi = state.tensor()
    out = psi
    for player, (m, sym) in enumerate(zip(assignment.relative, pattern), start=1):
        if sym == Diff.SAME:
            continue
        axis = n - player
        out = np.moveaxis(np.tensordot(_factor(m, sym), out, axes=([1], [axis])), 0, axis)
    return complex(np.vdot(psi, out))


# -- all-pattern evaluation ---------------------------------------------------

def _pattern_stack(relative: np.ndarray) -> np.ndarray:
    """Stack of ``⊗`` products over all ``3^len`` symbol choices.

    Entry ``p`` (base-3 digits, player 0 least significant) is the dense
    operator on those players in the package bit order.
    """
    count = len(relative)
    factors = np.empty((count, 3, 2, 2), dtype=complex)
    factors[:, 0] = I2
    factors[:, 1] = relative
    factors[:, 2] = np.conj(np.swapaxes(relative, -1, -2))
    stack = factors[0]
    for f in factors[1:]:
        # new operator = factor ⊗ old (this player is the new high bit)
        prod = f[:, None, :, None, :, None] * stack[None, :, None, :, None, :]
        q, p, a, c, b, d = prod.shape
        stack = prod.reshape(q * p, a * c, b * d)
    return stack


class PatternEvaluator:
    """Precomputed split of a state for repeated all-pattern evaluations."""

    def __init__(self, state: PureState):
        n = state.n_qubits
        self.n = n
        self.n_low = n // 2 if n > 1 else 1
        self.n_high = n - self.n_low
        # amp[a, b] with a the low block index
        self.psi = state.amplitudes.reshape(2**self.n_high, 2**self.n_low).T.copy()
        self.psi_conj = self.psi.conj()
        self.psi_t = self.psi.T.copy()
        digits = np.array([[(p // 3**i) % 3 for i in range(n)] for p in range(3**n)])
        self.n_same = (digits == 0).sum(axis=1)
        self.weights = 2.0 ** self.n_same
        self.weights[0] = 0.0  # all-SAME is the diagonal

    def expectations(self, relative: Sequence[np.ndarray]) -> np.ndarray:
        """Flat array over ``3^N`` patterns (base-3 digit ``i`` = player ``i+1``)."""
        rel = np.asarray(relative, dtype=complex)
        low = _pattern_stack(rel[: self.n_low])  # (3^L, 2^L, 2^L)
        psi = self.psi
        if self.n_high:
            high = _pattern_stack(rel[self.n_low:])  # (3^H, 2^H, 2^H)
            # K[q] = Psi M_B^T Psi^†, stored transposed: Kt[q] = conj(Psi) M_B Psi^T
            kt = self.psi_conj @ high @ self.psi_t
        else:
            kt = (psi.conj() @ psi.T)[None]
        # value[q, p] = Tr(M_A[p] K[q]) = sum_{ij} M_A[p,i,j] Kt[q,i,j]
        vals = kt.reshape(kt.shape[0], -1) @ low.reshape(low.shape[0], -1).T
        return vals.reshape(-1)  # high digits are more significant

    def residual(self, relative: Sequence[np.ndarray]) -> float:
        e = self.expectations(relative)
        return 0.5 * float(np.dot(self.weights, e.real**2 + e.imag**2))


def pattern_expectations(state: PureState, assignment: OperatorAssignment) -> np.ndarray:
    if assignment.n_players != state.n_qubits:
        raise StateError("assignment length does not match the state")
    return PatternEvaluator(state).expectations(assignment.relative)


def _pattern_index_matrix(n: int) -> np.ndarray:
    ks = np.arange(2**n)
    sym = np.array([[0, 1], [2, 0]], dtype=np.int64)
    idx = np.zeros((2**n, 2**n), dtype=np.int64)
    for i in range(n):
        bits = (ks >> i) & 1
        idx += sym[bits[:, None], bits[None, :]] * 3**i
    return idx


def gram_matrix(state: PureState, assignment: OperatorAssignment,
                max_qubits: int = GRAM_MAX_QUBITS) -> np.ndarray:
    """``G[a, b] = <Phi_a|Phi_b>`` for all ``2^N`` output states."""
    n = state.n_qubits
    if n > max_qubits:
        raise ValueError(f"Gram matrix capped at {max_qubits} qubits, got {n}")
    vals = pattern_expectations(state, assignment)
    return vals[_pattern_index_matrix(n)]


def output_states(state: PureState, assignment: OperatorAssignment) -> np.ndarray:
    """Rows are the amplitude vectors of ``|Phi_k>``, ``k = 0 .. 2^N - 1``."""
    from .qcore import apply_joint

    n = state.n_qubits
    if assignment.n_players != n:
        raise StateError("assignment length does not match the state")
    return np.array([apply_joint(state, assignment.operators_for(k)).amplitudes
                     for k in range(2**n)])


def residual(g: np.ndarray) -> float:
    """Sum of ``|G_ab|^2`` over ``a < b``."""
    g = np.asarray(g)
    iu = np.triu_indices(g.shape[0], k=1)
    off = g[iu]
    return float(np.sum(off.real**2 + off.imag**2))


def assignment_residual(state: PureState, assignment: OperatorAssignment,
                        max_qubits: int = RESIDUAL_MAX_QUBITS) -> float:
    """Residual without materialising the Gram matrix."""
    if state.n_qubits > max_qubits:
        raise ValueError(f"residual evaluation capped at {max_qubits} qubits")
    if assignment.n_players != state.n_qubits:
        raise StateError("assignment length does not match the state")
    return PatternEvaluator(state).residual(assignment.relative)


def max_offdiagonal(g: np.ndarray) -> float:
    g = np.asarray(g)
    off = np.abs(g - np.diag(np.diag(g)))
    return float(off.max()) if off.size > 1 else 0.0


def is_distinguishable(g: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return max_offdiagonal(g) <= tol


def orthonormal_completion(vectors: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt with largest-remaining-norm pivoting.

    Row ``k`` of the result descends from row ``k`` of ``vectors``.  Rows that
    turn out linearly dependent are refilled from the computational basis, so
    the output is always a complete orthonormal basis.
    """
    work = np.array(vectors, dtype=complex)
    count, dim = work.shape
    if count > dim:
        raise ValueError("more vectors than the space dimension")
    out = np.zeros_like(work)
    pending = list(range(count))
    done = []

    def project_out(vec):
        for q in done:
            vec = vec - np.vdot(q, vec) * q
        return vec

    while pending:
        norms = [np.linalg.norm(work[k]) for k in pending]
        j = int(np.argmax(norms))
        if norms[j] <= eps:
            break
        k = pending.pop(j)
        q = work[k] / norms[j]
        out[k] = q
        done.append(q)
        for r in pending:
            work[r] = work[r] - np.vdot(q, work[r]) * q
    for k in pending:
        best = max((project_out(np.eye(dim, dtype=complex)[e]) for e in range(dim)),
                   key=np.linalg.norm)
        q = project_out(best)
        q /= np.linalg.norm(q)
        out[k] = q
        done.append(q)
    return out


def referee_projectors(state: PureState, assignment: OperatorAssignment,
                       tol: float = FEASIBILITY_TOL) -> np.ndarray:
    """Orthonormal measurement basis with row ``j`` matched to output ``|Phi_j>``."""
    g = gram_matrix(state, assignment)
    worst = max_offdiagonal(g)
    if worst > tol:
        raise NotDistinguishableError(
            f"output states overlap up to {worst:.3g} (> {tol:g}); no referee basis exists"
        )
    return orthonormal_completion(output_states(state, assignment))
