"""State families (Dicke, W, GHZ, two-qubit, custom) and local-unitary transport."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, pi
from typing import Sequence, Union

import numpy as np

from .qcore import I2, PureState, StateError, check_unitary, make_state, normalized, su2_canonicalize


def dicke(n: int, m: int) -> PureState:
    """Equal superposition of all ``n``-bit strings with exactly ``m`` ones."""
    if n < 1:
        raise StateError(f"Dicke state needs n >= 1, got {n}")
    if not 0 <= m <= n:
        raise StateError(f"Dicke excitation number m={m} outside 0..{n}")
    idx = np.arange(2**n)
    weights = np.array([bin(i).count("1") for i in idx])
    amps = np.where(weights == m, 1.0 / np.sqrt(comb(n, m)), 0.0)
    return PureState(n, amps.astype(complex))


def w_state(n: int) -> PureState:
    if n < 3:
        raise StateError(f"W state is defined for n >= 3, got {n}")
    return dicke(n, 1)


def ghz_phase(n: int) -> float:
    """Relative phase for which ``{I, i sigma_y}`` on every player is a witness.

    The all-flip overlap is ``(e^{i phase} + (-1)^n e^{-i phase}) / 2``, which
    vanishes at ``pi/2`` for even ``n`` and at ``0`` for odd ``n``.
    """
    return pi / 2 if n % 2 == 0 else 0.0


def ghz(n: int, phase: float | None = None) -> PureState:
    """``(|0...0> + e^{i phase} |1...1>) / sqrt(2)``; default phase from :func:`ghz_phase`."""
    if n < 2:
        raise StateError(f"GHZ state needs n >= 2, got {n}")
    if phase is None:
        phase = ghz_phase(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1
    amps[-1] = np.exp(1j * phase)
    return PureState(n, amps / np.sqrt(2))


def random_state(n_qubits: int, seed: int) -> PureState:
    """Haar-random state from a seeded complex Gaussian draw."""
    if n_qubits < 1:
        raise StateError(f"n_qubits must be >= 1, got {n_qubits}")
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return normalized(n_qubits, amps)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary (QR of a Ginibre matrix with phase fix)."""
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# -- families -----------------------------------------------------------------

@dataclass(frozen=True)
class Dicke:
    n: int
    m: int

    def build(self) -> PureState:
        return dicke(self.n, self.m)


@dataclass(frozen=True)
class W:
    n: int

    def build(self) -> PureState:
        return w_state(self.n)


@dataclass(frozen=True)
class GHZ:
    n: int
    phase: float | None = None

    def build(self) -> PureState:
        return ghz(self.n, self.phase)

    @property
    def resolved_phase(self) -> float:
        return ghz_phase(self.n) if self.phase is None else self.phase


@dataclass(frozen=True, eq=False)
class TwoQubit:
    """Arbitrary two-qubit pure state."""

    state: PureState

    def __post_init__(self):
        if self.state.n_qubits != 2:
            raise StateError("TwoQubit family needs a 2-qubit state")

    @classmethod
    def from_coefficients(cls, alpha: float, beta: float) -> "TwoQubit":
        return cls(normalized(2, [alpha, 0, 0, beta]))

    def build(self) -> PureState:
        return self.state


@dataclass(frozen=True, eq=False)
class Custom:
    state: PureState
    source: str | None = None

    def build(self) -> PureState:
        return self.state


StateFamily = Union[Dicke, W, GHZ, TwoQubit, Custom]


def parse_state_spec(text: str) -> StateFamily:
    """Parse ``dicke:N,m`` | ``ghz:N[,phase]`` | ``w:N`` | ``file:PATH``.

    Files hold ``{"n": int, "amplitudes": [[re, im], ...]}``; two-qubit
    files come back as :class:`TwoQubit`, everything else as :class:`Custom`.
    """
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"state spec {text!r} lacks a 'kind:' prefix")
    kind = kind.strip().lower()
    try:
        if kind == "dicke":
            n, m = (int(t) for t in rest.split(","))
            return Dicke(n, m)
        if kind == "w":
            return W(int(rest))
        if kind == "ghz":
            parts = rest.split(",")
            if len(parts) == 1:
                return GHZ(int(parts[0]))
            if len(parts) == 2:
                return GHZ(int(parts[0]), float(parts[1]))
            raise ValueError
    except ValueError:
        raise ValueError(f"cannot parse state spec {text!r}") from None
    if kind == "file":
        from .io import load_state

        state = load_state(rest)
        if state.n_qubits == 2:
            return TwoQubit(state)
        return Custom(state, rest)
    raise ValueError(f"unknown state kind {kind!r} in {text!r}")


# -- transport ----------------------------------------------------------------

def transport_witness(witness, rotations: Sequence):
    """Move a witness for ``|psi>`` to one for ``(⊗ w_i)|psi>``.

    The new pair for player ``i`` is ``(u_i w_i^†, v_i w_i^†)`` brought to
    special-unitary form, so every output state is reproduced up to a phase.
    """
    from .ortho import OperatorAssignment

    if len(rotations) != len(witness.pairs):
        raise ValueError(f"need {len(witness.pairs)} rotations, got {len(rotations)}")
    pairs = []
    for (u, v), w in zip(witness.pairs, rotations):
        w_dag = check_unitary(w).conj().T
        pairs.append((su2_canonicalize(u @ w_dag), su2_canonicalize(v @ w_dag)))
    return OperatorAssignment(tuple(pairs))


def phase_rotation(delta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * delta)]).astype(complex)


__all__ = [
    "Custom", "Dicke", "GHZ", "I2", "StateFamily", "TwoQubit", "W",
    "dicke", "ghz", "ghz_phase", "make_state", "parse_state_spec", "phase_rotation",
    "random_state", "random_unitary", "transport_witness", "w_state",
]
