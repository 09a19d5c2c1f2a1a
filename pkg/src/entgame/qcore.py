"""Dense N-qubit pure states and local 2x2 operators.

Bit convention (used everywhere in the package): player ``i`` (1-based)
owns bit ``i - 1`` of the basis index, so ``index = sum_i b_i * 2**(i-1)``.
With numpy's C-order reshape to ``(2,) * n`` the most significant bit comes
first, so player ``i`` lives on tensor axis ``n - i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

UNITARY_TOL = 1e-12
NORM_TOL = 1e-6

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I_SIGMA_Y = 1j * SIGMA_Y


class StateError(ValueError):
    """Raised for malformed state vectors or incompatible dimensions."""


class OperatorError(ValueError):
    """Raised for non-unitary or malformed local operators."""


@dataclass(frozen=True, eq=False)
class PureState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes.setflags(write=False)

    def __len__(self):
        return self.amplitudes.shape[0]

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def allclose(self, other: "PureState", atol: float = 1e-12) -> bool:
        return self.n_qubits == other.n_qubits and np.allclose(
            self.amplitudes, other.amplitudes, rtol=0, atol=atol
        )


@dataclass(frozen=True)
class SchmidtForm:
    """``(w1 ⊗ w2) |psi> = alpha |00> + beta |11>`` with ``alpha >= beta >= 0``."""

    alpha: float
    beta: float
    local_rotations: tuple[np.ndarray, np.ndarray]


def make_state(n_qubits: int, amplitudes) -> PureState:
    """Build a normalized state; inputs within 1e-6 of unit norm are renormalized."""
    if n_qubits < 1:
        raise StateError(f"n_qubits must be >= 1, got {n_qubits}")
    amps = np.array(amplitudes, dtype=complex).reshape(-1)
    if amps.shape[0] != 2**n_qubits:
        raise StateError(
            f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, got {amps.shape[0]}"
        )
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise StateError("zero vector is not a state")
    if abs(norm - 1) > NORM_TOL:
        raise StateError(f"amplitude norm {norm:.3g} is not within {NORM_TOL} of 1")
    if abs(norm - 1) > 8 * np.finfo(float).eps:
        amps = amps / norm  # leave already-unit vectors bit-identical
    return PureState(n_qubits, amps)


def normalized(n_qubits: int, amplitudes) -> PureState:
    """Like :func:`make_state` but rescales any nonzero vector."""
    amps = np.array(amplitudes, dtype=complex).reshape(-1)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise StateError("zero vector is not a state")
    return make_state(n_qubits, amps / norm)


def check_unitary(op, tol: float = UNITARY_TOL) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise OperatorError(f"local operator must be 2x2, got shape {op.shape}")
    if not np.allclose(op.conj().T @ op, I2, rtol=0, atol=tol):
        raise OperatorError("operator is not unitary")
    return op


def is_unitary(op, tol: float = UNITARY_TOL) -> bool:
    try:
        check_unitary(op, tol)
    except OperatorError:
        return False
    return True


def _apply_on_axis(psi: np.ndarray, n: int, player: int, op: np.ndarray) -> np.ndarray:
    axis = n - player
    out = np.tensordot(op, psi, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def apply_local(state: PureState, player: int, op) -> PureState:
    """Apply ``op`` to ``player`` (1-based), identity on every other qubit."""
    n = state.n_qubits
    if not 1 <= player <= n:
        raise StateError(f"player {player} out of range 1..{n}")
    op = check_unitary(op)
    out = _apply_on_axis(state.tensor(), n, player, op)
    return PureState(n, out.reshape(-1))


def apply_joint(state: PureState, ops: Sequence) -> PureState:
    """Apply ``ops[0] ⊗ ... ⊗ ops[N-1]`` with ``ops[i]`` acting on player ``i + 1``."""
    n = state.n_qubits
    if len(ops) != n:
        raise StateError(f"need {n} operators, got {len(ops)}")
    psi = state.tensor()
    for player, op in enumerate(ops, start=1):
        psi = _apply_on_axis(psi, n, player, check_unitary(op))
    return PureState(n, psi.reshape(-1))


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.n_qubits != b.n_qubits:
        raise StateError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def kron_operator(ops: Sequence) -> np.ndarray:
    """Dense ``2^N x 2^N`` matrix of ``ops[0] ⊗ ... ⊗ ops[N-1]`` in the package bit order."""
    mat = np.ones((1, 1), dtype=complex)
    for op in ops:
        mat = np.kron(np.asarray(op, dtype=complex), mat)
    return mat


def su2_canonicalize(op) -> np.ndarray:
    """Rescale ``op`` by a global phase so that ``det == 1``.

    Of the two admissible phases the one giving the first entry with
    ``|z| > 1e-9`` (reading order) an argument in ``(-pi/2, pi/2]`` is taken.
    """
    op = check_unitary(op)
    det = np.linalg.det(op)
    out = op / np.sqrt(det)
    lead = next(z for z in out.ravel() if abs(z) > 1e-9)
    # boundary arg == +-pi/2 is resolved towards +pi/2
    if lead.real < -1e-12 or (abs(lead.real) <= 1e-12 and lead.imag < 0):
        out = -out
    return out


def schmidt_decompose(state: PureState) -> SchmidtForm:
    if state.n_qubits != 2:
        raise StateError(f"Schmidt decomposition needs 2 qubits, got {state.n_qubits}")
    # amp[b1, b2] with player 1 on the low bit
    amp = state.amplitudes.reshape(2, 2).T
    if abs(amp[0, 1]) == 0 and abs(amp[1, 0]) == 0 and amp[0, 0].imag == 0 \
            and amp[1, 1].imag == 0 and amp[0, 0].real >= amp[1, 1].real >= 0:
        return SchmidtForm(float(amp[0, 0].real), float(amp[1, 1].real), (I2.copy(), I2.copy()))

    u, s, vh = np.linalg.svd(amp)
    v = vh.conj().T
    # gauge: first nonzero entry of each left singular vector positive real
    for k in range(2):
        lead = next(z for z in u[:, k] if abs(z) > 1e-12)
        phase = lead / abs(lead)
        u[:, k] /= phase
        v[:, k] /= phase
    if s[1] < 1e-15:
        # column 1 of v is free when beta vanishes
        lead = next(z for z in v[:, 1] if abs(z) > 1e-12)
        v[:, 1] /= lead / abs(lead)
    w1 = u.conj().T
    w2 = v.T
    return SchmidtForm(float(s[0]), float(s[1]), (w1, w2))
