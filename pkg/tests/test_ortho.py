import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_gram, random_assignment
from entgame.classify import ghz_witness, halfhalf4_witness
from entgame.oracles import anti_diagonal
from entgame.ortho import (
    Diff,
    NotDistinguishableError,
    OperatorAssignment,
    assignment_residual,
    difference_pattern,
    gram_entry,
    gram_matrix,
    index_choices,
    is_distinguishable,
    joint_index,
    max_offdiagonal,
    orthonormal_completion,
    output_states,
    referee_projectors,
    residual,
)
from entgame.qcore import I2, I_SIGMA_Y, OperatorError, StateError, apply_joint, inner_product
from entgame.states import dicke, ghz, random_state, random_unitary, w_state


class TestJointIndex:
    def test_examples(self):
        assert joint_index([1, 1, 1]).k == 0
        assert joint_index([2, 1, 1]).k == 1
        assert joint_index([2, 2, 2]).k == 7

    @pytest.mark.parametrize("bad", [[0, 1], [1, 3], []])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            joint_index(bad)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_bijective(self, n):
        ks = [joint_index(c).k for c in itertools.product([1, 2], repeat=n)]
        assert sorted(ks) == list(range(2**n))
        for k in range(2**n):
            assert joint_index(index_choices(k, n).choices).k == k

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            index_choices(8, 3)


class TestDifferencePattern:
    def test_examples(self):
        a, b = index_choices(0, 3), index_choices(3, 3)
        assert difference_pattern(a, a) == (Diff.SAME,) * 3
        assert difference_pattern(a, b) == (Diff.FORWARD, Diff.FORWARD, Diff.SAME)
        assert difference_pattern(b, a) == (Diff.BACKWARD, Diff.BACKWARD, Diff.SAME)

    def test_mismatched_sizes(self):
        with pytest.raises(ValueError):
            difference_pattern(index_choices(0, 2), index_choices(0, 3))


class TestAssignment:
    def test_relative(self, rng):
        w = random_assignment(rng, 3)
        for (u, v), m in zip(w.pairs, w.relative):
            assert np.allclose(m, u.conj().T @ v, rtol=0, atol=1e-13)
            assert np.allclose(m.conj().T @ m, I2, atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(OperatorError):
            OperatorAssignment(((I2, 2 * I2),))


class TestGramEntry:
    def test_all_same(self, rng):
        s = random_state(3, 4)
        assert gram_entry(s, random_assignment(rng, 3), [Diff.SAME] * 3) == pytest.approx(1, abs=1e-12)

    def test_w3_single_anti_diagonal(self):
        # (N-1) <0|m|0> + <1|m|1> vanishes for an anti-diagonal m
        w = OperatorAssignment.from_relative([anti_diagonal(0.7), I2, I2])
        val = gram_entry(w_state(3), w, [Diff.FORWARD, Diff.SAME, Diff.SAME])
        assert abs(val) <= 1 / 3
        assert abs(val) < 1e-15

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_w_two_anti_diagonals(self, n, rng):
        for _ in range(5):
            p1, p2 = rng.uniform(-np.pi, np.pi, 2)
            w = OperatorAssignment.from_relative([anti_diagonal(p1), anti_diagonal(p2)] + [I2] * (n - 2))
            pattern = [Diff.FORWARD, Diff.FORWARD] + [Diff.SAME] * (n - 2)
            assert gram_entry(w_state(n), w, pattern) == pytest.approx(2 / n * np.cos(p1 - p2), abs=1e-12)

    def test_length_mismatch(self, rng):
        with pytest.raises(StateError):
            gram_entry(ghz(3), random_assignment(rng, 2), [Diff.SAME] * 2)

    def test_factorization_500_draws(self, rng):
        for _ in range(500):
            n = int(rng.integers(2, 5))
            s = random_state(n, int(rng.integers(2**31)))
            w = random_assignment(rng, n)
            a, b = (int(x) for x in rng.integers(0, 2**n, 2))
            ia, ib = index_choices(a, n), index_choices(b, n)
            phi_a = apply_joint(s, w.operators_for(a))
            phi_b = apply_joint(s, w.operators_for(b))
            val = gram_entry(s, w, difference_pattern(ia, ib))
            assert abs(val - inner_product(phi_a, phi_b)) <= 1e-12


class TestGramMatrix:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_ghz_identity(self, n):
        g = gram_matrix(ghz(n), OperatorAssignment.uniform(n, I2, I_SIGMA_Y))
        assert np.allclose(g, np.eye(2**n), rtol=0, atol=1e-12)

    def test_dicke42_identity(self):
        g = gram_matrix(dicke(4, 2), halfhalf4_witness())
        assert np.allclose(g, np.eye(16), rtol=0, atol=1e-12)

    def test_identical_outputs(self, rng):
        u = random_unitary(rng)
        g = gram_matrix(random_state(3, 1), OperatorAssignment.uniform(3, u, u))
        assert np.allclose(g, np.ones((8, 8)), rtol=0, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_naive_pairs(self, n, rng):
        for _ in range(10):
            s = random_state(n, int(rng.integers(2**31)))
            w = random_assignment(rng, n)
            assert np.allclose(gram_matrix(s, w), brute_gram(s.amplitudes, w), rtol=0, atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_hermitian_unit_diagonal(self, n, seed):
        rng = np.random.default_rng(seed)
        g = gram_matrix(random_state(n, seed), random_assignment(rng, n))
        assert np.allclose(g, g.conj().T, rtol=0, atol=1e-12)
        assert np.allclose(np.diag(g), 1, rtol=0, atol=1e-12)
        assert np.abs(g).max() <= 1 + 1e-12

    def test_cap(self):
        s = ghz(3)
        with pytest.raises(ValueError):
            gram_matrix(s, ghz_witness(3), max_qubits=2)


class TestResidual:
    def test_identity(self):
        assert residual(np.eye(8)) == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_all_ones(self, n):
        assert residual(np.ones((2**n, 2**n))) == 2 ** (n - 1) * (2**n - 1)

    def test_w3_isigmay_brute_pairs(self):
        s = w_state(3)
        w = OperatorAssignment.uniform(3, I2, I_SIGMA_Y)
        outs = [apply_joint(s, w.operators_for(k)) for k in range(8)]
        expected = sum(abs(inner_product(outs[a], outs[b])) ** 2
                       for a, b in itertools.combinations(range(8), 2))
        assert residual(gram_matrix(s, w)) == pytest.approx(expected, abs=1e-12)
        assert assignment_residual(s, w) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_pattern_residual_matches_gram(self, n, seed):
        rng = np.random.default_rng(seed)
        s, w = random_state(n, seed), random_assignment(rng, n)
        assert assignment_residual(s, w) == pytest.approx(residual(gram_matrix(s, w)), abs=1e-11)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.floats(-np.pi, np.pi))
    def test_phase_invariance(self, n, seed, gamma):
        rng = np.random.default_rng(seed)
        s, w = random_state(n, seed), random_assignment(rng, n)
        player, slot = int(rng.integers(n)), int(rng.integers(2))
        pairs = [list(p) for p in w.pairs]
        pairs[player][slot] = np.exp(1j * gamma) * pairs[player][slot]
        moved = OperatorAssignment(tuple(tuple(p) for p in pairs))
        assert abs(assignment_residual(s, moved) - assignment_residual(s, w)) < 1e-12

    def test_cap(self):
        with pytest.raises(ValueError):
            assignment_residual(ghz(3), ghz_witness(3), max_qubits=2)


class TestDistinguishable:
    def test_examples(self):
        assert is_distinguishable(np.eye(4), 1e-9)
        assert not is_distinguishable(np.ones((4, 4)), 1e-9)
        assert is_distinguishable(gram_matrix(ghz(4), ghz_witness(4)), 1e-9)

    def test_tol_positive(self):
        with pytest.raises(ValueError):
            is_distinguishable(np.eye(2), 0)

    def test_max_offdiagonal(self):
        g = np.eye(3, dtype=complex)
        g[0, 2] = g[2, 0] = 0.5j
        assert max_offdiagonal(g) == pytest.approx(0.5)


class TestReferee:
    @staticmethod
    def check_basis(state, witness, proj):
        dim = 2**state.n_qubits
        assert np.allclose(proj @ proj.conj().T, np.eye(dim), rtol=0, atol=1e-10)
        outs = output_states(state, witness)
        probs = np.abs(proj.conj() @ outs.T) ** 2  # Tr[Pi_j |Phi_k><Phi_k|]
        assert np.allclose(probs, np.eye(dim), rtol=0, atol=1e-10)

    def test_ghz2(self):
        s, w = ghz(2), ghz_witness(2)
        self.check_basis(s, w, referee_projectors(s, w))

    def test_ghz3(self):
        s, w = ghz(3), ghz_witness(3)
        self.check_basis(s, w, referee_projectors(s, w))

    def test_dicke42(self):
        s, w = dicke(4, 2), halfhalf4_witness()
        self.check_basis(s, w, referee_projectors(s, w))

    def test_w3_rejected(self):
        with pytest.raises(NotDistinguishableError):
            referee_projectors(w_state(3), OperatorAssignment.uniform(3, I2, I_SIGMA_Y))


class TestCompletion:
    def test_orthonormal_and_ordered(self, rng):
        vecs = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        out = orthonormal_completion(vecs)
        assert np.allclose(out @ out.conj().T, np.eye(4), atol=1e-12)

    def test_dependent_rows_filled(self):
        vecs = np.array([[1, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0]], dtype=complex)
        out = orthonormal_completion(vecs)
        assert np.allclose(out @ out.conj().T, np.eye(4), atol=1e-12)
        assert abs(out[0, 0]) == pytest.approx(1)
        assert abs(out[2, 1]) == pytest.approx(1)

    def test_row_kept_when_already_orthonormal(self, rng):
        q = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))[0].T
        assert np.allclose(orthonormal_completion(q), q, atol=1e-12)

    def test_deterministic(self, rng):
        vecs = output_states(w_state(3), OperatorAssignment.uniform(3, I2, I_SIGMA_Y))
        assert np.array_equal(orthonormal_completion(vecs), orthonormal_completion(vecs))

    def test_too_many(self):
        with pytest.raises(ValueError):
            orthonormal_completion(np.ones((3, 2)))
