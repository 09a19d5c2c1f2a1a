"""
GHZ states reproduce a classical game, W states do not
======================================================

Each player holds one qubit and may apply one of two local unitaries.  The
referee can read the joint choice back only if all 2^N output states are
mutually orthogonal.
"""
from entgame.classify import classify_state, ghz_witness
from entgame.game import play_quantum, reproduction_check
from entgame.io import fixture_path, load_game
from entgame.ortho import OperatorAssignment, gram_matrix, max_offdiagonal, orthonormal_completion, output_states
from entgame.qcore import I2, I_SIGMA_Y
from entgame.states import W, ghz, w_state

# GHZ: the pair {I, i sigma_y} on every qubit gives an identity Gram matrix
for n in range(2, 7):
    g = gram_matrix(ghz(n), ghz_witness(n))
    print(f"GHZ_{n}: max off-diagonal overlap {max_offdiagonal(g):.1e}")

# so every row of a payoff table comes back with certainty
game = load_game(fixture_path("minority3.json"))
ok, worst = reproduction_check(ghz(3), ghz_witness(3), game)
print("GHZ_3 reproduces the minority game:", ok, f"(worst |p_k - 1| = {worst:.1e})")

# W_3 with the same operators: outputs overlap, the referee's readout blurs
w = OperatorAssignment.uniform(3, I2, I_SIGMA_Y)
print("W_3 max overlap:", round(max_offdiagonal(gram_matrix(w_state(3), w)), 4))
basis = orthonormal_completion(output_states(w_state(3), w))
for k in range(8):
    res = play_quantum(w_state(3), w.operators_for(k), basis, game)
    print(f"W_3, k={k}: largest outcome probability {res.distribution.max():.4f}")

# and no choice of operators can fix it: the phase constraints form an odd cycle
verdict = classify_state(W(3))
print(verdict.status.value, verdict.reason, verdict.certificate["sum"])
