"""
Half-filled Dicke states
========================

|2,2> admits explicit operators, |3,3> and larger do not.  The pair and
four-player conditions are checked against direct overlaps first.
"""
import numpy as np

from entgame.classify import bound_check, classify_state, halfhalf4_witness
from entgame.oracles import eq12_suite, eq13_suite, halfhalf_corroboration
from entgame.ortho import gram_matrix
from entgame.states import Dicke, dicke

g = gram_matrix(dicke(4, 2), halfhalf4_witness())
print("|2,2> Gram minus identity:", np.abs(g - np.eye(16)).max())

# closed forms vs brute force on Dicke(6,3)
pair = eq12_suite(n=6, draws=1000)
quad = eq13_suite(n=6)
print("pair condition: constant", round(pair.details["constant"], 6),
      "zero-set mismatches", pair.details["zero_set_mismatches"])
print("quad condition: constant", round(quad.details["constant"], 6),
      "zero-set mismatches", quad.details["zero_set_mismatches"])

# the contradiction: 6N/(N-2) always exceeds 3
for n in (6, 8, 10, 20):
    print(n, bound_check(n))

# numeric corroboration: land random angles on every pair condition, look at the quads
print(halfhalf_corroboration(n=6, draws=2000))

for n in (2, 4, 6, 8):
    v = classify_state(Dicke(n, n // 2))
    print(f"Dicke({n},{n // 2}):", v.status.value, v.reason)
