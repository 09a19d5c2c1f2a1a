"""
Searching for operators numerically
===================================

Multistart Nelder-Mead over the relative operators.  A converged search
yields a witness; a stuck one only reports a residual floor.
"""
from entgame.search import SearchConfig, extract_witness, optimize, residual_profile
from entgame.states import dicke, ghz, w_state

cfg = SearchConfig(starts=20, seed=0)

res = optimize(ghz(5, 0.8), cfg)
print("GHZ_5 at phase 0.8: converged", res.converged, "after", res.starts_completed, "start(s)")
witness = extract_witness(res, ghz(5, 0.8))

for name, make in [("W", w_state), ("GHZ", ghz), ("Dicke(N,N/2)", lambda n: dicke(n, n // 2))]:
    sizes = [3, 4] if name == "W" else [2, 4]
    for n, j, ok in residual_profile(make, sizes, cfg):
        print(f"{name:13s} N={n}  best J={j:.6g}  converged={ok}")
