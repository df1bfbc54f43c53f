"""Plants: validation, Routh test, frequency response and impulse response."""

import numpy as np

from lurecert.lti import impulse_response, is_hurwitz, routh_first_column, tf_to_ss, validate_tf

G = validate_tf([1], [1, 3, 2])  # 1/((s+1)(s+2))
print("G =", G)
col, degenerate = routh_first_column(G.den)
print("Routh first column:", col, "degenerate:", degenerate)
print("Hurwitz:", is_hurwitz(G))

for w in (0.0, 1.0, 10.0):
    print(f"G(j{w:g}) = {G(w):.6f}")

ir = impulse_response(tf_to_ss(G), dt=1e-3, T=10.0)
print("g(1) =", np.interp(1.0, ir.t, ir.g), "(exact", np.exp(-1) - np.exp(-2), ")")

unstable = validate_tf([1], [1, -1])
print("1/(s-1) Hurwitz:", is_hurwitz(unstable))
