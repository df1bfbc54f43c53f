"""Simulate the loop and try to break certified and uncertified slopes."""

import numpy as np

from lurecert.benchmarks import benchmark_plants
from lurecert.multiplier import make_multiplier
from lurecert.nonlin import Saturation
from lurecert.search import bisect_alpha
from lurecert.sim import falsify, make_input, simulate_lure, td_iqc_value

G = benchmark_plants()["lag3"]
tr = simulate_lure(G, Saturation(7.0), make_input("pulse", 50.0))
print(f"saturated loop: diverged={tr.diverged}, ||y||_2={tr.l2_y[-1]:.4f}")

alpha = bisect_alpha(G).alpha_star
for a in (alpha, 10.0, 80.0):
    rep = falsify(G, a, 200, seed=0)
    print(f"alpha={a:7.3f}: {rep.n_diverged}/200 trials diverged (dt={rep.dt:.3g}, T={rep.T:.3g})")

dt = 0.01
t = dt * np.arange(2000)
x = np.sin(2 * t) * np.exp(-((t - 10) ** 2) / 8)
m = make_multiplier([(0.5, 1.0)], [(0.2, 0.5)])
print("time-domain IQC value:", td_iqc_value(m, Saturation(1.0), x, dt))
