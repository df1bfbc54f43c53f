"""LP search over fixed-pole multipliers versus the circle test on the benchmarks."""

import time

from lurecert.benchmarks import benchmark_plants
from lurecert.search import SearchConfig, bisect_alpha, circle_baseline, lp_feasibility, pole_grid_search

for name, G in benchmark_plants().items():
    t0 = time.perf_counter()
    res = bisect_alpha(G)
    ac = circle_baseline(G)
    m = res.certificate.multiplier
    print(f"{name:20s} circle {ac:8.4f}  ZF {res.alpha_star:8.4f}  ({time.perf_counter() - t0:.1f}s)")
    print(f"{'':20s} causal {m['causal']}  anticausal {m['anticausal']}")

G = benchmark_plants()["lag3"]
for alpha in (6.0, 8.5):
    lp = lp_feasibility(G, alpha, SearchConfig.for_plant(G))
    scan = pole_grid_search(G, alpha, "slope")
    print(f"lag3 alpha={alpha}: LP {lp.verdict} ({lp.worst_margin:.4g}), "
          f"scan best {scan.margin:.4g} with {scan.side} pole {scan.pole:.3g}")
