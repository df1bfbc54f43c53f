"""Zames-Falb multipliers M = 1 - H: L1 norm, impulse sign and class validity."""

from lurecert.multiplier import (
    impulse_nonnegative,
    l1_norm_exact,
    make_multiplier,
    multiplier_freq_response,
    multiplier_valid_for_class,
)

cases = {
    "k/(s+a)": make_multiplier([(1, 2)]),
    "two causal, mixed sign": make_multiplier([(1, 1), (-0.5, 2)]),
    "causal + anticausal": make_multiplier([(0.5, 1)], [(0.5, 2)]),
    "negative gain": make_multiplier([(-0.5, 1)]),
    "too large": make_multiplier([(3, 1)]),
}
for name, m in cases.items():
    print(f"{name}: L1={l1_norm_exact(m):.4g} h>=0={impulse_nonnegative(m)} M(j1)={multiplier_freq_response(m, 1.0):.4f}")
    for tag in ("slope", "slope_odd"):
        rep = multiplier_valid_for_class(m, tag)
        print(f"    {tag:10s} valid={rep.passed} {'; '.join(rep.reasons)}")
