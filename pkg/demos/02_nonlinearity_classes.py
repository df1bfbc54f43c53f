"""Nonlinearity shapes, class membership and the area inequality."""

import numpy as np

from lurecert.nonlin import NonlinearitySpec, area_residual, check_class, parse_shape

for text in ("sat:1", "dz:0.5", "sig:2", "pwl:-1,-2;0,0;1,0.5"):
    rep = check_class(parse_shape(text))
    print(f"{text:24s} monotone={rep.monotone} odd={rep.odd} slopes=[{rep.min_slope:.3g}, {rep.max_slope:.3g}]")

spec = NonlinearitySpec("slope_odd", parse_shape("sat:1"), alpha=1.0)
spec.validate()

dt = 0.01
t = dt * np.arange(800)
x = np.sin(1.3 * t) * np.exp(-((t - 4) ** 2) / 4)
for tau in (0.0, 0.5, 2.0, -1.0):
    print(f"tau={tau:5.2f}  plain residual={area_residual(spec, x, dt, tau):.5f}"
          f"  odd residual={area_residual(spec, x, dt, tau, 'odd'):.5f}")
