"""Bundled benchmark plants for the positive-feedback loop.

Each plant is stable with phase-heavy or lightly damped dynamics, i.e. the
frequency response reaches large positive real parts away from the real
axis, which is where a dynamic multiplier beats the circle test.
"""

import numpy as np

from .lti import TransferFunction, validate_tf

__all__ = ["BENCHMARKS", "benchmark_plants"]

BENCHMARKS = {
    # -1/(s+1)^3: Nyquist gain bound 8
    "lag3": ([-1.0], [1.0, 3.0, 3.0, 1.0]),
    # -1/((s+1)(s^2+0.4s+1))
    "lag_resonant": ([-1.0], list(np.polymul([1, 1], [1, 0.4, 1]))),
    # -s/((s^2+0.1s+1)(s+1)^2): lightly damped mode
    "resonant_derivative": ([-1.0, 0.0], list(np.polymul([1, 0.1, 1], [1, 2, 1]))),
    # -1/(s+1)^4
    "lag4": ([-1.0], list(np.polymul([1, 2, 1], [1, 2, 1]))),
    # (s-1)/((s+1)(s^2+0.5s+1)): right-half-plane zero
    "nonminimum_phase": ([1.0, -1.0], list(np.polymul([1, 1], [1, 0.5, 1]))),
}


def benchmark_plants() -> dict:
    """Name -> validated :class:`TransferFunction`."""
    return {name: validate_tf(n, d) for name, (n, d) in BENCHMARKS.items()}
