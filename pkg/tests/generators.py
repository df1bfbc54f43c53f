"""Random test objects shared by the property and acceptance tests."""

import numpy as np

from lurecert.multiplier import l1_norm_exact, make_multiplier
from lurecert.nonlin import (
    Deadzone,
    LinearGain,
    NonlinearitySpec,
    OddSigmoid,
    PiecewiseLinear,
    Saturation,
)


def smooth_signal(rng, n=600, dt=0.01):
    """Band-limited signal tapered to zero at both ends."""
    t = dt * np.arange(n)
    x = np.zeros(n)
    for _ in range(4):
        x += rng.normal() * np.sin(rng.uniform(0.2, 5.0) * t + rng.uniform(0, 6.3))
    return x * np.sin(np.pi * t / t[-1]) ** 2 * 10 ** rng.uniform(-1, 1)


def padded_signal(rng, n=600, dt=0.01, pad=600):
    """Smooth signal with zero margins on both sides, so convolutions stay in range."""
    return np.concatenate((np.zeros(pad), smooth_signal(rng, n, dt), np.zeros(pad)))


def random_monotone(rng, odd=False):
    kind = int(rng.integers(0, 5))
    if kind == 0:
        shape = Saturation(rng.uniform(0.1, 3))
    elif kind == 1:
        shape = Deadzone(rng.uniform(0.1, 2))
    elif kind == 2:
        shape = OddSigmoid(rng.uniform(0.1, 5))
    elif kind == 3:
        shape = LinearGain(rng.uniform(0, 5))
    else:
        q = int(rng.integers(2, 8))
        pos = np.unique(10.0 ** rng.uniform(-2, 1, q))
        if odd:
            outer = rng.uniform(0, 5, len(pos))
            breaks = np.concatenate((-pos[::-1], pos))
            slopes = np.concatenate((outer[::-1], [rng.uniform(0, 5)], outer))
        else:
            breaks = np.unique(pos * rng.choice([-1.0, 1.0], len(pos)))
            slopes = rng.uniform(0, 5, len(breaks) + 1)
        shape = PiecewiseLinear.from_slopes(breaks, slopes)
    if not odd and kind != 4 and rng.random() < 0.5:
        # break oddness with an asymmetric positive scaling
        c = rng.uniform(0.2, 3)
        base = shape
        shape = lambda x, b=base, c=c: np.where(np.asarray(x) >= 0, b(x), c * b(x))
    return NonlinearitySpec("monotone_odd" if odd else "monotone", shape)


def random_multiplier(rng, signed=False, max_terms=3):
    """Random basis with ||H||_1 <= 1; nonnegative gains unless ``signed``."""
    def side():
        n = int(rng.integers(0, max_terms + 1))
        gains = rng.uniform(0, 1, n) * (rng.choice([-1.0, 1.0], n) if signed else 1.0)
        return [(float(k), float(a)) for k, a in zip(gains, rng.uniform(0.2, 10, n))]

    m = make_multiplier(side(), side())
    l1 = l1_norm_exact(m)
    if l1 == 0:
        return m
    scale = rng.uniform(0.3, 1.0) / l1
    return make_multiplier([(k * scale, a) for k, a in m.causal], [(k * scale, b) for k, b in m.anticausal])
