"""Time-domain Lur'e loop simulation, empirical IQC values and falsification runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .lti import (
    StateSpace,
    TransferFunction,
    spectral_abscissa,
    spectral_radius,
    tf_to_ss,
)
from .multiplier import MultiplierBasis
from .nonlin import LinearGain, NonlinearitySpec, PiecewiseLinear

__all__ = [
    "SimTrace",
    "FalsifyReport",
    "time_scales",
    "make_input",
    "simulate_lure",
    "simulate_lure_batch",
    "td_iqc_value",
    "filter_multiplier",
    "random_slope_nonlinearity",
    "falsify",
]

DIVERGENCE_LEVEL = 1e12

Signal = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass
class SimTrace:
    t: np.ndarray
    r: np.ndarray
    u: np.ndarray
    y: np.ndarray
    l2_y: np.ndarray
    l2_u: np.ndarray
    diverged: bool = False


def time_scales(G: TransferFunction) -> tuple[float, float]:
    """(slowest time constant, spectral radius of A) without computing poles."""
    ss = tf_to_ss(G)
    if ss.order == 0:
        return 1.0, 0.0
    sigma = spectral_abscissa(ss.A)
    rho = spectral_radius(ss.A)
    tau = 1.0 / max(abs(sigma), 1e-6 * max(rho, 1e-12), 1e-12)
    return tau, rho


def make_input(kind: str, T: float) -> Callable[[np.ndarray], np.ndarray]:
    """Input signals ``pulse``, ``expdecay:tau`` and ``chirp``."""
    if kind == "pulse":
        return lambda t: np.where((t >= 0) & (t < 1.0), 1.0, 0.0)
    if kind.startswith("expdecay:"):
        tau = float(kind.split(":", 1)[1])
        if tau <= 0:
            raise ValueError("decay time constant must be positive")
        return lambda t: np.exp(-np.asarray(t) / tau)
    if kind == "chirp":
        f0, f1 = 0.01, 1.0
        return lambda t: np.sin(2 * math.pi * (f0 * t + (f1 - f0) * t * t / (2 * T))) * (t <= T)
    raise ValueError(f"unknown input {kind!r}")


def _as_function(r: Signal, dt: float) -> Callable:
    if callable(r):
        return r
    samples = np.asarray(r, dtype=float)
    grid = dt * np.arange(len(samples))
    return lambda t: np.interp(t, grid, samples, right=0.0)


def simulate_lure_batch(
    ss: StateSpace,
    phi: Callable[[np.ndarray], np.ndarray],
    r: Callable[[np.ndarray], np.ndarray],
    dt: float,
    T: float,
    batch: int,
    record: bool = False,
):
    """RK4 on ``x' = A x + B (phi(C x) + r(t))`` for ``batch`` loops at once.

    ``phi`` and ``r`` act row-wise on arrays of shape ``(batch,)``.  Returns the
    divergence flags and, when ``record`` is set, the sampled y, u, r arrays.
    """
    A, B, C = ss.A, ss.B[:, 0], ss.C[0]
    n = ss.order
    nsteps = int(math.floor(T / dt + 1e-9))
    x = np.zeros((batch, n))
    diverged = np.zeros(batch, dtype=bool)
    if record:
        ys = np.zeros((nsteps + 1, batch))
        us = np.zeros((nsteps + 1, batch))
        rs = np.zeros((nsteps + 1, batch))

    def f(t, x):
        y = x @ C
        u = phi(y) + r(t)
        return x @ A.T + np.outer(u, B), y, u

    last = nsteps
    for k in range(nsteps + 1):
        t = k * dt
        k1, y, u = f(t, x)
        if record:
            ys[k], us[k], rs[k] = y, u, r(t)
        bad = ~np.isfinite(y) | (np.abs(y) > DIVERGENCE_LEVEL)
        if np.any(bad):
            diverged |= bad
            x[bad] = 0.0
            if np.all(diverged):
                last = k
                break
        if k == nsteps:
            break
        k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)[0]
        k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)[0]
        k4 = f(t + dt, x + dt * k3)[0]
        with np.errstate(over="ignore", invalid="ignore"):
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x[diverged] = 0.0
    if record:
        return diverged, ys[: last + 1], us[: last + 1], rs[: last + 1]
    return diverged


def simulate_lure(
    G: TransferFunction,
    phi,
    r: Signal,
    dt: Optional[float] = None,
    T: Optional[float] = None,
) -> SimTrace:
    """Positive-feedback loop ``y = G u``, ``u = phi(y) + r`` from rest.

    Defaults: ``dt = 1e-3 * tau`` and ``T = 50 * tau`` with ``tau`` the slowest
    time constant of ``G``.  Stops early once ``|y| > 1e12``.
    """
    if not G.strictly_proper:
        raise ValueError("simulation needs a strictly proper plant")
    tau, _ = time_scales(G)
    dt = 1e-3 * tau if dt is None else dt
    T = 50.0 * tau if T is None else T
    if dt <= 0 or T <= 0:
        raise ValueError("need dt > 0 and T > 0")
    ss = tf_to_ss(G)
    r_fn = _as_function(r, dt)
    div, ys, us, rs = simulate_lure_batch(
        ss, lambda y: np.asarray(phi(y), dtype=float), lambda t: np.atleast_1d(r_fn(t)) * np.ones(1), dt, T, 1, record=True
    )
    y, u, rr = ys[:, 0], us[:, 0], rs[:, 0]
    t = dt * np.arange(len(y))
    with np.errstate(over="ignore", invalid="ignore"):
        l2y = np.sqrt(np.cumsum(y * y) * dt)
        l2u = np.sqrt(np.cumsum(u * u) * dt)
    return SimTrace(t=t, r=rr, u=u, y=y, l2_y=l2y, l2_u=l2u, diverged=bool(div[0]))


def _side_weights(terms, dt: float, n: int) -> np.ndarray:
    """Exact per-bin integrals of a one-sided exponential kernel."""
    j = np.arange(n)
    w = np.zeros(n)
    for k, a in terms:
        w += (k / a) * np.exp(-a * dt * j) * (-np.expm1(-a * dt))
    return w


def filter_multiplier(m: MultiplierBasis, x, dt: float) -> np.ndarray:
    """``(M x)(t) = x(t) - (h * x)(t)`` on the sample grid of ``x``.

    The kernel is binned with exact per-bin integrals, so the discrete taps
    sum to ||H||_1 in absolute value (for single-signed sides).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    out = x.copy()
    if m.causal:
        wc = _side_weights(m.causal, dt, n)
        out -= np.convolve(x, wc)[:n]
    if m.anticausal:
        wa = _side_weights(m.anticausal, dt, n)
        out -= np.convolve(x[::-1], wa)[:n][::-1]
    return out


def td_iqc_value(m: MultiplierBasis, phi, x, dt: float) -> float:
    """Discretized ``integral (M x)(t) phi(x(t)) dt`` for a finite-support signal."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return 0.0
    return float(np.dot(filter_multiplier(m, x, dt), phi(x))) * dt


def random_slope_nonlinearity(alpha: float, odd: bool = False, seed=None) -> NonlinearitySpec:
    """Random piecewise-linear member of the slope class ``[0, alpha]``."""
    tag = "slope_odd" if odd else "slope"
    if alpha <= 0:
        return NonlinearitySpec(tag, LinearGain(0.0), alpha=0.0)
    rng = np.random.default_rng(seed)
    if odd:
        q = int(rng.integers(3, 11))
        pos = np.sort(10.0 ** rng.uniform(-2, 1, q))
        pos = np.unique(pos)
        breaks = np.concatenate((-pos[::-1], pos))
        outer = rng.uniform(0.0, alpha, len(pos))
        centre = rng.uniform(0.0, alpha)
        slopes = np.concatenate((outer[::-1], [centre], outer))
    else:
        nb = int(rng.integers(5, 21))
        mags = 10.0 ** rng.uniform(-2, 1, nb)
        breaks = np.unique(np.sort(mags * rng.choice([-1.0, 1.0], nb)))
        slopes = rng.uniform(0.0, alpha, len(breaks) + 1)
    return NonlinearitySpec(tag, PiecewiseLinear.from_slopes(breaks, slopes), alpha=alpha)


class _StackedPWL:
    """Row-wise evaluation of one piecewise-linear map per batch member."""

    def __init__(self, shapes: Sequence[PiecewiseLinear]):
        K = max(len(s.xs) for s in shapes)
        B = len(shapes)
        self.x0 = np.zeros(B)
        self.y0 = np.zeros(B)
        self.s0 = np.zeros(B)
        self.knots = np.zeros((B, K))
        self.dslope = np.zeros((B, K))
        for i, s in enumerate(shapes):
            xs, ys = np.asarray(s.xs), np.asarray(s.ys)
            sl = np.diff(ys) / np.diff(xs)
            self.x0[i], self.y0[i], self.s0[i] = xs[0], ys[0], sl[0]
            inner = xs[1:-1]
            self.knots[i, : len(inner)] = inner
            self.dslope[i, : len(inner)] = np.diff(sl)

    def __call__(self, y):
        y = np.asarray(y)
        lin = self.y0 + self.s0 * (y - self.x0)
        return lin + np.sum(self.dslope * np.maximum(y[:, None] - self.knots, 0.0), axis=1)


@dataclass
class FalsifyReport:
    trials: int
    diverged: list = field(default_factory=list)
    dt: float = 0.0
    T: float = 0.0

    @property
    def n_diverged(self) -> int:
        return len(self.diverged)


def falsify(
    G: TransferFunction,
    alpha: float,
    trials: int,
    seed=0,
    odd: bool = False,
    dt: Optional[float] = None,
    T: Optional[float] = None,
) -> FalsifyReport:
    """Simulate ``trials`` random slope-``alpha`` loops driven by decaying inputs.

    All trials are integrated together; the step is chosen from the open and
    extreme linear closed loops so that RK4 stays numerically stable.
    """
    if not G.strictly_proper:
        raise ValueError("simulation needs a strictly proper plant")
    if trials <= 0:
        return FalsifyReport(trials=0)
    ss = tf_to_ss(G)
    tau, _ = time_scales(G)
    rho = max(
        spectral_radius(ss.A + k * alpha * (ss.B @ ss.C)) for k in (0.0, 0.5, 1.0)
    )
    if dt is None:
        dt = min(1e-2 * tau, 0.5 / max(rho, 1e-12))
    if T is None:
        T = 50.0 * tau
    rng = np.random.default_rng(seed)
    specs = [random_slope_nonlinearity(alpha, odd, rng.integers(2**32)) for _ in range(trials)]
    shapes = [s.shape if isinstance(s.shape, PiecewiseLinear) else PiecewiseLinear((-1.0, 1.0), (0.0, 0.0)) for s in specs]
    phi = _StackedPWL(shapes)
    amp = 10.0 ** rng.uniform(-1, 2, trials)
    decay = tau * rng.uniform(0.05, 1.0, trials)
    scale = 1.0 / tau if rho == 0 else math.sqrt(rho / tau)
    freq = scale * 10.0 ** rng.uniform(-1, 1, trials)
    phase = rng.uniform(0, 2 * math.pi, trials)
    r = lambda t: amp * np.exp(-t / decay) * np.cos(freq * t + phase)
    div = simulate_lure_batch(ss, phi, r, dt, T, trials)
    return FalsifyReport(trials=trials, diverged=[int(i) for i in np.flatnonzero(div)], dt=dt, T=T)
