"""Multiplier search and slope bisection.

The fixed-pole search is a linear program in the multiplier gains: the
frequency condition is affine in the gains at every grid point and, with
nonnegative gains, the L1 condition is a single linear inequality.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ._workers import worker_count
from .iqc import (
    Certificate,
    FrequencyGrid,
    default_epsilon,
    fdi_margin,
    log_grid,
    plant_digest,
    require_stable,
    tail_value,
    _refined,
)
from .lti import TransferFunction, freq_response
from .multiplier import (
    MultiplierBasis,
    l1_norm_details,
    make_multiplier,
    multiplier_to_dict,
    multiplier_valid_for_class,
)
from .nonlin import CLASS_TAGS, SLOPE_CLASSES
from .simplex import linprog_simplex

__all__ = [
    "SearchConfig",
    "LPOutcome",
    "GridScanResult",
    "BisectionResult",
    "NoCertifiableSlope",
    "default_poles",
    "circle_baseline",
    "certify",
    "lp_feasibility",
    "pole_grid_search",
    "bisect_alpha",
    "replay_certificate",
]

BASE_POLES = (0.1, 0.3, 1.0, 3.0, 10.0)
ALPHA_CAP = 1e8


class NoCertifiableSlope(RuntimeError):
    pass


def pole_scale(G: TransferFunction) -> float:
    """Geometric mean of the pole magnitudes, read off the monic denominator."""
    n = G.order
    if n == 0:
        return 1.0
    return abs(G.den[-1]) ** (1.0 / n) or 1.0


def default_poles(G: TransferFunction) -> tuple:
    s = pole_scale(G)
    return tuple(p * s for p in BASE_POLES)


@dataclass(frozen=True)
class SearchConfig:
    causal_poles: tuple = ()
    anticausal_poles: tuple = ()
    grid: FrequencyGrid = field(default_factory=log_grid)
    class_tag: str = "slope"
    max_iter: int = 5000
    tol: float = 1e-3

    def __post_init__(self):
        if self.class_tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.class_tag!r}")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if any(p <= 0 for p in self.causal_poles + self.anticausal_poles):
            raise ValueError("poles must be strictly positive")

    @classmethod
    def for_plant(cls, G: TransferFunction, **kw) -> "SearchConfig":
        poles = default_poles(G)
        kw.setdefault("causal_poles", poles)
        kw.setdefault("anticausal_poles", poles)
        return cls(**kw)

    def describe(self) -> dict:
        return {
            "causal_poles": list(self.causal_poles),
            "anticausal_poles": list(self.anticausal_poles),
            "max_iter": self.max_iter,
            "tol": self.tol,
        }


def _max_re(G: TransferFunction, grid: FrequencyGrid) -> tuple[float, float]:
    w = grid.omegas
    re = np.real(freq_response(G, w))
    i = int(np.argmax(re))
    best, wb = float(re[i]), float(w[i])
    if grid.refine:
        wr = _refined(grid, wb)
        rr = np.real(freq_response(G, wr))
        j = int(np.argmax(rr))
        if rr[j] > best:
            best, wb = float(rr[j]), float(wr[j])
    if grid.includes_zero:
        r0 = freq_response(G, 0.0).real
        if r0 > best:
            best, wb = r0, 0.0
    if grid.tail_limit_checked and G.high_freq_gain > best:
        best, wb = G.high_freq_gain, math.inf
    return best, wb


def circle_baseline(G: TransferFunction, grid: Optional[FrequencyGrid] = None) -> float:
    """Largest slope certified by M = 1: ``1 / max Re G(jw)``, ``inf`` if Re G <= 0."""
    require_stable(G)
    best, _ = _max_re(G, grid or log_grid())
    return math.inf if best <= 0 else 1.0 / best


def certify(
    G: TransferFunction,
    alpha: Optional[float],
    m: MultiplierBasis,
    class_tag: str,
    grid: Optional[FrequencyGrid] = None,
    epsilon: Optional[float] = None,
    search: Optional[dict] = None,
) -> Certificate:
    """Validity of the multiplier for the class plus the gridded frequency test."""
    require_stable(G)
    grid = grid or log_grid()
    if class_tag in SLOPE_CLASSES and (alpha is None or alpha <= 0):
        raise ValueError("alpha must be positive for slope classes")
    validity = multiplier_valid_for_class(m, class_tag)
    worst, w_worst = fdi_margin(G, m, alpha, class_tag, grid)
    eps = default_epsilon(G, alpha or 1.0, grid) if epsilon is None else epsilon
    reasons = list(validity.reasons)
    if worst > -eps:
        where = "w -> inf" if math.isinf(w_worst) else f"w = {w_worst:.6g}"
        reasons.append(f"frequency condition fails: margin {worst:.6g} > -{eps:.3g} at {where}")
    l1 = l1_norm_details(m)
    return Certificate(
        plant=G.to_dict(),
        plant_digest=plant_digest(G),
        class_tag=class_tag,
        alpha=alpha,
        multiplier=multiplier_to_dict(m),
        grid=grid.describe(),
        worst_margin=worst,
        worst_omega=w_worst,
        l1=float(l1.value),
        l1_bound=float(l1.bound),
        impulse_nonnegative=validity.nonnegative,
        epsilon=eps,
        verdict="certified" if not reasons else "not certified",
        reasons=reasons,
        search=search,
    )


def replay_certificate(cert: Certificate) -> Certificate:
    """Re-run :func:`certify` on the inputs stored in a certificate."""
    from .lti import validate_tf

    G = validate_tf(cert.plant["num"], cert.plant["den"])
    m = make_multiplier(cert.multiplier["causal"], cert.multiplier["anticausal"])
    grid = FrequencyGrid.from_description(cert.grid)
    return certify(G, cert.alpha, m, cert.class_tag, grid, epsilon=cert.epsilon, search=cert.search)


@dataclass(frozen=True)
class LPOutcome:
    verdict: str  # feasible | infeasible | inconclusive
    multiplier: Optional[MultiplierBasis]
    worst_margin: float
    epsilon: float
    iterations: int

    @property
    def feasible(self) -> bool:
        return self.verdict == "feasible"


def _basis_columns(G, alpha, class_tag, w, causal, anticausal):
    """Constant part and per-gain slopes of the quadratic form (affine in the gains)."""
    g = freq_response(G, w)
    jw = 1j * w
    if class_tag in SLOPE_CLASSES:
        lin = alpha * g - 1.0
    else:
        lin = g
    c0 = 2.0 * np.real(lin)
    cols = [2.0 * np.real(lin / (a + jw)) for a in causal]
    cols += [2.0 * np.real(lin / (b - jw)) for b in anticausal]
    return c0, np.column_stack(cols)


def lp_feasibility(G: TransferFunction, alpha: Optional[float], config: SearchConfig) -> LPOutcome:
    """Minimize the worst grid value of the frequency condition over nonnegative gains.

    Feasible iff the optimum is ``<= -eps``.  Uses the base grid plus w = 0 and
    the tail limit (no refinement; the caller certifies the result separately).
    """
    require_stable(G)
    causal, anti = tuple(config.causal_poles), tuple(config.anticausal_poles)
    if not causal and not anti:
        raise ValueError("empty pole set")
    grid = config.grid
    a = alpha if alpha is not None else 1.0
    w = grid.omegas
    if grid.includes_zero:
        w = np.concatenate(([0.0], w))
    c0, D = _basis_columns(G, a, config.class_tag, w, causal, anti)
    tail = tail_value(G, a, config.class_tag) if grid.tail_limit_checked else -math.inf
    T0 = max(float(c0.max()), tail)
    p = D.shape[1]
    # variables [k_1..k_p, s] with t = T0 - s; maximize s
    rows = [np.hstack((-D, np.ones((len(w), 1))))]
    rhs = [T0 - c0]
    if math.isfinite(tail):
        rows.append(np.hstack((np.zeros((1, p)), [[1.0]])))
        rhs.append([T0 - tail])
    inv = np.array([1.0 / x for x in causal + anti])
    rows.append(np.hstack((inv[None, :], [[0.0]])))
    rhs.append([1.0])
    A = np.vstack(rows)
    b = np.concatenate([np.ravel(r) for r in rhs])
    # guard against tiny negative right-hand sides from rounding
    b = np.maximum(b, 0.0)
    cost = np.zeros(p + 1)
    cost[-1] = -1.0
    res = linprog_simplex(cost, A, b, max_iter=config.max_iter)
    eps = default_epsilon(G, a, grid)
    if res.status == "iteration_limit":
        return LPOutcome("inconclusive", None, math.nan, eps, res.nit)
    if res.status != "optimal":
        raise ArithmeticError(f"multiplier LP ended with status {res.status}")
    k = np.maximum(res.x[:p], 0.0)
    # keep the L1 sum at or below one despite rounding
    l1 = float(inv @ k)
    if l1 > 1.0:
        k = k / l1
    m = make_multiplier(
        [(ki, ai) for ki, ai in zip(k[: len(causal)], causal) if ki > 0],
        [(li, bi) for li, bi in zip(k[len(causal):], anti) if li > 0],
    )
    t = T0 - float(res.x[-1])
    return LPOutcome("feasible" if t <= -eps else "infeasible", m, t, eps, res.nit)


@dataclass(frozen=True)
class GridScanResult:
    multiplier: MultiplierBasis
    margin: float
    side: str
    pole: float


def pole_grid_search(
    G: TransferFunction,
    alpha: Optional[float],
    class_tag: str,
    grid: Optional[FrequencyGrid] = None,
    poles: Optional[Sequence[float]] = None,
    gains: Sequence[float] = tuple(np.linspace(0.1, 1.0, 10)),
    sides: Sequence[str] = ("causal", "anticausal"),
) -> GridScanResult:
    """Brute-force scan over single-term multipliers with ||H||_1 = gain <= 1."""
    require_stable(G)
    grid = grid or log_grid()
    poles = np.geomspace(1e-2, 1e2, 25) if poles is None else poles
    cands = []
    for side in sides:
        if side not in ("causal", "anticausal"):
            raise ValueError(f"unknown side {side!r}")
        for p in poles:
            for g in gains:
                term = [(float(g) * float(p), float(p))]
                m = make_multiplier(term, ()) if side == "causal" else make_multiplier((), term)
                cands.append((side, float(p), m))

    def score(c):
        return fdi_margin(G, c[2], alpha, class_tag, grid)[0]

    with ThreadPoolExecutor(max_workers=worker_count()) as ex:
        margins = list(ex.map(score, cands))
    i = int(np.argmin(margins))
    side, p, m = cands[i]
    return GridScanResult(m, float(margins[i]), side, p)


@dataclass
class BisectionResult:
    alpha_star: float
    certificate: Certificate
    trace: list
    capped: bool = False


Strategy = Union[str, Callable[[float], Certificate]]


def _strategy_fn(G, strategy: Strategy, config: SearchConfig) -> Callable[[float], Certificate]:
    if callable(strategy):
        return strategy
    identity = make_multiplier()
    if strategy == "circle":
        return lambda a: certify(G, a, identity, config.class_tag, config.grid)
    if strategy == "zf":
        if not config.causal_poles and not config.anticausal_poles:
            raise ValueError("empty pole set")

        def zf(a):
            base = certify(G, a, identity, config.class_tag, config.grid)
            if base.certified:
                return base
            lp = lp_feasibility(G, a, config)
            info = config.describe() | {"lp_verdict": lp.verdict, "lp_margin": lp.worst_margin}
            if lp.multiplier is None:
                base.search = info
                return base
            return certify(G, a, lp.multiplier, config.class_tag, config.grid, search=info)

        return zf
    raise ValueError(f"unknown strategy {strategy!r}")


def bisect_alpha(
    G: TransferFunction,
    alpha_lo: Optional[float] = None,
    alpha_hi: Optional[float] = None,
    strategy: Strategy = "zf",
    config: Optional[SearchConfig] = None,
) -> BisectionResult:
    """Largest slope found certifiable by ``strategy`` (bisection on the verdict).

    Certifiability need not be monotone in alpha for a searched family, so the
    result is the largest value found; the full pass/fail trace is kept.
    """
    require_stable(G)
    config = config or SearchConfig.for_plant(G)
    pred = _strategy_fn(G, strategy, config)
    trace = []

    def check(a):
        cert = pred(a)
        trace.append((a, cert.certified))
        return cert

    if alpha_lo is None:
        ac = circle_baseline(G, config.grid)
        alpha_lo = 1.0 if math.isinf(ac) else ac * (1.0 - 1e-3)
    if alpha_hi is None:
        alpha_hi = 2.0 * alpha_lo
    if alpha_lo <= 0 or alpha_hi < alpha_lo:
        raise ValueError("need 0 < alpha_lo <= alpha_hi")

    lo_cert = check(alpha_lo)
    if alpha_lo == alpha_hi:
        if not lo_cert.certified:
            raise NoCertifiableSlope("no certifiable slope found")
        return BisectionResult(alpha_lo, lo_cert, trace)
    while not lo_cert.certified:
        alpha_hi = alpha_lo
        alpha_lo /= 4.0
        if alpha_lo < 1e-8:
            raise NoCertifiableSlope("no certifiable slope found")
        lo_cert = check(alpha_lo)
    if alpha_hi > alpha_lo:
        hi_cert = check(alpha_hi)
        while hi_cert.certified:
            alpha_lo, lo_cert = alpha_hi, hi_cert
            if alpha_lo >= ALPHA_CAP:
                return BisectionResult(alpha_lo, lo_cert, trace, capped=True)
            alpha_hi = min(2.0 * alpha_hi, ALPHA_CAP)
            hi_cert = check(alpha_hi)
    while alpha_hi > alpha_lo * (1.0 + config.tol):
        mid = 0.5 * (alpha_lo + alpha_hi)
        cert = check(mid)
        if cert.certified:
            alpha_lo, lo_cert = mid, cert
        else:
            alpha_hi = mid
    return BisectionResult(alpha_lo, lo_cert, trace)
