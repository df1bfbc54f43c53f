"""Zames-Falb multipliers ``M = 1 - H`` built from first-order exponential terms.

The causal part contributes ``k / (s + a)`` (impulse ``k exp(-a t)`` for t > 0)
and the anticausal part contributes ``l / (b - s)`` (impulse ``l exp(b t)`` for
t < 0).  Both pole sets are strictly positive, so ``H`` has no poles on the
imaginary axis and ``M(inf) = 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, optimize

from .nonlin import CLASS_TAGS, ODD_CLASSES

__all__ = [
    "MultiplierBasis",
    "L1Norm",
    "ValidityReport",
    "make_multiplier",
    "multiplier_freq_response",
    "impulse_values",
    "l1_norm_exact",
    "l1_norm_details",
    "impulse_nonnegative",
    "multiplier_valid_for_class",
    "load_multiplier",
    "multiplier_to_dict",
]

NEG_TOL = 1e-12


@dataclass(frozen=True)
class MultiplierBasis:
    causal: tuple = ()
    anticausal: tuple = ()

    @property
    def is_identity(self) -> bool:
        return not self.causal and not self.anticausal

    def __call__(self, omega):
        return multiplier_freq_response(self, omega)

    def negated(self) -> "MultiplierBasis":
        return MultiplierBasis(
            tuple((-k, a) for k, a in self.causal),
            tuple((-l, b) for l, b in self.anticausal),
        )

    def time_reversed(self) -> "MultiplierBasis":
        """Basis with impulse response h(-t)."""
        return MultiplierBasis(self.anticausal, self.causal)


def _merge(terms: Iterable[Sequence[float]], side: str) -> tuple:
    acc: dict = {}
    for term in terms:
        k, p = (float(v) for v in term)
        if not (math.isfinite(k) and math.isfinite(p)):
            raise ValueError(f"non-finite {side} term {term!r}")
        if p <= 0:
            raise ValueError(f"{side} pole must be strictly positive, got {p:g}")
        acc[p] = acc.get(p, 0.0) + k
    return tuple((k, p) for p, k in sorted(acc.items()) if k != 0.0)


def make_multiplier(causal=(), anticausal=()) -> MultiplierBasis:
    """Validate gains/poles; duplicate poles are merged by summing their gains."""
    return MultiplierBasis(_merge(causal, "causal"), _merge(anticausal, "anticausal"))


def multiplier_freq_response(m: MultiplierBasis, omega):
    """``1 - sum k/(a + jw) - sum l/(b - jw)``."""
    jw = 1j * np.asarray(omega, dtype=float)
    out = np.ones_like(jw)
    for k, a in m.causal:
        out = out - k / (a + jw)
    for l, b in m.anticausal:
        out = out - l / (b - jw)
    return complex(out) if np.ndim(out) == 0 else out


def _side_values(terms, s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    for k, a in terms:
        out = out + k * np.exp(-a * s)
    return out


def impulse_values(m: MultiplierBasis, t):
    """h(t); at t = 0 the causal limit h(0+) is returned."""
    t = np.asarray(t, dtype=float)
    pos = _side_values(m.causal, np.where(t >= 0, t, 0.0))
    neg = _side_values(m.anticausal, np.where(t < 0, -t, 0.0))
    return np.where(t >= 0, pos, neg)


@dataclass(frozen=True)
class L1Norm:
    """``bound`` is the closed form; ``quadrature``/``error`` are set for mixed-sign sides."""

    value: float
    bound: float
    quadrature: float
    error: float
    exact: bool


def _single_sign(terms) -> bool:
    return all(k >= 0 for k, _ in terms) or all(k <= 0 for k, _ in terms)


def _side_quadrature(terms) -> tuple[float, float]:
    amin = min(a for _, a in terms)
    amax = max(a for _, a in terms)
    T = 60.0 / amin
    f = lambda s: abs(sum(k * math.exp(-a * s) for k, a in terms))
    # split so that the fast transient near zero is resolved
    edges = [0.0] + [e for e in (10.0 / amax, 1.0 / amin, 10.0 / amin) if 0 < e < T] + [T]
    edges = sorted(set(edges))
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(f, lo, hi, limit=400, epsabs=1e-14, epsrel=1e-12)
        total += val
        err += e
    tail = sum(abs(k) / a * math.exp(-a * T) for k, a in terms)
    return total, err + tail


def l1_norm_details(m: MultiplierBasis) -> L1Norm:
    bound = sum(abs(k) / a for k, a in m.causal) + sum(abs(l) / b for l, b in m.anticausal)
    quad = err = 0.0
    exact = True
    for terms in (m.causal, m.anticausal):
        if not terms:
            continue
        if _single_sign(terms):
            quad += sum(abs(k) / a for k, a in terms)
        else:
            exact = False
            q, e = _side_quadrature(terms)
            quad += q
            err += e
    value = bound if exact else min(bound, quad + err)
    return L1Norm(value=value, bound=bound, quadrature=quad, error=err, exact=exact)


def l1_norm_exact(m: MultiplierBasis) -> float:
    """||H||_1: closed form when each side is single-signed, else min(bound, quadrature + error)."""
    return l1_norm_details(m).value


def _side_nonnegative(terms) -> bool:
    if not terms:
        return True
    # slowest pole governs the sign as t -> infinity
    if terms[0][0] < 0:
        return False
    if all(k >= 0 for k, _ in terms):
        return True
    amin, amax = terms[0][1], terms[-1][1]
    T = 40.0 / amin
    s = np.unique(
        np.concatenate(
            (np.linspace(0.0, T, 2000), np.geomspace(1e-6 / amax, T, 2000))
        )
    )
    h = _side_values(terms, s)
    if h.min() < -NEG_TOL:
        return False
    # refine every sampled local minimum between its neighbours
    idx = np.flatnonzero((h[1:-1] <= h[:-2]) & (h[1:-1] <= h[2:])) + 1
    f = lambda x: float(_side_values(terms, x))
    for i in idx:
        res = optimize.minimize_scalar(
            f, bounds=(s[i - 1], s[i + 1]), method="bounded", options={"xatol": 1e-12 * T}
        )
        if res.fun < -NEG_TOL:
            return False
    return True


def impulse_nonnegative(m: MultiplierBasis) -> bool:
    """True iff h(t) >= -1e-12 everywhere (dense sampling plus tail sign rule)."""
    return _side_nonnegative(m.causal) and _side_nonnegative(m.anticausal)


@dataclass(frozen=True)
class ValidityReport:
    passed: bool
    l1: float
    nonnegative: bool
    reasons: tuple

    def __bool__(self):
        return self.passed


def multiplier_valid_for_class(m: MultiplierBasis, class_tag: str) -> ValidityReport:
    """L1 condition for every class; impulse positivity only for the non-odd classes."""
    if class_tag not in CLASS_TAGS:
        raise ValueError(f"unknown class tag {class_tag!r}")
    l1 = l1_norm_exact(m)
    nonneg = impulse_nonnegative(m)
    reasons = []
    if l1 > 1.0 + 1e-12:
        reasons.append(f"L1 = {l1:g} > 1")
    if class_tag not in ODD_CLASSES and not nonneg:
        reasons.append("impulse response h(t) takes negative values")
    return ValidityReport(passed=not reasons, l1=l1, nonnegative=nonneg, reasons=tuple(reasons))


def multiplier_to_dict(m: MultiplierBasis) -> dict:
    return {
        "causal": [[k, a] for k, a in m.causal],
        "anticausal": [[l, b] for l, b in m.anticausal],
    }


def load_multiplier(path) -> MultiplierBasis:
    """Read ``{"causal": [[k, a], ...], "anticausal": [[l, b], ...]}``."""
    with open(path) as fh:
        data = json.load(fh)
    return make_multiplier(data.get("causal", []), data.get("anticausal", []))
