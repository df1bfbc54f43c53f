"""Zames-Falb IQC matrices and the gridded frequency-domain stability test.

Sign convention: the plant is in positive feedback with the nonlinearity
(``y = G u``, ``u = phi(y) + r``).  The loop is certified when

    [G(jw); 1]^* Pi(jw) [G(jw); 1] <= -eps   for every w,

which for the slope-restricted multiplier reduces to ``2 Re[M (alpha G - 1)]``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .lti import TransferFunction, freq_response, is_hurwitz
from .multiplier import MultiplierBasis, multiplier_freq_response
from .nonlin import CLASS_TAGS, SLOPE_CLASSES

__all__ = [
    "UnstablePlantError",
    "IqcMatrix",
    "FrequencyGrid",
    "Certificate",
    "log_grid",
    "parse_grid",
    "pi_monotone",
    "pi_slope",
    "loopshift_congruence",
    "fdi_value",
    "fdi_values",
    "fdi_margin",
    "default_epsilon",
    "parseval_check",
    "plant_digest",
]

TOOL_VERSION = "0.1.0"


class UnstablePlantError(ValueError):
    """The plant is not in RH-infinity, so the frequency test does not apply."""


def require_stable(G: TransferFunction) -> None:
    if not is_hurwitz(G):
        raise UnstablePlantError("plant not Hurwitz")


@dataclass(frozen=True)
class IqcMatrix:
    value: np.ndarray
    tag: str

    def __post_init__(self):
        v = np.asarray(self.value, dtype=complex)
        if v.shape != (2, 2):
            raise ValueError("IQC matrix must be 2x2")
        herm = np.max(np.abs(v - v.conj().T))
        assert herm <= 1e-14 * max(1.0, np.max(np.abs(v))), "IQC matrix not Hermitian"
        object.__setattr__(self, "value", v)

    def __mul__(self, c: float) -> "IqcMatrix":
        return IqcMatrix(c * self.value, self.tag)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing positive frequencies; w = 0 and the w -> inf limit are flags."""

    omegas: np.ndarray
    includes_zero: bool = True
    tail_limit_checked: bool = True
    refine: bool = True

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float)
        if w.ndim != 1 or len(w) == 0:
            raise ValueError("grid needs at least one frequency")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("grid frequencies must be finite and positive")
        if np.any(np.diff(w) <= 0):
            raise ValueError("grid frequencies must be strictly increasing")
        object.__setattr__(self, "omegas", w)

    def __len__(self):
        return len(self.omegas)

    def describe(self) -> dict:
        w = self.omegas
        return {
            "wmin": float(w[0]),
            "wmax": float(w[-1]),
            "n": len(w),
            "spacing": "log",
            "includes_zero": self.includes_zero,
            "tail_limit_checked": self.tail_limit_checked,
            "refine": self.refine,
        }

    @classmethod
    def from_description(cls, d: dict) -> "FrequencyGrid":
        g = log_grid(d["wmin"], d["wmax"], d["n"])
        return cls(g.omegas, d["includes_zero"], d["tail_limit_checked"], d.get("refine", True))


def log_grid(wmin: float = 1e-3, wmax: float = 1e4, n: int = 2000, refine: bool = True) -> FrequencyGrid:
    if not (0 < wmin < wmax) or n < 2:
        raise ValueError("need 0 < wmin < wmax and n >= 2")
    return FrequencyGrid(np.geomspace(wmin, wmax, int(n)), refine=refine)


def parse_grid(text: str) -> FrequencyGrid:
    """Parse ``wmin:wmax:n``."""
    try:
        a, b, n = text.split(":")
        return log_grid(float(a), float(b), int(n))
    except ValueError as exc:
        raise ValueError(f"bad grid {text!r}: {exc}") from None


def pi_monotone(m: MultiplierBasis, omega: float) -> IqcMatrix:
    """``[[0, M^*], [M, 0]]``."""
    M = multiplier_freq_response(m, omega)
    return IqcMatrix(np.array([[0.0, np.conj(M)], [M, 0.0]]), "monotone_form")


def pi_slope(m: MultiplierBasis, alpha: float, omega: float) -> IqcMatrix:
    """``[[0, alpha M^*], [alpha M, -M^* - M]]``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    M = multiplier_freq_response(m, omega)
    return IqcMatrix(
        np.array([[0.0, alpha * np.conj(M)], [alpha * M, -2.0 * M.real]]), "slope_form"
    )


def loopshift_congruence(pi: IqcMatrix, alpha: float) -> IqcMatrix:
    """``alpha * (X^-1)^H Pi X^-1`` with ``X = [[1, 1/alpha], [0, 1]]``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    Xinv = np.array([[1.0, -1.0 / alpha], [0.0, 1.0]])
    out = alpha * (Xinv.conj().T @ pi.value @ Xinv)
    # restore exact Hermitian symmetry lost to rounding
    out = 0.5 * (out + out.conj().T)
    return IqcMatrix(out, "slope_form")


def _quad_form(G, p11, p12, p21, p22):
    q = np.conj(G) * p11 * G + np.conj(G) * p12 + p21 * G + p22
    return q


def fdi_value(G: TransferFunction, pi: IqcMatrix, omega: float) -> float:
    """``[G(jw); 1]^H Pi [G(jw); 1]``; the vanishing imaginary part is checked and dropped."""
    g = freq_response(G, omega)
    P = pi.value
    q = _quad_form(g, P[0, 0], P[0, 1], P[1, 0], P[1, 1])
    scale = 1.0 + abs(g) ** 2 * abs(P[0, 0]) + 2 * abs(g) * abs(P[0, 1]) + abs(P[1, 1])
    if abs(q.imag) > 1e-12 * scale:
        raise ArithmeticError(f"quadratic form has imaginary residue {q.imag:g}")
    return float(q.real)


def _check_class(class_tag: str, alpha: Optional[float]) -> None:
    if class_tag not in CLASS_TAGS:
        raise ValueError(f"unknown class tag {class_tag!r}")
    if class_tag in SLOPE_CLASSES and (alpha is None or alpha <= 0):
        raise ValueError("alpha must be positive")


def fdi_values(G: TransferFunction, m: MultiplierBasis, alpha: float, class_tag: str, omegas) -> np.ndarray:
    """Vectorized quadratic form at many finite frequencies."""
    w = np.asarray(omegas, dtype=float)
    g = freq_response(G, w)
    M = multiplier_freq_response(m, w)
    z = np.zeros_like(M)
    if class_tag in SLOPE_CLASSES:
        q = _quad_form(g, z, alpha * np.conj(M), alpha * M, -2.0 * M.real)
    else:
        q = _quad_form(g, z, np.conj(M), M, z)
    return np.real(q)


def tail_value(G: TransferFunction, alpha: float, class_tag: str) -> float:
    """Limit of the quadratic form as w -> inf (uses M(inf) = 1)."""
    ginf = G.high_freq_gain
    if class_tag in SLOPE_CLASSES:
        return 2.0 * (alpha * ginf - 1.0)
    return 2.0 * ginf


def default_epsilon(G: TransferFunction, alpha: float, grid: FrequencyGrid) -> float:
    """``1e-6 * (1 + alpha * max|G|)`` over the grid and w = 0."""
    gmax = float(np.max(np.abs(freq_response(G, grid.omegas))))
    gmax = max(gmax, abs(freq_response(G, 0.0)), abs(G.high_freq_gain))
    return 1e-6 * (1.0 + alpha * gmax)


def _refined(grid: FrequencyGrid, w_star: float) -> np.ndarray:
    w = grid.omegas
    decades = max(math.log10(w[-1] / w[0]), 1e-9)
    per_decade = len(w) / decades
    return np.geomspace(w_star / math.sqrt(10.0), w_star * math.sqrt(10.0), int(math.ceil(10 * per_decade)) + 1)


def fdi_margin(
    G: TransferFunction,
    m: MultiplierBasis,
    alpha: Optional[float],
    class_tag: str,
    grid: FrequencyGrid,
) -> tuple[float, float]:
    """Worst (largest) value of the quadratic form and where it occurs.

    The grid is augmented with w = 0, the w -> inf limit (reported as
    ``inf``) and one round of 10x refinement in a decade around the argmax.
    """
    require_stable(G)
    _check_class(class_tag, alpha)
    a = alpha if alpha is not None else 1.0
    w = grid.omegas
    vals = fdi_values(G, m, a, class_tag, w)
    i = int(np.argmax(vals))
    worst, w_worst = float(vals[i]), float(w[i])
    if grid.refine:
        wr = _refined(grid, w_worst)
        vr = fdi_values(G, m, a, class_tag, wr)
        j = int(np.argmax(vr))
        if vr[j] > worst:
            worst, w_worst = float(vr[j]), float(wr[j])
    if grid.includes_zero:
        v0 = float(fdi_values(G, m, a, class_tag, [0.0])[0])
        if v0 > worst:
            worst, w_worst = v0, 0.0
    if grid.tail_limit_checked:
        vt = tail_value(G, a, class_tag)
        if vt > worst:
            worst, w_worst = vt, math.inf
    return worst, w_worst


def parseval_check(x, y, dt: float) -> tuple[float, float]:
    """Time-domain and frequency-domain inner products of two sampled signals."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("signals must have equal length")
    time_ip = float(np.dot(x, y)) * dt
    n = 2 * len(x)
    X = dt * np.fft.fft(x, n)
    Y = dt * np.fft.fft(y, n)
    dw = 2.0 * math.pi / (n * dt)
    freq_ip = float(np.real(np.sum(np.conj(X) * Y)) * dw / (2.0 * math.pi))
    return time_ip, freq_ip


def plant_digest(G: TransferFunction) -> str:
    payload = json.dumps({"num": list(G.num), "den": list(G.den)}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class Certificate:
    """Replayable record of one certification attempt."""

    plant: dict
    plant_digest: str
    class_tag: str
    alpha: Optional[float]
    multiplier: dict
    grid: dict
    worst_margin: float
    worst_omega: float
    l1: float
    l1_bound: float
    impulse_nonnegative: bool
    epsilon: float
    verdict: str
    reasons: list = field(default_factory=list)
    search: Optional[dict] = None
    tool_version: str = TOOL_VERSION
    theorem_note: str = (
        "frequency-domain IQC test without the homotopy hypothesis; "
        "'for all w' discretized on the recorded grid with w=0, tail limit and local refinement"
    )

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_omega"] = _encode_float(self.worst_omega)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        d = dict(d)
        d["worst_omega"] = _decode_float(d["worst_omega"])
        return cls(**d)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "Certificate":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _encode_float(x: float):
    return "inf" if math.isinf(x) else x


def _decode_float(x):
    return math.inf if x == "inf" else float(x)
