"""Real-rational SISO LTI systems.

Transfer functions are stored as coefficient tuples in descending powers of
``s`` with a monic denominator.  Stability is decided with a Routh table and
time responses come from matrix exponentials, so no polynomial root finder is
used anywhere in the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

__all__ = [
    "TransferFunction",
    "StateSpace",
    "ImpulseResponse",
    "validate_tf",
    "routh_first_column",
    "is_hurwitz",
    "freq_response",
    "tf_to_ss",
    "expm",
    "impulse_response",
    "spectral_abscissa",
    "spectral_radius",
    "load_plant",
    "plant_to_json",
]

#: Replacement for an exactly-zero Routh pivot.
ROUTH_EPS = 1e-30


@dataclass(frozen=True)
class TransferFunction:
    """SISO transfer function ``num(s)/den(s)``.

    Build these with :func:`validate_tf`; the constructor does not normalize.
    """

    num: tuple
    den: tuple

    @property
    def order(self) -> int:
        return len(self.den) - 1

    @property
    def relative_degree(self) -> int:
        return len(self.den) - len(self.num)

    @property
    def strictly_proper(self) -> bool:
        return self.relative_degree > 0

    @property
    def high_freq_gain(self) -> float:
        """Limit of G(jw) as w -> infinity (zero unless biproper)."""
        if self.strictly_proper or not self.num:
            return 0.0
        return float(self.num[0])

    def __call__(self, omega):
        return freq_response(self, omega)

    def to_dict(self) -> dict:
        return {"num": list(self.num), "den": list(self.den)}


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.B.shape != (n, 1) or self.C.shape != (1, n):
            raise ValueError(
                f"inconsistent state-space dimensions A{self.A.shape} "
                f"B{self.B.shape} C{self.C.shape}"
            )

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def freq_response(self, omega):
        """Evaluate C (jwI - A)^-1 B + D at one or more frequencies."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        n = self.order
        out = np.empty(w.shape, dtype=complex)
        for i, wi in enumerate(w):
            if n == 0:
                out[i] = self.D
                continue
            x = np.linalg.solve(1j * wi * np.eye(n) - self.A, self.B)
            out[i] = (self.C @ x)[0, 0] + self.D
        return out if np.ndim(omega) else out[0]


@dataclass(frozen=True)
class ImpulseResponse:
    """Sampled impulse response ``g(k dt)`` plus the Dirac weight at t = 0."""

    t: np.ndarray
    g: np.ndarray
    dirac: float
    dt: float


def _trim(coeffs: Sequence[float]) -> list:
    c = [float(x) for x in coeffs]
    while c and c[0] == 0.0:
        c.pop(0)
    return c


def validate_tf(num: Sequence[float], den: Sequence[float]) -> TransferFunction:
    """Normalize and check a transfer function.

    Leading zeros are trimmed and both polynomials are divided by the leading
    denominator coefficient.

    >>> validate_tf([2, 2], [2, 6, 4])
    TransferFunction(num=(1.0, 1.0), den=(1.0, 3.0, 2.0))
    """
    d = _trim(den)
    if not d:
        raise ValueError("denominator has no nonzero coefficient")
    n = _trim(num)
    if not all(math.isfinite(x) for x in n + d):
        raise ValueError("coefficients must be finite")
    if n and len(n) > len(d):
        raise ValueError(
            f"improper transfer function: deg(num)={len(n) - 1} > deg(den)={len(d) - 1}"
        )
    lead = d[0]
    return TransferFunction(tuple(x / lead for x in n) or (0.0,), tuple(x / lead for x in d))


def routh_first_column(den: Sequence[float]) -> tuple[np.ndarray, bool]:
    """First column of the Routh array and a flag for zero pivots.

    A zero pivot is replaced by :data:`ROUTH_EPS` and the flag is set; an
    entirely zero row (imaginary-axis or symmetric roots) also sets it.
    """
    a = np.asarray(den, dtype=float)
    n = len(a) - 1
    if n <= 0:
        return a[:1].copy(), False
    width = n // 2 + 1
    r0 = np.zeros(width)
    r1 = np.zeros(width)
    r0[: len(a[0::2])] = a[0::2]
    r1[: len(a[1::2])] = a[1::2]
    col = [r0[0]]
    marginal = False
    for _ in range(n):
        if r1[0] == 0.0:
            marginal = True
            if not np.any(r1):
                col.append(0.0)
                break
            r1 = r1.copy()
            r1[0] = ROUTH_EPS
        col.append(r1[0])
        nxt = np.zeros(width)
        nxt[:-1] = (r1[0] * r0[1:] - r0[0] * r1[1:]) / r1[0]
        r0, r1 = r1, nxt
    return np.array(col), marginal


def is_hurwitz(tf: TransferFunction) -> bool:
    """True iff every pole lies in the open left half plane.

    Marginal cases (zero pivots, zero rows) are reported as not Hurwitz.
    """
    col, marginal = routh_first_column(tf.den)
    if marginal:
        return False
    return bool(np.all(col > 0) or np.all(col < 0))


def _horner(coeffs, s):
    acc = np.zeros_like(s)
    for c in coeffs:
        acc = acc * s + c
    return acc


def freq_response(tf: TransferFunction, omega):
    """Evaluate G(jw) by Horner recurrence; scalar in, scalar out."""
    s = 1j * np.asarray(omega, dtype=float).astype(complex)
    d = _horner(tf.den, s)
    if np.any(d == 0):
        raise ZeroDivisionError("denominator vanishes on the imaginary axis")
    g = _horner(tf.num, s) / d
    return complex(g) if np.ndim(g) == 0 else g


def tf_to_ss(tf: TransferFunction) -> StateSpace:
    """Controllable canonical realization (companion form)."""
    n = tf.order
    den = np.asarray(tf.den)
    num = np.zeros(n + 1)
    num[n + 1 - len(tf.num):] = tf.num
    D = float(num[0])
    # strictly proper remainder num - D*den, coefficients of s^{n-1} .. s^0
    rem = num[1:] - D * den[1:]
    A = np.zeros((n, n))
    if n:
        A[:-1, 1:] = np.eye(n - 1)
        A[-1, :] = -den[1:][::-1]
    B = np.zeros((n, 1))
    if n:
        B[-1, 0] = 1.0
    C = rem[::-1].reshape(1, n)
    return StateSpace(A, B, C, D)


def expm(A: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    norm = np.linalg.norm(A, 1)
    if not np.isfinite(norm):
        raise FloatingPointError("matrix exponential of a non-finite matrix")
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    X = A / (2.0**s)
    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, 40):
        term = term @ X / k
        E = E + term
        if np.linalg.norm(term, 1) <= tol * np.linalg.norm(E, 1):
            break
    for _ in range(s):
        E = E @ E
    if not np.all(np.isfinite(E)):
        raise FloatingPointError("matrix exponential overflowed")
    return E


def impulse_response(ss: StateSpace, dt: float, T: float) -> ImpulseResponse:
    """Samples of ``C exp(A t) B`` on ``t = 0, dt, ..., <= T``."""
    if dt <= 0 or T <= dt:
        raise ValueError("need dt > 0 and T > dt")
    nsteps = int(math.floor(T / dt + 1e-9))
    t = dt * np.arange(nsteps + 1)
    g = np.zeros(nsteps + 1)
    if ss.order:
        step = expm(ss.A * dt)
        x = ss.B.copy()
        for k in range(nsteps + 1):
            g[k] = (ss.C @ x)[0, 0]
            x = step @ x
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("impulse response is not finite")
    return ImpulseResponse(t=t, g=g, dirac=float(ss.D), dt=dt)


def _log_growth(M: np.ndarray, squarings: int) -> float:
    """Return log ||M^(2^k)|| / 2^k for large k, computed with renormalization."""
    logc = 0.0
    E = M.copy()
    nrm = np.linalg.norm(E, 2)
    if nrm == 0:
        return -math.inf
    E /= nrm
    logc = math.log(nrm)
    for _ in range(squarings):
        E = E @ E
        nrm = np.linalg.norm(E, 2)
        if nrm == 0:
            return -math.inf
        E /= nrm
        logc = 2.0 * logc + math.log(nrm)
    return logc / 2.0**squarings


def spectral_abscissa(A: np.ndarray, squarings: int = 40) -> float:
    """Largest real part of the eigenvalues of ``A`` via Gelfand's formula on exp(At)."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 0:
        return -math.inf
    t0 = 1.0 / max(np.linalg.norm(A, 2), 1e-12)
    return _log_growth(expm(A * t0), squarings) / t0


def spectral_radius(A: np.ndarray, squarings: int = 40) -> float:
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 0:
        return 0.0
    g = _log_growth(A, squarings)
    return 0.0 if g == -math.inf else math.exp(g)


PathLike = Union[str, Path]


def load_plant(path: PathLike) -> TransferFunction:
    """Read a plant file ``{"num": [...], "den": [...]}``."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        return validate_tf(data["num"], data["den"])
    except KeyError as exc:
        raise ValueError(f"plant file missing key {exc}") from None


def plant_to_json(tf: TransferFunction) -> str:
    return json.dumps(tf.to_dict(), sort_keys=True)
