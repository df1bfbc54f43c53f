"""Static nonlinearities, class membership audits and area-inequality residuals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "CLASS_TAGS",
    "ODD_CLASSES",
    "SLOPE_CLASSES",
    "Saturation",
    "Deadzone",
    "PiecewiseLinear",
    "OddSigmoid",
    "LinearGain",
    "NonlinearitySpec",
    "ClassReport",
    "parse_shape",
    "eval_nonlinearity",
    "check_class",
    "area_residual",
    "default_grid",
]

CLASS_TAGS = ("monotone", "monotone_odd", "slope", "slope_odd")
ODD_CLASSES = frozenset({"monotone_odd", "slope_odd"})
SLOPE_CLASSES = frozenset({"slope", "slope_odd"})


@dataclass(frozen=True)
class Saturation:
    level: float

    def __call__(self, x):
        return np.clip(x, -self.level, self.level)

    def __str__(self):
        return f"sat:{self.level:g}"


@dataclass(frozen=True)
class Deadzone:
    width: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.maximum(np.abs(x) - self.width, 0.0)

    def __str__(self):
        return f"dz:{self.width:g}"


@dataclass(frozen=True)
class LinearGain:
    gain: float

    def __call__(self, x):
        return self.gain * np.asarray(x, dtype=float)

    def __str__(self):
        return f"lin:{self.gain:g}"


@dataclass(frozen=True)
class OddSigmoid:
    """``gain * tanh(x)``: odd, slope in ``[0, gain]``, bounded by ``gain``."""

    gain: float

    def __call__(self, x):
        return self.gain * np.tanh(x)

    def __str__(self):
        return f"sig:{self.gain:g}"


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear map through ``(xs[i], ys[i])``.

    Outside the breakpoints the first and last segments are extended.
    """

    xs: tuple
    ys: tuple

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("piecewise-linear shape needs >= 2 matching breakpoints")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def from_slopes(cls, breaks: Sequence[float], slopes: Sequence[float]) -> "PiecewiseLinear":
        """Build from sorted breakpoints and one slope per segment, anchored at phi(0) = 0.

        ``slopes`` has ``len(breaks) + 1`` entries: left tail, inner segments, right tail.
        """
        b = np.asarray(breaks, dtype=float)
        s = np.asarray(slopes, dtype=float)
        if len(s) != len(b) + 1:
            raise ValueError("need len(breaks) + 1 slopes")
        # integrate slopes from an arbitrary origin then shift so that phi(0) = 0
        lo, hi = min(b[0], -1.0) - 1.0, max(b[-1], 1.0) + 1.0
        xs = np.concatenate(([lo], b, [hi]))
        ys = np.zeros_like(xs)
        for i in range(1, len(xs)):
            ys[i] = ys[i - 1] + s[i - 1] * (xs[i] - xs[i - 1])
        shape = cls(tuple(xs), tuple(ys))
        off = float(shape(0.0))
        return cls(tuple(xs), tuple(ys - off))

    def _end_slopes(self):
        xs, ys = self.xs, self.ys
        left = (ys[1] - ys[0]) / (xs[1] - xs[0])
        right = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        return left, right

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        left, right = self._end_slopes()
        y = np.interp(x, xs, ys)
        y = np.where(x < xs[0], ys[0] + left * (x - xs[0]), y)
        return np.where(x > xs[-1], ys[-1] + right * (x - xs[-1]), y)

    def __str__(self):
        return "pwl:" + ";".join(f"{a:.17g},{b:.17g}" for a, b in zip(self.xs, self.ys))


Shape = Callable[[np.ndarray], np.ndarray]


def parse_shape(text: str):
    """Parse ``sat:L``, ``dz:d``, ``pwl:x0,y0;x1,y1;...``, ``lin:k`` or ``sig:g``."""
    kind, _, arg = text.partition(":")
    if not arg:
        raise ValueError(f"malformed nonlinearity string {text!r}")
    try:
        if kind == "pwl":
            pts = [tuple(float(v) for v in p.split(",")) for p in arg.split(";") if p]
            if any(len(p) != 2 for p in pts):
                raise ValueError
            xs, ys = zip(*pts)
            return PiecewiseLinear(tuple(xs), tuple(ys))
        val = float(arg)
    except ValueError:
        raise ValueError(f"malformed nonlinearity string {text!r}") from None
    if kind == "sat":
        if val <= 0:
            raise ValueError("saturation level must be positive")
        return Saturation(val)
    if kind == "dz":
        if val < 0:
            raise ValueError("deadzone width must be nonnegative")
        return Deadzone(val)
    if kind == "lin":
        return LinearGain(val)
    if kind == "sig":
        return OddSigmoid(val)
    raise ValueError(f"unknown nonlinearity kind {kind!r}")


def default_grid(span: float = 10.0, step: float = 1e-3) -> np.ndarray:
    n = int(round(span / step))
    return step * np.arange(-n, n + 1)


@dataclass(frozen=True)
class ClassReport:
    monotone: bool
    odd: bool
    max_slope: float
    min_slope: float
    sector_min: float
    sector_max: float
    zero_at_origin: bool

    def slope_within(self, alpha: float, tol: float = 1e-9) -> bool:
        return self.min_slope >= -tol and self.max_slope <= alpha + tol


def check_class(spec, grid: Optional[np.ndarray] = None) -> ClassReport:
    """Audit a nonlinearity (a :class:`NonlinearitySpec` or bare shape) on a grid.

    Slopes are finite differences over adjacent grid pairs; oddness compares
    ``phi(-x)`` with ``-phi(x)`` at every grid point.
    """
    shape = spec.shape if isinstance(spec, NonlinearitySpec) else spec
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if x.ndim != 1 or len(x) < 2 or np.any(np.diff(x) <= 0):
        raise ValueError("grid must hold >= 2 strictly increasing points")
    if not (x[0] < 0 < x[-1]):
        raise ValueError("grid must span both sides of the origin")
    y = shape(x)
    slopes = np.diff(y) / np.diff(x)
    odd_err = np.max(np.abs(shape(-x) + y))
    nz = x != 0
    ratios = y[nz] / x[nz]
    return ClassReport(
        monotone=bool(slopes.min() >= -1e-12),
        odd=bool(odd_err <= 1e-12),
        max_slope=float(slopes.max()),
        min_slope=float(slopes.min()),
        sector_min=float(ratios.min()),
        sector_max=float(ratios.max()),
        zero_at_origin=bool(abs(float(shape(0.0))) <= 1e-12),
    )


@dataclass(frozen=True)
class NonlinearitySpec:
    """A declared nonlinearity class together with one concrete member.

    ``alpha`` is the slope bound for the slope classes; ``gamma`` is the
    linear gain bound for the monotone classes.
    """

    class_tag: str
    shape: Shape
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    grid: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.class_tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.class_tag!r}")
        if self.class_tag in SLOPE_CLASSES and (self.alpha is None or self.alpha < 0):
            raise ValueError("slope classes need alpha >= 0")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def is_odd_class(self) -> bool:
        return self.class_tag in ODD_CLASSES

    def validate(self) -> ClassReport:
        """Check the shape against the declared class; raise ``ValueError`` on violation."""
        rep = check_class(self.shape, self.grid)
        if not rep.zero_at_origin:
            raise ValueError("shape must satisfy phi(0) = 0")
        if not rep.monotone:
            raise ValueError(f"shape is not monotone (min slope {rep.min_slope:g})")
        if self.is_odd_class and not rep.odd:
            raise ValueError("shape is not odd")
        if self.class_tag in SLOPE_CLASSES and not rep.slope_within(self.alpha):
            raise ValueError(
                f"slope range [{rep.min_slope:g}, {rep.max_slope:g}] exceeds [0, {self.alpha:g}]"
            )
        if self.gamma is not None and max(abs(rep.sector_min), abs(rep.sector_max)) > self.gamma + 1e-9:
            raise ValueError(f"gain bound gamma={self.gamma:g} violated")
        return rep

    def __call__(self, x):
        return self.shape(x)


def eval_nonlinearity(spec, x):
    """Evaluate phi(x); works for scalars and arrays."""
    y = spec(x)
    return float(y) if np.ndim(y) == 0 else y


def _shift(x: np.ndarray, m: int) -> np.ndarray:
    """Samples of x(t - m dt) with zero fill."""
    out = np.zeros_like(x)
    n = len(x)
    if m >= 0:
        if m < n:
            out[m:] = x[: n - m]
    elif -m < n:
        out[: n + m] = x[-m:]
    return out


def area_residual(spec, x, dt: float, tau: float, variant: str = "plain") -> float:
    """Discretized area-inequality residual.

    ``plain``: sum x*phi(x) dt - sum x(t - tau)*phi(x(t)) dt.
    ``odd``:   sum x*phi(x) dt - |sum x(t - tau)*phi(x(t)) dt|.

    Both are nonnegative for monotone (resp. monotone odd) phi.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be one-dimensional")
    m = tau / dt
    if abs(m - round(m)) > 1e-9 * max(1.0, abs(m)):
        raise ValueError("tau must be an integer multiple of dt")
    fx = np.asarray(spec(x), dtype=float)
    if fx.shape != x.shape:
        raise ValueError("phi(x) length does not match x")
    energy = float(np.dot(x, fx)) * dt
    cross = float(np.dot(_shift(x, int(round(m))), fx)) * dt
    if variant == "plain":
        return energy - cross
    if variant == "odd":
        return energy - abs(cross)
    raise ValueError(f"unknown variant {variant!r}")
