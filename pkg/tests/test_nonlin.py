import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lurecert.nonlin import (
    Deadzone,
    LinearGain,
    NonlinearitySpec,
    OddSigmoid,
    PiecewiseLinear,
    Saturation,
    area_residual,
    check_class,
    eval_nonlinearity,
    parse_shape,
)

GRID = np.round(np.arange(-300, 301) * 0.01, 12)


@pytest.mark.parametrize(
    "shape, x, expected",
    [
        (Saturation(1.0), 2.0, 1.0),
        (Deadzone(1.0), 0.5, 0.0),
        (Saturation(1.0), -0.3, -0.3),
        (Deadzone(1.0), -2.5, -1.5),
        (LinearGain(2.0), 1.5, 3.0),
        (OddSigmoid(2.0), 0.0, 0.0),
    ],
)
def test_eval_examples(shape, x, expected):
    assert eval_nonlinearity(shape, x) == pytest.approx(expected)


def test_pwl_interpolates_and_extends():
    phi = PiecewiseLinear((-1.0, 0.0, 2.0), (-2.0, 0.0, 1.0))
    assert eval_nonlinearity(phi, 1.0) == pytest.approx(0.5)
    assert eval_nonlinearity(phi, 3.0) == pytest.approx(1.5)
    assert eval_nonlinearity(phi, -2.0) == pytest.approx(-4.0)


def test_pwl_from_slopes_anchored_at_zero():
    phi = PiecewiseLinear.from_slopes([-1.0, 0.5], [0.2, 1.0, 0.0])
    assert eval_nonlinearity(phi, 0.0) == pytest.approx(0.0, abs=1e-15)
    rep = check_class(phi, GRID)
    assert rep.min_slope == pytest.approx(0.0, abs=1e-12)
    assert rep.max_slope == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "text, cls",
    [("sat:1", Saturation), ("dz:0.5", Deadzone), ("lin:2", LinearGain), ("sig:3", OddSigmoid), ("pwl:-1,-1;0,0;1,2", PiecewiseLinear)],
)
def test_parse_shape(text, cls):
    assert isinstance(parse_shape(text), cls)


@pytest.mark.parametrize("text", ["sat", "sat:x", "foo:1", "pwl:1;2", "sat:-1"])
def test_parse_shape_rejects(text):
    with pytest.raises(ValueError):
        parse_shape(text)


@pytest.mark.parametrize("shape", [Saturation(1.0), Deadzone(1.0)])
def test_check_class_sat_dz(shape):
    rep = check_class(shape, GRID)
    assert rep.monotone and rep.odd
    assert rep.min_slope == pytest.approx(0.0, abs=1e-12)
    assert rep.max_slope == pytest.approx(1.0, abs=1e-9)


def test_check_class_decreasing():
    rep = check_class(LinearGain(-1.0), GRID)
    assert not rep.monotone
    assert rep.min_slope == pytest.approx(-1.0)


@pytest.mark.parametrize("k", [0.0, 0.3, 1.0, 7.5])
def test_check_class_linear_gain(k):
    rep = check_class(LinearGain(k), GRID)
    assert k - 1e-9 <= rep.min_slope <= rep.max_slope <= k + 1e-9


def test_check_class_degenerate_grid():
    with pytest.raises(ValueError):
        check_class(Saturation(1.0), np.array([1.0]))
    with pytest.raises(ValueError):
        check_class(Saturation(1.0), np.array([0.0, 0.0, 1.0]))


def test_spec_validation():
    NonlinearitySpec("slope_odd", Saturation(1.0), alpha=1.0).validate()
    with pytest.raises(ValueError, match="slope range"):
        NonlinearitySpec("slope", LinearGain(2.0), alpha=1.0).validate()
    with pytest.raises(ValueError, match="not odd"):
        NonlinearitySpec("monotone_odd", PiecewiseLinear((-1, 0, 1), (-1, 0, 3))).validate()
    with pytest.raises(ValueError, match="phi\\(0\\)"):
        NonlinearitySpec("monotone", PiecewiseLinear((-1, 1), (0, 2))).validate()
    with pytest.raises(ValueError):
        NonlinearitySpec("slope", Saturation(1.0))


def test_area_residual_pulse_identity():
    dt = 0.01
    x = np.zeros(300)
    x[:100] = 1.0
    assert area_residual(LinearGain(1.0), x, dt, 0.5) == pytest.approx(0.5, abs=2 * dt)


def test_area_residual_zero_shift(rng):
    x = rng.normal(size=200)
    assert area_residual(Deadzone(0.3), x, 0.01, 0.0) == 0.0


def test_area_residual_errors():
    x = np.ones(10)
    with pytest.raises(ValueError):
        area_residual(LinearGain(1.0), x, 0.1, 0.25)
    with pytest.raises(ValueError):
        area_residual(lambda v: v[:-1], x, 0.1, 0.2)


def smooth_signal(rng, n=600, dt=0.01):
    t = dt * np.arange(n)
    x = np.zeros(n)
    for _ in range(4):
        x += rng.normal() * np.sin(rng.uniform(0.2, 5.0) * t + rng.uniform(0, 6.3))
    return x * np.sin(np.pi * t / t[-1]) ** 2


def test_area_residual_saturation_random(rng):
    for _ in range(50):
        x = smooth_signal(rng)
        assert area_residual(Saturation(1.0), x, 0.01, 0.3) >= -1e-6


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["sat", "dz", "sig", "lin"]))
def test_inner_product_first_third_quadrant(seed, kind):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=100) * 10 ** rng.uniform(-2, 2)
    phi = parse_shape(f"{kind}:{rng.uniform(0.1, 3):.3f}")
    assert np.dot(x, phi(x)) * 0.01 >= 0.0
