import numpy as np
import pytest
from scipy.integrate import solve_ivp

from generators import padded_signal, random_monotone, random_multiplier
from lurecert.lti import tf_to_ss, validate_tf
from lurecert.multiplier import l1_norm_exact, make_multiplier
from lurecert.nonlin import LinearGain, check_class
from lurecert.sim import (
    falsify,
    filter_multiplier,
    make_input,
    random_slope_nonlinearity,
    simulate_lure,
    td_iqc_value,
    time_scales,
)

DT = 0.01


def _tol(x):
    return 50 * DT * float(np.dot(x, x)) * DT


def test_open_loop_convolution():
    G = validate_tf([1], [1, 1])
    tr = simulate_lure(G, LinearGain(0.0), lambda t: np.exp(-t), dt=1e-3, T=2.0)
    assert tr.y[1000] == pytest.approx(np.exp(-1), abs=1e-4)
    assert len(tr.t) == len(tr.y) == len(tr.u) == len(tr.r)
    assert np.all(np.diff(tr.l2_y) >= 0) and np.all(np.diff(tr.l2_u) >= 0)


def test_unstable_open_loop_diverges():
    tr = simulate_lure(validate_tf([1], [1, -1]), LinearGain(0.0), make_input("pulse", 100), dt=0.01, T=100)
    assert tr.diverged
    assert tr.t[-1] < 100


def test_positive_feedback_gain_one_bounded():
    tr = simulate_lure(validate_tf([1], [1, 2]), LinearGain(1.0), make_input("pulse", 30), dt=1e-3, T=30)
    assert not tr.diverged
    assert abs(tr.y[-1]) < 1e-8


def test_biproper_refused():
    with pytest.raises(ValueError):
        simulate_lure(validate_tf([1, 1], [1, 2]), LinearGain(0.0), make_input("pulse", 1))


def test_default_step_and_horizon():
    tr = simulate_lure(validate_tf([1], [1, 2]), LinearGain(0.0), make_input("pulse", 1))
    assert tr.t[1] == pytest.approx(5e-4, rel=1e-6)  # tau = 0.5
    assert tr.t[-1] == pytest.approx(25.0, rel=1e-6)


def test_inputs():
    t = np.array([0.0, 0.5, 1.0, 2.0])
    assert make_input("pulse", 5)(t).tolist() == [1, 1, 0, 0]
    assert make_input("expdecay:2", 5)(t) == pytest.approx(np.exp(-t / 2))
    assert np.all(np.abs(make_input("chirp", 5)(t)) <= 1)
    with pytest.raises(ValueError):
        make_input("noise", 5)
    with pytest.raises(ValueError):
        make_input("expdecay:-1", 5)


def test_sampled_input_matches_callable():
    G = validate_tf([1], [1, 3, 2])
    t = 0.01 * np.arange(500)
    a = simulate_lure(G, LinearGain(0.5), np.exp(-t), dt=0.01, T=4.0)
    b = simulate_lure(G, LinearGain(0.5), lambda s: np.exp(-s), dt=0.01, T=4.0)
    assert np.allclose(a.y, b.y, atol=1e-6)


def test_linear_closed_loop_matches_solve_ivp(rng):
    for _ in range(20):
        n = int(rng.integers(1, 4))
        poles = -rng.uniform(0.5, 3, n)
        den = np.poly(poles)
        num = rng.normal(size=int(rng.integers(1, n + 1)))
        G = validate_tf(num, den)
        ss = tf_to_ss(G)
        # keep the closed loop stable
        k = rng.uniform(-1, 1)
        Acl = ss.A + k * ss.B @ ss.C
        if np.max(np.linalg.eigvals(Acl).real) >= -0.1:
            k = 0.0
            Acl = ss.A
        r = lambda t: np.exp(-t) * np.cos(2 * t)
        tr = simulate_lure(G, LinearGain(k), r, dt=2e-3, T=5.0)
        ref = solve_ivp(
            lambda t, x: Acl @ x + ss.B[:, 0] * r(t), (0, 5.0), np.zeros(ss.order),
            t_eval=tr.t, rtol=1e-11, atol=1e-13, method="DOP853",
        )
        y_ref = ss.C[0] @ ref.y
        scale = max(np.max(np.abs(y_ref)), 1e-12)
        assert np.max(np.abs(tr.y - y_ref)) <= 1e-6 * scale


def test_filter_identity_and_zero():
    x = np.sin(np.linspace(0, 3, 50))
    assert np.array_equal(filter_multiplier(make_multiplier(), x, DT), x)
    assert td_iqc_value(make_multiplier([(1, 1)]), LinearGain(1.0), np.zeros(30), DT) == 0.0


def test_filter_taps_sum_to_l1():
    m = make_multiplier([(2.0, 4.0)])
    x = np.zeros(4000)
    x[0] = 1.0
    h = x - filter_multiplier(m, x, DT)
    assert h.sum() == pytest.approx(l1_norm_exact(m), rel=1e-9)


def test_anticausal_filter_is_time_reversed():
    rng = np.random.default_rng(5)
    x = padded_signal(rng)
    mc = make_multiplier([(0.3, 1.0), (0.2, 4.0)])
    ma = mc.time_reversed()
    assert np.allclose(filter_multiplier(ma, x, DT), filter_multiplier(mc, x[::-1], DT)[::-1])


def test_td_iqc_no_multiplier_nonnegative(rng):
    for _ in range(50):
        x = padded_signal(rng, pad=10)
        phi = random_monotone(rng)
        assert td_iqc_value(make_multiplier(), phi, x, DT) >= 0


def test_td_iqc_identity_boundary(rng):
    m = make_multiplier([(1, 1)])  # ||H||_1 = 1
    for _ in range(50):
        x = padded_signal(rng)
        assert td_iqc_value(m, LinearGain(1.0), x, DT) >= -_tol(x)


def test_td_iqc_nonnegative_gains_monotone(rng):
    for _ in range(100):
        x = padded_signal(rng)
        v = td_iqc_value(random_multiplier(rng), random_monotone(rng), x, DT)
        assert v >= -_tol(x)


def test_td_iqc_signed_gains_odd(rng):
    for _ in range(100):
        x = padded_signal(rng)
        v = td_iqc_value(random_multiplier(rng, signed=True), random_monotone(rng, odd=True), x, DT)
        assert v >= -_tol(x)


def test_td_iqc_time_reversal_metamorphic(rng):
    for _ in range(50):
        m = random_multiplier(rng, signed=True)
        rev = m.time_reversed()
        assert l1_norm_exact(rev) == pytest.approx(l1_norm_exact(m), abs=1e-12)
        x = padded_signal(rng)
        phi = random_monotone(rng, odd=True)
        assert td_iqc_value(rev, phi, x, DT) >= -_tol(x)


def test_random_slope_nonlinearity():
    spec = random_slope_nonlinearity(1.0, odd=True, seed=3)
    rep = check_class(spec.shape)
    assert rep.odd and rep.slope_within(1.0)
    spec.validate()
    assert random_slope_nonlinearity(1.0, odd=False, seed=9) == random_slope_nonlinearity(1.0, odd=False, seed=9)
    zero = random_slope_nonlinearity(0.0)
    assert zero(np.array([-2.0, 3.0])).tolist() == [0.0, 0.0]
    for seed in range(20):
        s = random_slope_nonlinearity(2.5, odd=seed % 2 == 0, seed=seed)
        s.validate()
        n_breaks = len(s.shape.xs) - 2
        assert 3 <= n_breaks <= 22


def test_time_scales():
    tau, rho = time_scales(validate_tf([1], [1, 3, 2]))
    assert tau == pytest.approx(1.0, rel=1e-6)
    assert rho == pytest.approx(2.0, rel=1e-6)


def test_falsify_empty_and_unstable():
    assert falsify(validate_tf([1], [1, 1]), 1.0, 0).n_diverged == 0
    rep = falsify(validate_tf([1], [1, -1]), 0.5, 10, T=60.0)
    assert rep.n_diverged == 10


def test_falsify_detects_uncertifiable_slope():
    # -1/(s+1)^3 closes an unstable loop for any gain above 8; at slope 80 the
    # growth rate (about 1.15/s) reaches the divergence level within the horizon
    G = validate_tf([-1.0], [1, 3, 3, 1])
    rep = falsify(G, 80.0, 50, seed=1)
    assert rep.n_diverged > 0


def test_falsify_deterministic():
    G = validate_tf([-1.0], [1, 3, 3, 1])
    a = falsify(G, 7.5, 20, seed=4)
    b = falsify(G, 7.5, 20, seed=4)
    assert a.diverged == b.diverged == []
