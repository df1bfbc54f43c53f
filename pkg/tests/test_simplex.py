import numpy as np
import pytest
from scipy.optimize import linprog

from lurecert.simplex import linprog_simplex


def test_box_with_budget_matches_greedy(rng):
    # max v.x, 0 <= x <= u, w.x <= B: fractional knapsack, solved greedily
    for _ in range(100):
        n = int(rng.integers(1, 8))
        v = rng.uniform(-1, 2, n)
        u = rng.uniform(0.1, 3, n)
        w = rng.uniform(0.1, 2, n)
        B = rng.uniform(0.1, 5)
        A = np.vstack((np.eye(n), w))
        b = np.concatenate((u, [B]))
        res = linprog_simplex(-v, A, b)
        assert res.status == "optimal"
        best, room = 0.0, B
        for i in np.argsort(-v / w):
            if v[i] <= 0:
                break
            take = min(u[i], room / w[i])
            best += v[i] * take
            room -= w[i] * take
        assert -res.fun == pytest.approx(best, abs=1e-9)


def test_against_highs(rng):
    for _ in range(60):
        n, m = int(rng.integers(2, 10)), int(rng.integers(1, 15))
        A = rng.normal(size=(m, n))
        b = rng.normal(size=m) + 1.0
        c = rng.normal(size=n)
        # bounding row keeps the problem bounded
        A = np.vstack((A, np.ones(n)))
        b = np.concatenate((b, [10.0]))
        ours = linprog_simplex(c, A, b)
        ref = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
        if ref.status == 2:
            assert ours.status == "infeasible"
        else:
            assert ours.status == "optimal"
            assert ours.fun == pytest.approx(ref.fun, abs=1e-8)
            assert np.all(A @ ours.x <= b + 1e-8)
            assert np.all(ours.x >= -1e-12)


def test_equality_constraints():
    res = linprog_simplex([1, 2, 0], A_eq=[[1, 1, 1]], b_eq=[1], A_ub=[[0, 0, 1]], b_ub=[0.5])
    assert res.status == "optimal"
    assert res.fun == pytest.approx(0.5)
    assert res.x == pytest.approx([0.5, 0.0, 0.5])


def test_infeasible():
    res = linprog_simplex([1, 1], A_ub=[[1, 1], [-1, -1]], b_ub=[1, -2])
    assert res.status == "infeasible"
    assert not res.success


def test_unbounded():
    res = linprog_simplex([-1, 0], A_ub=[[0, 1]], b_ub=[1])
    assert res.status == "unbounded"


def test_iteration_limit():
    rng = np.random.default_rng(0)
    A = rng.uniform(0.1, 1, size=(20, 20))
    res = linprog_simplex(-np.ones(20), A, np.ones(20), max_iter=1)
    assert res.status == "iteration_limit"


def test_degenerate_does_not_cycle():
    # classic Beale example cycles under the largest-coefficient rule
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    b = [0, 0, 1]
    res = linprog_simplex(c, A, b)
    assert res.status == "optimal"
    assert res.fun == pytest.approx(-0.05)
