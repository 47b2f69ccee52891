import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coinshift.metrics import (
    DegenerateSeries,
    LengthMismatch,
    build_report,
    fit_growth,
    hellinger,
    negativity,
    negativity_pure,
    trend,
)
from coinshift.phase_space import WalkConfig, initial_state
from coinshift.walk import build_operators, run_trajectory, standard_step

distributions = st.integers(0, 2**32 - 1).map(lambda s: np.random.default_rng(s).dirichlet(np.full(9, 0.7)))


def random_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestHellinger:
    def test_identical(self):
        p = np.random.default_rng(0).dirichlet(np.ones(31))
        assert hellinger(p, p) == 0.0

    def test_disjoint(self):
        assert hellinger([0.5, 0.5, 0, 0], [0, 0, 0.25, 0.75]) == pytest.approx(1.0)

    def test_half_vs_point(self):
        # sqrt(1 - 1/sqrt(2)), evaluated by hand
        assert hellinger([0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.541196100146197, abs=1e-15)

    def test_rowwise(self):
        p = np.array([[0.5, 0.5], [1.0, 0.0]])
        np.testing.assert_allclose(hellinger(p, p[::-1]), [0.541196100146197] * 2, atol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            hellinger([1.0], [0.5, 0.5])

    @settings(max_examples=60, deadline=None)
    @given(distributions, distributions, distributions)
    def test_metric_properties(self, p, q, r):
        assert 0.0 <= hellinger(p, q) <= 1.0
        assert hellinger(p, q) == hellinger(q, p)
        assert hellinger(p, r) <= hellinger(p, q) + hellinger(q, r) + 1e-12
        perm = np.random.default_rng(int(p[0] * 1e9)).permutation(len(p))
        assert hellinger(p[perm], q[perm]) == pytest.approx(hellinger(p, q), abs=1e-15)


class TestNegativity:
    def test_product_state(self):
        cfg = WalkConfig(d=31, alpha=-5, coin_init=(0.6, 0.8j))
        psi = initial_state(cfg)
        assert negativity(np.outer(psi, psi.conj()), 31) <= 1e-10
        assert negativity_pure(psi, 31) <= 1e-10

    def test_bell(self):
        bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
        assert negativity(np.outer(bell, bell), 2) == pytest.approx(0.5, abs=1e-12)
        assert negativity_pure(bell, 2) == pytest.approx(0.5, abs=1e-12)

    def test_one_walk_step_against_brute_force(self):
        d = 31
        cfg = WalkConfig(d=d, alpha=-5)
        psi = standard_step(initial_state(cfg), build_operators(cfg))
        rho = np.outer(psi, psi.conj())
        pt = np.empty_like(rho)
        for c1 in range(2):
            for c2 in range(2):
                for a in range(d):
                    for b in range(d):
                        pt[c1 * d + a, c2 * d + b] = rho[c2 * d + a, c1 * d + b]
        w = np.linalg.eigvalsh(pt)
        oracle = -w[w < 0].sum()
        assert oracle > 0.1
        assert negativity(rho, d) == pytest.approx(oracle, abs=1e-12)
        assert negativity_pure(psi, d) == pytest.approx(oracle, abs=1e-10)

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(3)
        d = 6
        a = rng.normal(size=(12, 3)) + 1j * rng.normal(size=(12, 3))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        u = np.kron(random_unitary(2, rng), random_unitary(d, rng))
        assert negativity(u @ rho @ u.conj().T, d) == pytest.approx(negativity(rho, d), abs=1e-9)

    def test_pure_path_matches_density(self):
        cfg = WalkConfig(d=31, alpha=-5, g_tau=0.2538, omega_tau=20.75, steps=25)
        for psi in run_trajectory(cfg, "exact").states[::5]:
            assert negativity_pure(psi, 31) == pytest.approx(negativity(np.outer(psi, psi.conj()), 31), abs=1e-10)

    def test_bounded(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            psi = rng.normal(size=10) + 1j * rng.normal(size=10)
            psi /= np.linalg.norm(psi)
            assert 0 <= negativity(np.outer(psi, psi.conj()), 5) <= 0.5 + 1e-9


class TestFitGrowth:
    def test_linear(self):
        t = np.arange(20)
        fit = fit_growth(0.37 * t, "linear")
        assert fit.coef == pytest.approx(0.37)
        assert fit.r2 == pytest.approx(1.0)

    def test_power(self):
        t = np.arange(0, 30)
        fit = fit_growth(np.sqrt(t), "power", steps=t)
        assert fit.coef == pytest.approx(0.5)
        assert fit.r2 == pytest.approx(1.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateSeries):
            fit_growth([1, 2, 3, 4, 5], steps=[2, 2, 2, 2, 2])
        with pytest.raises(DegenerateSeries):
            fit_growth([1, 2, 3])

    def test_hadamard_walk_is_ballistic(self):
        d = 125
        std = run_trajectory(WalkConfig(d=d, alpha=-10, steps=d // 4), "standard", keep_states=False).stds
        fit = fit_growth(std[1:], "linear", steps=np.arange(1, d // 4 + 1))
        assert fit.r2 >= 0.98

    def test_trend(self):
        assert trend([0, 5, 4, 3, 2, 1]) == pytest.approx(-1.0)


def test_report_shapes():
    cfg = WalkConfig(d=31, alpha=-5, g_tau=0.2538, omega_tau=20.75, steps=12)
    rep = build_report(run_trajectory(cfg, "exact"), run_trajectory(cfg, "standard"))
    assert rep.steps == 12
    assert rep.window == (1, 7)
    assert np.all((rep.hellinger_per_step >= 0) & (rep.hellinger_per_step <= 1))
    assert np.all(rep.negativity_exact <= 0.5 + 1e-9)
    assert rep.linear_fit["approx"].r2 > 0.95
