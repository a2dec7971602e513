import numpy as np
import pytest

from lorentzqp import (
    CERT_GLOBAL,
    DiagonalInstance,
    SecularPoleError,
    dual_value,
    enumerate_kkt,
    kkt_check,
    secular_derivative,
    secular_enumerate,
    secular_value,
)
from lorentzqp.fileio import gen_instance


class TestSecularValue:
    def test_trivial(self):
        assert secular_value(DiagonalInstance(q=[1, 1], c=[1, 0]), 0.0) == -0.5

    def test_certified_fixture(self, diag_certified):
        assert secular_value(diag_certified, 0.45) == pytest.approx(-0.8, abs=1e-12)

    def test_saddle_fixture_inconsistency_evidence(self, diag_saddle):
        # -0.5 * (0.25/(-0.35) + 0.09/0.15) is positive at the claimed multiplier
        assert secular_value(diag_saddle, 0.45) == pytest.approx(0.0571428571, abs=1e-9)

    def test_pole_hit_carries_index(self, diag_saddle):
        with pytest.raises(SecularPoleError) as err:
            secular_value(diag_saddle, 0.1)
        assert err.value.index == 0
        with pytest.raises(SecularPoleError) as err:
            secular_value(diag_saddle, 0.3)
        assert err.value.index == 1

    def test_matches_dense_dual_value(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            d = DiagonalInstance(q=rng.uniform(-2, 2, n), c=rng.uniform(-2, 2, n))
            sigma = float(rng.uniform(0, 3))
            try:
                sv = secular_value(d, sigma)
                dv = dual_value(d.to_dense(), sigma)
            except Exception:
                continue
            assert sv == pytest.approx(dv, rel=1e-12, abs=1e-12)


class TestSecularDerivative:
    def test_trivial(self):
        assert secular_derivative(DiagonalInstance(q=[1, 1], c=[1, 0]), 0.0) == -0.5

    def test_stationary_at_certified_fixture(self, diag_certified):
        assert secular_derivative(diag_certified, 0.45) == pytest.approx(0.0, abs=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        d = DiagonalInstance(q=[1.7, -0.4, 0.9], c=[0.8, -0.5, 0.3])
        for _ in range(20):
            sigma = float(rng.uniform(0.45, 1.6))  # inside (0.4, 1.7)
            h = 1e-6 * (1.0 + sigma)
            fd = (secular_value(d, sigma + h) - secular_value(d, sigma - h)) / (2 * h)
            g = secular_derivative(d, sigma)
            assert abs(fd - g) <= 1e-6 * (1.0 + abs(g))


class TestSecularEnumerate:
    def test_saddle_fixture(self, diag_saddle):
        pts = secular_enumerate(diag_saddle)
        positive = [cp for cp in pts if cp.sigma > 0]
        assert [round(cp.sigma, 9) for cp in positive] == [0.225, 0.6]
        assert all(not cp.nappe_ok for cp in positive)
        assert all(cp.certificate != CERT_GLOBAL for cp in pts)

    def test_certified_fixture(self, diag_certified):
        pts = secular_enumerate(diag_certified)
        assert len(pts) == 1
        cp = pts[0]
        assert cp.sigma == pytest.approx(0.45, abs=1e-10)
        np.testing.assert_allclose(cp.x, [2.0, -2.0], atol=1e-9)
        assert cp.dual_value == pytest.approx(-0.8, abs=1e-12)
        assert cp.certificate == CERT_GLOBAL

    def test_trivial_instance(self):
        pts = secular_enumerate(DiagonalInstance(q=[1, 1], c=[1, 0]))
        assert len(pts) == 1
        assert pts[0].sigma == 0.0
        np.testing.assert_allclose(pts[0].x, [1.0, 0.0])

    def test_roots_satisfy_kkt(self, diag_saddle):
        dense = diag_saddle.to_dense()
        for cp in secular_enumerate(diag_saddle):
            if cp.sigma > 0:
                assert abs(secular_derivative(diag_saddle, cp.sigma)) <= 1e-8
            assert kkt_check(dense, cp.x, cp.sigma).max_residual <= 1e-7

    def test_agrees_with_dense_enumeration(self):
        for seed in range(40):
            d = gen_instance("diagonal", (2, 3, 4)[seed % 3], 1300 + seed)
            sec = secular_enumerate(d)
            den = enumerate_kkt(d.to_dense())
            assert len(sec) == len(den)
            for a, b in zip(sec, den):
                assert abs(a.sigma - b.sigma) <= 1e-8
                assert a.certificate == b.certificate
                assert a.inertia == b.inertia
                np.testing.assert_allclose(a.x, b.x, atol=1e-7)
                assert abs(a.dual_value - b.dual_value) <= 1e-7
                assert abs(a.primal_value - b.primal_value) <= 1e-7
