import math

import numpy as np
import pytest
from scipy import stats

from riesz_lab import linalg, sampler, verify
from riesz_lab.errors import IntegrationFailure
from riesz_lab.params import RieszParams, TRieszParams

from conftest import random_pd


def test_report_pass_logic():
    assert verify.CheckReport("a", 1.0 + 1e-9, 1.0, 1e-8, 0).passed
    assert not verify.CheckReport("b", 1.1, 1.0, 1e-8, 0).passed
    assert not verify.CheckReport("c", math.nan, 1.0, 1e-8, 0).passed
    d = verify.CheckReport("d", np.float64(2.0), 2, 0.1, 3).to_dict()
    assert type(d["statistic"]) is float and d["passed"] is True


def test_trapezoid_gaussian():
    # exp(-|v|^2 / 2) over R^3 equals (2 pi)^{3/2}
    val, nodes = verify.trapezoid_rn(lambda v: -0.5 * np.sum(v * v, axis=-1), 3,
                                     half_width=8.0, tol=1e-10)
    assert val == pytest.approx((2 * math.pi) ** 1.5, rel=1e-10)
    assert nodes > 0


def test_trapezoid_periodic_axis():
    # int_R int_0^{2 pi} exp(-x^2) (1 + cos t) dt dx = 2 pi sqrt(pi)
    f = lambda v: -v[:, 0] ** 2 + np.log1p(np.cos(v[:, 1]))
    val, _ = verify.trapezoid_rn(f, 1, half_width=7.0, n_periodic=1, tol=1e-10)
    assert val == pytest.approx(2 * math.pi * math.sqrt(math.pi), rel=1e-9)


def test_trapezoid_budget():
    with pytest.raises(IntegrationFailure):
        verify.trapezoid_rn(lambda v: -np.sum(v * v, axis=-1), 4, budget=1000)


def test_pd_coordinates_cover_cone():
    v = np.random.default_rng(0).standard_normal((50, 3))
    x, lj = verify.pd_coordinates(v, 2, 1)
    assert x.shape == (50, 2, 2)
    assert np.all(np.linalg.eigvalsh(x) > 0)
    assert np.all(np.isfinite(lj))


@pytest.mark.parametrize("kind,p", [
    ("riesz", RieszParams(2.0, [0.5])),
    ("triesz", TRieszParams(1, 3.0, 0.0, [0], rho=1 / 3)),
    ("sv", TRieszParams(1, 3.0, 0.0, [0], rho=1 / 3)),
])
def test_scalar_normalization(kind, p):
    r = verify.check_normalization(kind, p)
    assert r.passed, r.detail


def test_normalization_detects_wrong_constant(monkeypatch):
    from riesz_lab import dens
    p = RieszParams(2.0, [0.5])
    orig = dens.riesz_logpdf
    monkeypatch.setattr(dens, "riesz_logpdf", lambda v, q: orig(v, q) + 1e-3)
    assert not verify.check_normalization("riesz", p).passed


def test_jacobians_known_values():
    a = np.diag([2.0, 3.0])
    b = np.array([[5.0]])
    # X -> A X B on 2x1 real matrices scales by det(A) * 5^2
    assert verify.linear_jacobian(a, b, 1) == pytest.approx(math.log(6 * 25))
    # X -> A X A' on symmetric 2x2: |A|^{m+1}
    assert verify.symmetric_jacobian(a, 1) == pytest.approx(3 * math.log(6))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_jacobian_checks_pass(rng, beta):
    a = linalg.gaussian_matrix(rng, 3, 3, beta)
    b = linalg.gaussian_matrix(rng, 2, 2, beta)
    assert verify.check_jacobian_linear(a, b, beta).passed
    assert verify.check_jacobian_symmetric(a, beta).passed


def test_weighted_ks_uniform_weights_matches_scipy(rng):
    x = rng.standard_normal(2000)
    r = rng.standard_normal(3000) + 0.05
    d, p = verify.weighted_ks(x, r, np.ones(3000))
    ref = stats.ks_2samp(x, r, method="asymp")
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=0.05)


def test_weighted_ks_importance_weights(rng):
    # reweighting N(0, 2^2) draws to N(0, 1) recovers the standard normal
    r = 2 * rng.standard_normal(200000)
    w = np.exp(stats.norm.logpdf(r) - stats.norm.logpdf(r, scale=2))
    x = rng.standard_normal(20000)
    assert verify.weighted_ks(x, r, w)[1] > 1e-3
    assert verify.weighted_ks(x * 1.1, r, w)[1] < 1e-3


def test_gaussian_sv_density_scalar():
    # n x 1 real Gaussian with entries N(0, 1/2): |y|^2 ~ Gamma(n/2, 1)
    a = np.linspace(0.1, 3, 10)
    expect = stats.gamma.logpdf(a ** 2, 1.5) + np.log(2 * a)
    np.testing.assert_allclose(verify.gaussian_sv_logpdf(a[:, None], 3, 1), expect, rtol=1e-12)


def test_svd_measure_small(rng):
    assert verify.check_svd_measure(3, 2, 1, rng, N=20000).passed


def test_sampler_check_negative_control(rng, monkeypatch):
    p = RieszParams(3.0, [1, 0])
    assert verify.check_sampler_density("riesz", p, rng, N=20000, M=100000).passed
    # a sampler with the wrong shape must be caught
    bad = RieszParams(3.3, [1, 0])
    monkeypatch.setitem(sampler.SAMPLERS, "riesz", lambda g, q, n: sampler.sample_riesz_matrix(
        g, bad, n))
    assert not verify.check_sampler_density("riesz", p, rng, N=20000, M=100000).passed


def test_gamma_integral_scalar(rng):
    r = verify.check_gamma_integral(3.0, [2], 1, 1, rng)
    assert r.passed and r.tolerance <= 1e-10


def test_suite_is_thread_independent():
    jobs = {k: v for k, v in verify.default_jobs().items()
            if k.startswith(("svd-measure/n=3/m=1", "spherical/tau=(2,)"))}
    assert len(jobs) == 2
    one = verify.run_suite(5, jobs, threads=1)
    two = verify.run_suite(5, jobs, threads=2)
    assert [r.to_dict() for r in one] == [r.to_dict() for r in two]
    table = verify.format_table(one)
    assert "2/2 checks passed" in table or "checks passed" in table


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("RIESZ_LAB_THREADS", "3")
    assert verify.thread_count() == 3
    monkeypatch.setenv("RIESZ_LAB_THREADS", "zero")
    assert verify.thread_count() >= 1


@pytest.mark.slow
def test_default_suite_passes():
    reports = verify.run_suite(0)
    failed = [r.name for r in reports if not r.passed]
    assert not failed, verify.format_table(reports)
