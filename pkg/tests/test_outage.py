import dataclasses
import math

import pytest
from helpers import ENV, link_with_mean_snr, mp_link_cdf
from hypothesis import given, settings
from hypothesis import strategies as st

from thzrelay.channel import LinkConfig, MisalignmentParams, fading_cdf
from thzrelay.outage import (Diagnostics, Method, OutageResult, Scenario, cdf_link_bm_closed, cdf_link_nobm,
                             cdf_link_nobm_quadrature, cdf_link_quadrature, combine_links,
                             outage_probability)

# frozen from the arbitrary-precision oracle in helpers.mp_link_cdf
BM_EXAMPLE = 8.378498835439091e-06


class TestCdfLinkNobm:
    def test_zero(self):
        assert cdf_link_nobm(0.0, LinkConfig(), ENV) == 0.0

    def test_exponential_envelope(self):
        link = link_with_mean_snr(1.0, fading_alpha=1.0, fading_mu=1)
        assert cdf_link_nobm(4.0, link, ENV) == pytest.approx(1 - math.exp(-2), rel=1e-12)

    def test_integer_mu(self):
        link = link_with_mean_snr(1.0)
        assert cdf_link_nobm(1.0, link, ENV) == pytest.approx(0.57681, abs=1e-5)
        assert cdf_link_nobm(1.0, link, ENV) == pytest.approx(fading_cdf(1.0, link), rel=1e-12)

    @pytest.mark.parametrize("x", [1e-6, 0.01, 1.0, 30.0])
    def test_matches_density_integral(self, x):
        link = link_with_mean_snr(10.0, fading_alpha=2.2, fading_mu=2, fading_hhat=0.8)
        assert cdf_link_nobm(x, link, ENV) == pytest.approx(cdf_link_nobm_quadrature(x, link, ENV), rel=1e-10)


class TestCdfLinkBm:
    def link(self, **kw):
        return link_with_mean_snr(1e4, zeta=6.25, **kw)

    def test_example_against_oracle(self):
        assert cdf_link_bm_closed(1.0, self.link(), ENV) == pytest.approx(BM_EXAMPLE, rel=1e-9)
        assert cdf_link_quadrature(1.0, self.link(), ENV) == pytest.approx(BM_EXAMPLE, rel=1e-9)

    def test_limits(self):
        link = self.link()
        for f in (cdf_link_bm_closed, cdf_link_quadrature):
            assert f(0.0, link, ENV) == 0.0
        assert cdf_link_bm_closed(math.inf, link, ENV) == 1.0
        assert cdf_link_quadrature(1e30, link, ENV) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("x,alpha,mu,hhat,rho,zeta,s_o", [
        (3.0, 2.0, 2, 0.8, 50.0, 1.3, 0.7),
        (0.01, 1.5, 4, 1.2, 1e3, 0.3, 1.0),
        (1.0, 1.0, 1, 1.0, 1.0, 20.0, 0.9),
        (1.0, 2.5, 5, 1.0, 1e6, 60.0, 0.5),
    ])
    def test_both_paths_against_oracle(self, x, alpha, mu, hhat, rho, zeta, s_o):
        link = link_with_mean_snr(rho, zeta=zeta, s_o=s_o, fading_alpha=alpha, fading_mu=mu, fading_hhat=hhat)
        ref = mp_link_cdf(x, alpha, mu, hhat, rho, zeta, s_o)
        assert cdf_link_bm_closed(x, link, ENV) == pytest.approx(ref, rel=1e-9)
        assert cdf_link_quadrature(x, link, ENV) == pytest.approx(ref, rel=1e-8)

    def test_non_integer_mu(self):
        link = link_with_mean_snr(100.0, zeta=2.0, fading_mu=2.5)
        with pytest.raises(ValueError, match="integer"):
            cdf_link_bm_closed(1.0, link, ENV)
        ref = mp_link_cdf(1.0, 1.0, 2.5, 1.0, 100.0, 2.0)
        assert cdf_link_quadrature(1.0, link, ENV) == pytest.approx(ref, rel=1e-8)

    def test_requires_misalignment(self):
        with pytest.raises(ValueError):
            cdf_link_bm_closed(1.0, LinkConfig(), ENV)
        with pytest.raises(ValueError):
            cdf_link_quadrature(1.0, LinkConfig(), ENV)

    def test_large_zeta_tends_to_misalignment_free(self):
        link = link_with_mean_snr(1e3, zeta=1e4)
        free = dataclasses.replace(link, misalignment=None)
        for x in [1.0, 30.0, 300.0, 3000.0]:
            ref = cdf_link_nobm(x, free, ENV)
            assert abs(cdf_link_quadrature(x, link, ENV) - ref) < 1e-4
            assert abs(cdf_link_bm_closed(x, link, ENV) - ref) < 1e-4

    def test_literal_form_agrees_at_moderate_zeta(self):
        link = self.link()
        assert cdf_link_bm_closed(1.0, link, ENV, literal=True) == pytest.approx(BM_EXAMPLE, rel=1e-6)

    def test_literal_form_breakdown_is_reported(self):
        link = link_with_mean_snr(1e3, zeta=1e4)
        diag = Diagnostics()
        assert math.isnan(cdf_link_bm_closed(30.0, link, ENV, diag, literal=True))
        assert diag.nonconverged >= 1


@settings(max_examples=60, deadline=None)
@given(x_db=st.floats(-20.0, 40.0), alpha=st.floats(0.6, 3.5), mu=st.integers(1, 6),
       hhat=st.floats(0.5, 2.0), rho_db=st.floats(-10.0, 60.0), zeta=st.floats(0.1, 200.0),
       s_o=st.floats(0.2, 1.0))
def test_closed_form_matches_quadrature(x_db, alpha, mu, hhat, rho_db, zeta, s_o):
    link = link_with_mean_snr(10 ** (rho_db / 10), zeta=zeta, s_o=s_o, fading_alpha=alpha, fading_mu=mu,
                              fading_hhat=hhat)
    x = 10 ** (x_db / 10)
    q = cdf_link_quadrature(x, link, ENV)
    c = cdf_link_bm_closed(x, link, ENV)
    assert abs(c - q) <= max(1e-14, 1e-7 * q)


class TestCombine:
    def test_examples(self):
        assert combine_links(0.0, 0.0) == 0.0
        assert combine_links(0.1, 0.2) == pytest.approx(0.28, rel=1e-15)

    @settings(max_examples=200)
    @given(st.floats(0.0, 1.0))
    def test_absorbing(self, p):
        assert combine_links(1.0, p) == 1.0
        assert combine_links(p, 1.0) == 1.0

    @settings(max_examples=200)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_bounds_and_symmetry(self, a, b):
        c = combine_links(a, b)
        assert max(a, b) <= c + 1e-16 and c <= 1.0
        assert c == combine_links(b, a)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            combine_links(1.2, 0.0)


class TestOutageProbability:
    def bm(self, zeta, **kw):
        return link_with_mean_snr(1e4, zeta=zeta, **kw)

    def test_symmetric_misalignment_free(self):
        link = link_with_mean_snr(30.0)
        s = Scenario(link, link, ENV, snr_threshold=2.0)
        f = cdf_link_nobm(2.0, link, ENV)
        for m in (Method.CLOSED_FORM, Method.QUADRATURE):
            assert outage_probability(s, m).op == pytest.approx(1 - (1 - f) ** 2, rel=1e-14)

    def test_single_bm_factorises_exactly(self):
        l1, l2 = self.bm(3.0), link_with_mean_snr(100.0)
        s = Scenario(l1, l2, ENV, snr_threshold=1.5)
        assert s.case == "single"
        expected = combine_links(cdf_link_bm_closed(1.5, l1, ENV), cdf_link_nobm(1.5, l2, ENV))
        assert outage_probability(s, Method.CLOSED_FORM).op == expected

    def test_both_bm_factorises_exactly(self):
        l1, l2 = self.bm(3.0), self.bm(0.8, fading_alpha=2.0)
        s = Scenario(l1, l2, ENV, snr_threshold=1.5)
        assert s.case == "both"
        expected = combine_links(cdf_link_bm_closed(1.5, l1, ENV), cdf_link_bm_closed(1.5, l2, ENV))
        assert outage_probability(s, Method.CLOSED_FORM).op == expected
        expected_q = combine_links(cdf_link_quadrature(1.5, l1, ENV), cdf_link_quadrature(1.5, l2, ENV))
        assert outage_probability(s, Method.QUADRATURE).op == expected_q

    def test_degenerate_misalignment_limit(self):
        l_bm = link_with_mean_snr(1e3, zeta=1e4)
        l_free = dataclasses.replace(l_bm, misalignment=None)
        for th in [1.0, 10.0, 100.0, 1000.0]:
            a = outage_probability(Scenario(l_bm, l_bm, ENV, th)).op
            b = outage_probability(Scenario(l_free, l_free, ENV, th), Method.CLOSED_FORM).op
            assert abs(a - b) < 1e-4

    def test_default_scenario(self):
        s = Scenario()
        assert s.case == "none"
        assert outage_probability(s, Method.CLOSED_FORM).op == pytest.approx(
            outage_probability(s, Method.QUADRATURE).op, rel=1e-12)

    def test_result_invariants(self):
        with pytest.raises(ValueError):
            OutageResult(1.5, Method.QUADRATURE)
        with pytest.raises(ValueError):
            OutageResult(0.1, Method.MONTE_CARLO)
        with pytest.raises(ValueError):
            OutageResult(0.1, Method.QUADRATURE, stderr=0.01)
        with pytest.raises(ValueError):
            Scenario(snr_threshold=0.0)

    def test_monte_carlo_dispatch(self):
        from thzrelay.mcsim import McConfig
        res = outage_probability(Scenario(snr_threshold=1e6), Method.MONTE_CARLO, McConfig(trials=20_000))
        assert res.stderr is not None and 0.0 <= res.op <= 1.0


def _bm_scenario(th_db=0.0, p1=50.0, p2=50.0, gain=55.0, sigma1=0.02, sigma2=0.02):
    mp = MisalignmentParams.from_geometry
    l1 = LinkConfig(tx_power_over_noise_db=p1, tx_gain_db=gain, misalignment=mp(0.05, sigma1))
    l2 = LinkConfig(tx_power_over_noise_db=p2, misalignment=mp(0.05, sigma2))
    return Scenario(l1, l2, ENV, 10 ** (th_db / 10))


def _sorted_grid(lo, hi, n=100):
    return st.lists(st.floats(lo, hi), min_size=n, max_size=n).map(sorted)


def _nondecreasing(values):
    return all(b >= a * (1 - 1e-12) for a, b in zip(values, values[1:]))


class TestMonotonicity:
    """Randomised 100-point grids through the closed form; quadrature spot checks."""

    @settings(max_examples=5, deadline=None)
    @given(grid=_sorted_grid(-20.0, 60.0))
    def test_in_threshold(self, grid):
        ops = [outage_probability(_bm_scenario(th_db=t), Method.CLOSED_FORM).op for t in grid]
        assert _nondecreasing(ops)

    @settings(max_examples=5, deadline=None)
    @given(grid=_sorted_grid(0.0, 80.0))
    def test_in_budget(self, grid):
        ops = [outage_probability(_bm_scenario(p1=p), Method.CLOSED_FORM).op for p in grid]
        assert _nondecreasing(ops[::-1])

    @settings(max_examples=5, deadline=None)
    @given(grid=_sorted_grid(20.0, 80.0))
    def test_in_antenna_gain(self, grid):
        ops = [outage_probability(_bm_scenario(gain=g), Method.CLOSED_FORM).op for g in grid]
        assert _nondecreasing(ops[::-1])

    @settings(max_examples=5, deadline=None)
    @given(grid=_sorted_grid(0.005, 0.06))
    def test_in_jitter(self, grid):
        ops = [outage_probability(_bm_scenario(sigma1=s, sigma2=s), Method.CLOSED_FORM).op for s in grid]
        assert _nondecreasing(ops)

    def test_quadrature_in_jitter(self):
        sig = [0.01, 0.015, 0.02, 0.03, 0.04, 0.05]
        ops = [outage_probability(_bm_scenario(sigma1=s), Method.QUADRATURE).op for s in sig]
        assert _nondecreasing(ops)
