"""Photon-state algebra: Fock expansions, overlaps, Husimi functions,
and the coherent-state quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from qlsfi.errors import BandTooSmallError, InvalidParameterError
from qlsfi.model import FockBand
from qlsfi.photon import (
    AlphaQuadrature,
    CoherentSpec,
    FockSpec,
    SqueezedVacuumSpec,
    build_alpha_quadrature,
    coherent_overlap_fock,
    coherent_overlap_fock_grid,
    coherent_squeezed_overlap,
    q_function,
    squeezed_fock_coeffs,
    squeezed_required_n_max,
)


def _squeeze_operator_coeffs(r, phi, n_dim):
    """Independent reference: expm of the squeeze generator on vacuum.

    Builds (xi/2) adag^2 - (xi*/2) a^2 with xi = r e^{i phi} as a dense
    matrix on a truncated Fock space and applies its exponential to |0>.
    """
    a = np.diag(np.sqrt(np.arange(1, n_dim)), 1)
    adag = a.T
    xi = r * np.exp(1j * phi)
    gen = 0.5 * xi * (adag @ adag) - 0.5 * np.conj(xi) * (a @ a)
    vac = np.zeros(n_dim)
    vac[0] = 1.0
    return expm(gen) @ vac


class TestCoherentOverlap:
    def test_closed_form(self):
        alpha = 0.7 - 0.4j
        for n in (0, 1, 5, 20):
            want = (np.exp(-abs(alpha) ** 2 / 2) * alpha ** n
                    / np.sqrt(float(math.factorial(n))))
            assert coherent_overlap_fock(n, alpha) == pytest.approx(
                want, rel=1e-12)

    def test_grid_matches_scalar(self):
        band = FockBand(0, 12)
        alphas = np.array([0.3, -1.2 + 0.5j, 2.0j])
        grid = coherent_overlap_fock_grid(band, alphas)
        for j, alpha in enumerate(alphas):
            for k, n in enumerate(band.ns):
                assert grid[j, k] == pytest.approx(
                    coherent_overlap_fock(n, alpha), rel=1e-12, abs=1e-15)

    @given(st.floats(min_value=0.0, max_value=4.0),
           st.floats(min_value=-np.pi, max_value=np.pi))
    @settings(max_examples=30, deadline=None)
    def test_normalization(self, rho, theta):
        alpha = rho * np.exp(1j * theta)
        band = FockBand(0, int(rho ** 2 + 12 * max(1.0, rho)))
        amps = coherent_overlap_fock_grid(band, [alpha])[0]
        assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-9)


class TestSqueezedCoefficients:
    @pytest.mark.parametrize("r,phi", [(0.5, 0.0), (1.2, 0.0),
                                       (0.8, 1.1), (1.5, -2.0)])
    def test_against_squeeze_operator(self, r, phi):
        n_max = squeezed_required_n_max(r, 1e-14)
        band = FockBand(0, n_max)
        got = squeezed_fock_coeffs(r, phi, band).coeffs
        ref = _squeeze_operator_coeffs(r, phi, n_max + 200)[:n_max + 1]
        np.testing.assert_allclose(got, ref, atol=1e-9)

    def test_odd_terms_vanish(self):
        band = FockBand(0, squeezed_required_n_max(1.0))
        s = squeezed_fock_coeffs(1.0, 0.3, band).coeffs
        assert np.all(s[1::2] == 0.0)

    def test_normalized(self):
        band = FockBand(0, squeezed_required_n_max(1.5, 1e-13))
        s = squeezed_fock_coeffs(1.5, 0.0, band).coeffs
        assert np.sum(np.abs(s) ** 2) == pytest.approx(1.0, abs=1e-11)

    def test_mean_photon_number(self):
        r = 1.2
        band = FockBand(0, squeezed_required_n_max(r, 1e-13))
        p = np.abs(squeezed_fock_coeffs(r, 0.0, band).coeffs) ** 2
        assert np.sum(band.ns * p) == pytest.approx(np.sinh(r) ** 2, rel=1e-9)

    def test_band_too_small(self):
        with pytest.raises(BandTooSmallError) as exc:
            squeezed_fock_coeffs(2.0, 0.0, FockBand(0, 10))
        assert exc.value.required_n_max > 10

    def test_closed_form_overlap_consistent(self):
        # <alpha|S(r)|0> from the Fock sum vs the analytic Gaussian
        r, phi, alpha = 0.9, 0.4, 1.1 - 0.6j
        band = FockBand(0, squeezed_required_n_max(r, 1e-14))
        ph = squeezed_fock_coeffs(r, phi, band)
        from_sum = np.sum(
            np.conj(coherent_overlap_fock_grid(band, [alpha])[0]) * ph.coeffs)
        closed = coherent_squeezed_overlap(alpha, r, phi)
        assert from_sum == pytest.approx(closed, rel=1e-10)


class TestStateSpecs:
    def test_fock_spec_delta(self):
        band = FockBand(0, 6)
        c = FockSpec(n=4).fock_coeffs(band).coeffs
        assert c[4] == 1.0 and np.sum(np.abs(c) ** 2) == 1.0

    def test_fock_spec_outside_band(self):
        with pytest.raises(BandTooSmallError):
            FockSpec(n=9).fock_coeffs(FockBand(0, 6))

    def test_coherent_spec_matches_grid(self):
        band = FockBand(0, 40)
        spec = CoherentSpec(alpha0=1.3 + 0.2j)
        np.testing.assert_allclose(
            spec.fock_coeffs(band).coeffs,
            coherent_overlap_fock_grid(band, [spec.alpha0])[0], rtol=1e-13)

    def test_overlap_methods_match_fock_sums(self):
        band = FockBand(0, 120)
        alphas = np.array([0.4, 1.5 - 1.0j])
        kern = coherent_overlap_fock_grid(band, alphas)
        for spec in (SqueezedVacuumSpec(r=1.1, phi=0.7),
                     CoherentSpec(alpha0=0.9j), FockSpec(n=3)):
            coeffs = spec.fock_coeffs(band).coeffs
            want = np.conj(kern) @ coeffs      # <alpha|phi>
            np.testing.assert_allclose(spec.overlap(alphas), want,
                                       rtol=1e-9, atol=1e-12)


class TestQFunction:
    def test_vacuum_gaussian(self):
        band = FockBand(0, 5)
        vac = FockSpec(n=0).fock_coeffs(band)
        alphas = np.array([0.0, 0.5, 1.0 + 1.0j])
        np.testing.assert_allclose(
            q_function(alphas, vac),
            np.exp(-np.abs(alphas) ** 2) / np.pi, rtol=1e-12)

    def test_integrates_to_inverse_pi(self):
        # the quadrature discretizes d^2alpha/pi, so summing Q gives 1/pi
        band = FockBand(0, squeezed_required_n_max(1.0))
        quad = build_alpha_quadrature(band, 40, 2 * band.n_max + 2,
                                      radial_rule="gauss-laguerre",
                                      check=False)
        state = SqueezedVacuumSpec(r=1.0).fock_coeffs(band)
        total = float(np.sum(quad.weights * q_function(quad.alphas, state)))
        assert total == pytest.approx(1.0 / np.pi, abs=1e-8)


class TestQuadrature:
    def test_identity_small_band(self):
        band = FockBand(0, 20)
        quad = build_alpha_quadrature(band, 40, 2 * 20 + 2, check=False)
        err, _ = quad.identity_error(band)
        assert err < 1e-8

    def test_angular_aliasing_detected(self):
        # with only n_max angular nodes the mode e^{i n_max theta} aliases
        # onto the diagonal and the identity check must fail loudly
        band = FockBand(0, 20)
        nodes, weights = _raw_polar_rule(24, 20, rho_max=np.sqrt(20) + 6)
        quad = AlphaQuadrature(alphas=nodes, weights=weights,
                               n_radial=24, n_angular=20,
                               rho_max=float(np.sqrt(20) + 6))
        err, pair = quad.identity_error(band)
        assert err > 1e-4
        assert abs(pair[0] - pair[1]) in (0, 20)

    def test_too_few_angular_rejected(self):
        band = FockBand(0, 20)
        with pytest.raises(InvalidParameterError):
            build_alpha_quadrature(band, 24, 2 * 20, check=False)

    def test_laguerre_rule_exact(self):
        band = FockBand(0, 30)
        quad = build_alpha_quadrature(band, 16, 62,
                                      radial_rule="gauss-laguerre",
                                      check=False)
        err, _ = quad.identity_error(band)
        assert err < 1e-12

    def test_weights_positive(self):
        band = FockBand(0, 10)
        for rule in ("gauss-legendre", "gauss-laguerre"):
            quad = build_alpha_quadrature(band, 8, 22, radial_rule=rule,
                                          check=False)
            assert np.all(quad.weights > 0)

    def test_unknown_rule_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_alpha_quadrature(FockBand(0, 4), 4, 10,
                                   radial_rule="monte-carlo")


def _raw_polar_rule(n_radial, n_angular, rho_max):
    """Plain polar-product nodes without the angular-count guard."""
    from numpy.polynomial.legendre import leggauss
    nodes, gl_w = leggauss(n_radial)
    rho = 0.5 * rho_max * (nodes + 1.0)
    w_rho = 0.5 * rho_max * gl_w * rho
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    alphas = (rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = np.broadcast_to(w_rho[:, None] * (2.0 * np.pi / n_angular)
                              / np.pi, (n_radial, n_angular)).ravel().copy()
    return alphas, weights
