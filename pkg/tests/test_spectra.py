"""Window-operator spectroscopy against dense-resolvent references, and
ponderomotive algebra."""

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from qlsfi.errors import InvalidParameterError
from qlsfi.model import FieldParams, FockBand, derive_field_params
from qlsfi.propagate import ElectronState, atomic_tridiag, ground_state
from qlsfi.spectra import (
    EnergyGrid,
    cutoff_lines,
    photon_distribution,
    spectrum_columns,
    up_shift,
    window_probability,
)


def _dense_window(psi, atom, e_k, gamma, m):
    """Reference via the dense eigendecomposition of H_A."""
    off, diag = atomic_tridiag(atom)
    vals, vecs = eigh_tridiagonal(diag, off)
    c = vecs.T @ psi
    p = gamma ** (2 * m) / ((vals - e_k) ** (2 * m) + gamma ** (2 * m))
    return float(np.sum(np.abs(c) ** 2 * p) * atom.grid.dx)


class TestWindowOracle:
    @pytest.mark.parametrize("m", [1, 2])
    @pytest.mark.parametrize("e_k", [-0.5, 0.0, 0.35, 1.7])
    def test_dense_resolvent(self, small_atom, m, e_k):
        rng = np.random.default_rng(11)
        nx = small_atom.grid.nx
        psi = rng.standard_normal(nx) + 1j * rng.standard_normal(nx)
        psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * small_atom.grid.dx)
        state = ElectronState(grid=small_atom.grid, psi=psi)
        got = window_probability(state, small_atom, e_k, gamma=0.05, m=m)
        want = _dense_window(psi, small_atom, e_k, 0.05, m)
        assert got == pytest.approx(want, rel=1e-11)

    def test_ground_state_peak_bin(self, small_atom):
        psi, energy = ground_state(small_atom)
        value = window_probability(psi, small_atom, energy, gamma=0.02, m=2)
        assert value == pytest.approx(1.0, abs=1e-4)

    def test_falloff_away_from_peak(self, small_atom):
        psi, energy = ground_state(small_atom)
        gamma = 0.02
        value = window_probability(psi, small_atom, energy + 20 * gamma,
                                   gamma, m=2)
        assert value < 1e-4

    def test_tiling_sums_to_norm(self, small_atom):
        # sampled densely (gamma = 2 dE) and normalized as a density,
        # the windows integrate to the total probability
        rng = np.random.default_rng(12)
        nx = small_atom.grid.nx
        psi = rng.standard_normal(nx) + 1j * rng.standard_normal(nx)
        psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * small_atom.grid.dx)
        off, diag = atomic_tridiag(small_atom)
        vals, _ = eigh_tridiagonal(diag, off)
        d_e = 0.05
        gamma = 2.0 * d_e
        lo = vals.min() - 7.0 * gamma
        hi = vals.max() + 7.0 * gamma
        energies = np.arange(lo, hi, d_e)
        state = ElectronState(grid=small_atom.grid, psi=psi)
        total = sum(window_probability(state, small_atom, e_k, gamma, m=2)
                    for e_k in energies)
        # integral of 1/(u^4+1) is pi/sqrt(2)
        total *= d_e / (gamma * np.pi / np.sqrt(2.0))
        assert total == pytest.approx(1.0, abs=1e-3)

    def test_invalid_parameters(self, small_atom):
        psi, _ = ground_state(small_atom)
        with pytest.raises(InvalidParameterError):
            window_probability(psi, small_atom, 0.1, gamma=-1.0)
        with pytest.raises(InvalidParameterError):
            window_probability(psi, small_atom, 0.1, gamma=0.1, m=3)


class TestEnergyGrid:
    def test_default_gamma_is_half_spacing(self):
        eg = EnergyGrid(e_min=0.0, e_max=2.0, n_bins=101)
        assert eg.gamma == pytest.approx(eg.delta_e / 2.0)

    def test_energies_span(self):
        eg = EnergyGrid(e_min=0.5, e_max=1.5, n_bins=11)
        assert eg.energies[0] == 0.5 and eg.energies[-1] == 1.5

    def test_rejects_bad_ranges(self):
        with pytest.raises(InvalidParameterError):
            EnergyGrid(e_min=1.0, e_max=0.5, n_bins=10)
        with pytest.raises(InvalidParameterError):
            EnergyGrid(e_min=0.0, e_max=1.0, n_bins=10, window_order=3)


class TestSpectrumColumns:
    def test_bound_projection_removes_ground_population(self, small_atom):
        psi, _ = ground_state(small_atom)
        eg = EnergyGrid(e_min=-0.6, e_max=0.5, n_bins=45)
        raw = spectrum_columns(psi.psi[:, None], small_atom, eg)[:, 0]
        projected = spectrum_columns(psi.psi[:, None], small_atom, eg,
                                     project_bound=4)[:, 0]
        assert raw.max() > 0.5
        assert projected.max() < 1e-10

    def test_columns_independent(self, small_atom):
        rng = np.random.default_rng(13)
        nx = small_atom.grid.nx
        cols = rng.standard_normal((nx, 3)) + 1j * rng.standard_normal((nx, 3))
        eg = EnergyGrid(e_min=0.0, e_max=1.0, n_bins=9)
        joint = spectrum_columns(cols, small_atom, eg)
        for j in range(3):
            single = spectrum_columns(cols[:, j:j + 1], small_atom, eg)[:, 0]
            np.testing.assert_allclose(joint[:, j], single, rtol=1e-12)


class TestPhotonDistribution:
    def test_sums_to_norm(self, small_atom):
        from qlsfi.photon import SqueezedVacuumSpec
        from qlsfi.propagate import init_joint_state
        psi, _ = ground_state(small_atom)
        band = FockBand(0, 60)
        photon = SqueezedVacuumSpec(r=0.7).fock_coeffs(band)
        state = init_joint_state(psi, photon)
        dist = photon_distribution(state)
        assert dist.shape == (band.count,)
        assert dist.sum() == pytest.approx(state.norm(), abs=1e-12)


class TestPonderomotive:
    def test_up_shift_linear_in_n(self):
        fp = FieldParams(omega=0.8, eps_v=0.01)
        ns = np.arange(0, 50)
        up = up_shift(ns, fp)
        slopes = np.diff(up)
        np.testing.assert_allclose(
            slopes, fp.eps_v ** 2 / fp.omega ** 2, rtol=1e-12)

    def test_half_photon_offset_from_classical(self):
        # at n = sinh^2 r the Fock-resolved shift exceeds the classical
        # E0^2/(4 w^2) by exactly the half-photon term eps_v^2/(2 w^2)
        e0, r, omega = 0.06, 1.7, 0.8
        fp = derive_field_params(e0, r, omega)
        n_bar = np.sinh(r) ** 2
        classical = e0 ** 2 / (4.0 * omega ** 2)
        got = up_shift(n_bar, fp)
        half_photon = fp.eps_v ** 2 / (2.0 * omega ** 2)
        assert got - classical == pytest.approx(half_photon, rel=1e-12)

    def test_cutoff_lines_factors(self):
        fp = FieldParams(omega=0.8, eps_v=0.01)
        band = FockBand(0, 10)
        ns, lo, hi = cutoff_lines(fp, band)
        np.testing.assert_allclose(lo, 2.0 * up_shift(ns, fp), rtol=1e-14)
        np.testing.assert_allclose(hi, 10.0 * up_shift(ns, fp), rtol=1e-14)

    def test_negative_n_rejected(self):
        fp = FieldParams(omega=0.8, eps_v=0.01)
        with pytest.raises(InvalidParameterError):
            up_shift(-1, fp)
