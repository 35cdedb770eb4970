"""Q- and R-representation ensemble engines on small problems."""

import numpy as np
import pytest

from qlsfi.model import (
    AtomModel,
    FieldParams,
    FockBand,
    PulseEnvelope,
    SpaceGrid,
)
from qlsfi.photon import (
    CoherentSpec,
    FockSpec,
    SqueezedVacuumSpec,
    build_alpha_quadrature,
)
from qlsfi.propagate import (
    Schedule,
    ground_state,
    init_joint_state,
    propagate_classical,
    propagate_fullq,
)
from qlsfi.spectra import EnergyGrid, photon_distribution
from qlsfi.ensembles import (
    diagonal_truncation,
    qrep_joint,
    qrep_photon_dist,
    qrep_total_pes,
    rrep_joint_state,
    rrep_photon_dist,
    run_ensemble,
)


@pytest.fixture(scope="module")
def setting():
    grid = SpaceGrid(x_max=20.0, nx=201)
    atom = AtomModel(grid=grid)
    psi, _ = ground_state(atom)
    fp = FieldParams(omega=0.8, eps_v=0.02)
    env = PulseEnvelope(0.0, 1.0, 0.0, 2.0 * np.pi / 0.8)
    sched = Schedule.for_pulse(env, 0.1)
    return grid, atom, psi, fp, env, sched


@pytest.fixture(scope="module")
def small_quadrature():
    band = FockBand(0, 30)
    return band, build_alpha_quadrature(band, 16, 62,
                                        radial_rule="gauss-laguerre")


class TestRunEnsemble:
    def test_deterministic_across_workers(self, setting, small_quadrature):
        grid, atom, psi, fp, env, sched = setting
        band, quad = small_quadrature
        spec = SqueezedVacuumSpec(r=0.5)
        runs = [run_ensemble(psi, spec, quad, atom, fp, env, sched,
                             n_workers=k) for k in (1, 3)]
        assert runs[0].psi_final.tobytes() == runs[1].psi_final.tobytes()
        eg = EnergyGrid(0.0, 1.0, 9)
        p0 = qrep_total_pes(runs[0], eg)
        p1 = qrep_total_pes(runs[1], eg)
        assert p0.tobytes() == p1.tobytes()

    def test_parity_shortcut_matches_direct(self, setting, small_quadrature):
        grid, atom, psi, fp, env, sched = setting
        band, quad = small_quadrature
        spec = SqueezedVacuumSpec(r=0.5)
        fast = run_ensemble(psi, spec, quad, atom, fp, env, sched,
                            use_parity=True)
        slow = run_ensemble(psi, spec, quad, atom, fp, env, sched,
                            use_parity=False)
        np.testing.assert_allclose(fast.psi_final, slow.psi_final,
                                   atol=1e-12)

    def test_each_node_is_a_classical_run(self, setting, small_quadrature):
        grid, atom, psi, fp, env, sched = setting
        band, quad = small_quadrature
        run = run_ensemble(psi, SqueezedVacuumSpec(r=0.5), quad, atom, fp,
                           env, sched, use_parity=False)
        for j in (0, 7, quad.n_nodes - 1):
            single = propagate_classical(psi, quad.alphas[j], atom, fp,
                                         env, sched)
            np.testing.assert_array_equal(run.psi_final[j], single.psi)

    def test_norms_preserved(self, setting, small_quadrature):
        grid, atom, psi, fp, env, sched = setting
        band, quad = small_quadrature
        run = run_ensemble(psi, SqueezedVacuumSpec(r=0.5), quad, atom, fp,
                           env, sched)
        norms = np.sum(np.abs(run.psi_final) ** 2, axis=1) * grid.dx
        np.testing.assert_allclose(norms, 1.0, atol=1e-10)


class TestQRepresentation:
    def test_vacuum_smearing_analytic(self):
        # Husimi smearing of the vacuum: P_Q(n) = 2^{-(n+1)}
        band = FockBand(0, 40)
        quad = build_alpha_quadrature(band, 21, 82,
                                      radial_rule="gauss-laguerre")
        dist = qrep_photon_dist(FockSpec(n=0), quad, band)
        want = 2.0 ** (-(band.ns + 1.0))
        np.testing.assert_allclose(dist, want, atol=1e-8)

    def test_photon_dist_time_independent_identity(self, small_quadrature):
        # the Q distribution never references propagation output
        band, quad = small_quadrature
        spec = SqueezedVacuumSpec(r=0.5)
        d1 = qrep_photon_dist(spec, quad, band)
        d2 = qrep_photon_dist(spec, quad, band)
        assert d1.tobytes() == d2.tobytes()

    def test_joint_marginal_consistency(self, setting, small_quadrature):
        grid, atom, psi, fp, env, sched = setting
        band, quad = small_quadrature
        spec = SqueezedVacuumSpec(r=0.5)
        run = run_ensemble(psi, spec, quad, atom, fp, env, sched)
        eg = EnergyGrid(0.0, 1.2, 13)
        joint = qrep_joint(run, eg, band)
        total = qrep_total_pes(run, eg)
        # summing the joint over n recovers the total PES up to the
        # kernel mass that large-|alpha| nodes carry beyond the band
        np.testing.assert_allclose(joint.sum(axis=1), total, rtol=1e-3)

    def test_diagonal_truncation_equals_qrep(self, setting, small_quadrature):
        grid, atom, psi, fp, env, sched = setting
        band, quad = small_quadrature
        spec = SqueezedVacuumSpec(r=0.5)
        run = run_ensemble(psi, spec, quad, atom, fp, env, sched)
        eg = EnergyGrid(0.0, 1.2, 7)
        dist, joint = diagonal_truncation(run, eg, band, spec)
        np.testing.assert_array_equal(dist, qrep_photon_dist(spec, quad, band))
        np.testing.assert_array_equal(joint, qrep_joint(run, eg, band))


class TestRRepresentation:
    def test_reconstructs_initial_product_state(self, setting,
                                                small_quadrature):
        # with no field the ensemble nodes stay identical up to phase,
        # and the coherent sum rebuilds psi(x) s_n
        grid, atom, psi, fp, env, sched = setting
        band, quad = small_quadrature
        weak = FieldParams(omega=0.8, eps_v=1e-30)
        spec = SqueezedVacuumSpec(r=0.5)
        run = run_ensemble(psi, spec, quad, atom, weak, env, sched)
        state = rrep_joint_state(run, band, grid)
        want = init_joint_state(psi, spec.fock_coeffs(band))
        phase = np.vdot(want.c.ravel(), state.c.ravel())
        phase /= abs(phase)
        np.testing.assert_allclose(state.c, phase * want.c, atol=1e-6)

    def test_photon_distribution_tracks_fullq(self, setting):
        grid, atom, psi, fp, env, sched = setting
        band = FockBand(0, 40)
        quad = build_alpha_quadrature(band, 21, 82,
                                      radial_rule="gauss-laguerre")
        spec = SqueezedVacuumSpec(r=0.5)
        photon = spec.fock_coeffs(band, truncation_threshold=1e-7)
        state0 = init_joint_state(psi, photon)
        final, _ = propagate_fullq(state0, atom, fp, env, sched)
        pn_full = photon_distribution(final)
        run = run_ensemble(psi, spec, quad, atom, fp, env, sched)
        pn_r = rrep_photon_dist(run, band, grid)
        l1 = np.sum(np.abs(pn_full - pn_r)) / np.sum(pn_full)
        assert l1 < 0.05
