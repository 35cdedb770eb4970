"""Ensemble engines over the coherent-amplitude plane.

The Q engine forms incoherent, Husimi-weighted sums of per-node
observables. The R engine coherently superposes the same per-node
wavefunctions with overlap weights <alpha|phi_gamma>, reconstructing a
joint electron-photon state that retains entanglement; dropping the
off-diagonal coherences reproduces the Q results exactly.

All cross-node reductions accumulate in fixed node order so results
are bitwise independent of worker count and completion order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CoherentSumIncompleteError, EnsembleError
from .photon import coherent_overlap_fock_grid
from .propagate import JointState, propagate_classical_batch
from .spectra import photon_distribution, spectrum_columns


@dataclass
class EnsembleRun:
    """Per-node final wavefunctions (or spectra) over an alpha quadrature."""

    quadrature: object
    overlaps: np.ndarray                 # <alpha_j|phi_gamma>
    psi_final: np.ndarray = None         # (n_nodes, nx)
    pes_per_node: np.ndarray = None      # (n_nodes, n_bins), memory-saving mode
    atom: object = None
    method: str = "classical-ensemble"
    complete: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def n_nodes(self):
        return self.quadrature.n_nodes


def _mirror_partner_order(quadrature):
    """Indices of nodes to propagate plus the x-reflection map.

    Nodes come from a polar product rule laid out radial-major with the
    angular index fastest; alpha and -alpha sit n_angular/2 apart in
    angle. Returns (primary_idx, partner_of) where partner_of[j] is the
    propagated node whose x-mirrored wavefunction equals node j's.
    """
    n_r, n_a = quadrature.n_radial, quadrature.n_angular
    if n_a % 2 != 0:
        return np.arange(quadrature.n_nodes), None
    idx = np.arange(quadrature.n_nodes).reshape(n_r, n_a)
    primary = idx[:, : n_a // 2].ravel()
    partner = np.empty(quadrature.n_nodes, dtype=int)
    partner[idx[:, : n_a // 2].ravel()] = idx[:, : n_a // 2].ravel()
    partner[idx[:, n_a // 2:].ravel()] = idx[:, : n_a // 2].ravel()
    return primary, partner


def run_ensemble(psi0, photon_spec, quadrature, atom, fp, env, sched,
                 use_parity=True, n_workers=1, weight_cutoff=0.0):
    """Propagate one classical-field electron per quadrature node.

    psi0: initial ElectronState shared by all nodes. Exploits the
    alpha -> -alpha / x -> -x mirror symmetry to halve the propagation
    count unless use_parity is False. weight_cutoff skips nodes whose
    |<alpha|phi>| falls below it (their wavefunction is kept as the
    unpropagated psi0; contributions are negligible by construction).
    """
    alphas = quadrature.alphas
    overlaps = np.asarray(photon_spec.overlap(alphas), dtype=complex)
    nx = psi0.psi.size
    psi_final = np.empty((alphas.size, nx), dtype=complex)

    if use_parity:
        primary, partner = _mirror_partner_order(quadrature)
    else:
        primary, partner = np.arange(alphas.size), None

    active = primary
    if weight_cutoff > 0:
        if partner is not None:
            keep = np.zeros(alphas.size, dtype=bool)
            needed = np.abs(overlaps) >= weight_cutoff
            keep[partner[needed]] = True
            active = primary[keep[primary]]
        else:
            active = primary[np.abs(overlaps[primary]) >= weight_cutoff]
        psi_final[:] = psi0.psi[None, :]

    def propagate_chunk(chunk):
        return chunk, propagate_classical_batch(
            psi0.psi, alphas[chunk], atom, fp, env, sched)

    failed = []
    chunks = np.array_split(active, max(1, min(n_workers, active.size))) \
        if active.size else []
    if n_workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for chunk, out in pool.map(propagate_chunk, chunks):
                psi_final[chunk] = out
    else:
        for chunk in chunks:
            try:
                _, out = propagate_chunk(chunk)
                psi_final[chunk] = out
            except Exception as exc:  # pragma: no cover - defensive
                failed.append((chunk.tolist(), repr(exc)))
    if failed:
        raise EnsembleError(f"{len(failed)} node chunks failed: {failed}",
                            failed_nodes=[c for c, _ in failed])

    if partner is not None:
        mirrored = np.setdiff1d(np.arange(alphas.size), active,
                                assume_unique=False)
        mirrored = mirrored[np.isin(partner[mirrored], active)]
        psi_final[mirrored] = psi_final[partner[mirrored]][:, ::-1]

    return EnsembleRun(
        quadrature=quadrature, overlaps=overlaps, psi_final=psi_final,
        atom=atom, method="classical-ensemble", complete=True,
        metadata={"n_radial": quadrature.n_radial,
                  "n_angular": quadrature.n_angular,
                  "rho_max": quadrature.rho_max,
                  "use_parity": bool(use_parity),
                  "weight_cutoff": float(weight_cutoff),
                  "partner": partner,
                  "propagated": np.sort(active)})


def _node_spectra(run, egrid, project_bound):
    """Per-node window spectra, (n_nodes, n_bins); cached on the run.

    Spectra are computed only for propagated nodes. Mirror partners
    share their partner's spectrum (the window spectrum of an
    x-reflected wavefunction is the same), and nodes skipped by the
    weight cutoff share one spectrum of the untouched initial state.
    """
    key = ("node_spectra", egrid.e_min, egrid.e_max, egrid.n_bins,
           egrid.gamma, egrid.window_order, project_bound)
    if key in run.metadata:
        return run.metadata[key]
    if run.psi_final is None:
        if run.pes_per_node is None:
            raise CoherentSumIncompleteError(
                "run stores neither wavefunctions nor spectra")
        return run.pes_per_node

    partner = run.metadata.get("partner")
    propagated = run.metadata.get("propagated")
    if propagated is None:
        out = spectrum_columns(run.psi_final.T, run.atom, egrid,
                               project_bound).T
    else:
        n_nodes = run.psi_final.shape[0]
        rep = partner if partner is not None else np.arange(n_nodes)
        rows = spectrum_columns(run.psi_final[propagated].T, run.atom,
                                egrid, project_bound).T
        row_of = np.full(n_nodes, -1, dtype=int)
        row_of[propagated] = np.arange(propagated.size)
        out = np.empty((n_nodes, egrid.n_bins))
        have = row_of[rep] >= 0
        out[have] = rows[row_of[rep[have]]]
        if not np.all(have):
            # cutoff-skipped nodes all hold the same initial state
            j0 = int(np.flatnonzero(~have)[0])
            out[~have] = spectrum_columns(
                run.psi_final[j0:j0 + 1].T, run.atom, egrid,
                project_bound).T[0]
    run.metadata[key] = out
    return out


def _q_weights(run):
    """w_j |<alpha_j|phi>|^2, i.e. quadrature weight times pi Q(alpha_j)."""
    return run.quadrature.weights * np.abs(run.overlaps) ** 2


def qrep_total_pes(run, egrid, project_bound=8):
    """Husimi-weighted incoherent total photoelectron spectrum."""
    node_pes = _node_spectra(run, egrid, project_bound)
    w = _q_weights(run)
    out = np.zeros(egrid.n_bins)
    for j in range(run.n_nodes):        # fixed-order reduction
        out += w[j] * node_pes[j]
    return out


def qrep_joint(run, egrid, band, project_bound=8):
    """P_Q(E, n) = sum_j w_j |<a_j|phi>|^2 |<n|a_j>|^2 P(E; a_j)."""
    node_pes = _node_spectra(run, egrid, project_bound)
    kern = np.abs(coherent_overlap_fock_grid(band, run.quadrature.alphas)) ** 2
    w = _q_weights(run)
    out = np.zeros((egrid.n_bins, band.count))
    for j in range(run.n_nodes):
        out += w[j] * np.outer(node_pes[j], kern[j])
    return out


def qrep_photon_dist(photon_spec, quadrature, band):
    """P_Q(n) = integral d^2alpha Q(alpha) |<n|alpha>|^2.

    Independent of any propagation and therefore time-independent.
    """
    overlaps = np.asarray(photon_spec.overlap(quadrature.alphas), dtype=complex)
    kern = np.abs(coherent_overlap_fock_grid(band, quadrature.alphas)) ** 2
    w = quadrature.weights * np.abs(overlaps) ** 2
    out = np.zeros(band.count)
    for j in range(quadrature.n_nodes):
        out += w[j] * kern[j]
    return out


def rrep_joint_state(run, band, grid):
    """Coherent reconstruction c(x, n) = sum_j w_j <n|a_j><a_j|phi> psi_j(x)."""
    if not run.complete or run.psi_final is None:
        raise CoherentSumIncompleteError(
            "R-representation requires every node's final wavefunction")
    kern = coherent_overlap_fock_grid(band, run.quadrature.alphas)  # (J, N)
    coeff = run.quadrature.weights * run.overlaps                   # (J,)
    c = np.zeros((run.psi_final.shape[1], band.count), dtype=complex)
    for j in range(run.n_nodes):        # fixed-order reduction
        c += np.outer(run.psi_final[j], coeff[j] * kern[j])
    return JointState(grid=grid, band=band, c=c)


def rrep_photon_dist(run, band, grid):
    """P_R(n): photon distribution of the coherent reconstruction."""
    return photon_distribution(rrep_joint_state(run, band, grid))


def rrep_joint_spectrum(run, band, grid, egrid, project_bound=8):
    """P_R(E, n): window spectrum of the coherent reconstruction."""
    from .spectra import joint_spectrum
    state = rrep_joint_state(run, band, grid)
    return joint_spectrum(state, run.atom, egrid, project_bound)


def diagonal_truncation(run, egrid, band, photon_spec, project_bound=8):
    """R-representation with off-diagonal coherences dropped.

    By construction identical to the Q-representation results; kept as
    an executable demonstration of that reduction.
    """
    return (qrep_photon_dist(photon_spec, run.quadrature, band),
            qrep_joint(run, egrid, band, project_bound))
