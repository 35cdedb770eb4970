"""Observable extraction: window-operator photoelectron spectra, joint
electron-photon energy spectra, photon-number distributions, and
ponderomotive utilities.

The window operator W(E) = g^{2m} / ((H_A - E)^{2m} + g^{2m}) with
m = 2 is evaluated by factoring (H_A - E)^2 - i g^2 into two linear
tridiagonal factors with roots +-g e^{i pi/4}, so each energy bin costs
two complex tridiagonal solves. With g = dE/2 the windows tile the
energy axis and the reported values are probabilities per bin.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidParameterError
from .propagate import atomic_tridiag, bound_states


@dataclass(frozen=True)
class EnergyGrid:
    e_min: float
    e_max: float
    n_bins: int
    gamma: float = None
    window_order: int = 2

    def __post_init__(self):
        if self.n_bins < 2 or self.e_max <= self.e_min:
            raise InvalidParameterError("need n_bins >= 2 and e_max > e_min")
        if self.window_order not in (1, 2):
            raise InvalidParameterError("window_order must be 1 or 2")
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.delta_e / 2.0)
        if self.gamma <= 0:
            raise InvalidParameterError("gamma must be positive")

    @property
    def delta_e(self):
        return (self.e_max - self.e_min) / (self.n_bins - 1)

    @property
    def energies(self):
        return np.linspace(self.e_min, self.e_max, self.n_bins)


@dataclass
class SpectralResult:
    egrid: EnergyGrid
    pes: np.ndarray = None
    joint: np.ndarray = None            # shape (n_bins, band.count)
    photon_dist: np.ndarray = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("pes", "joint", "photon_dist"):
            arr = getattr(self, name)
            if arr is not None and np.any(arr < -1e-14):
                raise InvalidParameterError(f"negative probability in {name}")


def _banded(lower, diag, upper):
    """Pack tridiagonal coefficients into solve_banded's (3, n) layout."""
    n = diag.size
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    return ab


def _window_amplitudes(psi_cols, atom, e_k, gamma, m):
    """gamma^{2m} <psi|W|psi> for each column of psi_cols at one energy.

    psi_cols: (nx, n_cols) complex. Returns (n_cols,) real.
    """
    off, diag = atomic_tridiag(atom)
    dx = atom.grid.dx
    if m == 1:
        ab = _banded(off, diag - e_k - 1j * gamma, off)
        chi = solve_banded((1, 1), ab, psi_cols)
        return gamma ** 2 * np.sum(np.abs(chi) ** 2, axis=0) * dx
    z = gamma * np.exp(1j * np.pi / 4.0)
    ab1 = _banded(off, diag - e_k - z, off)
    ab2 = _banded(off, diag - e_k + z, off)
    chi = solve_banded((1, 1), ab1, psi_cols)
    chi = solve_banded((1, 1), ab2, chi)
    return gamma ** 4 * np.sum(np.abs(chi) ** 2, axis=0) * dx


def window_probability(psi, atom, e_k, gamma, m=2):
    """<psi|W(e_k)|psi> for a single electron state."""
    if gamma <= 0:
        raise InvalidParameterError("gamma must be positive")
    if m not in (1, 2):
        raise InvalidParameterError("window order must be 1 or 2")
    cols = np.asarray(psi.psi, dtype=complex)[:, None]
    return float(_window_amplitudes(cols, atom, e_k, gamma, m)[0])


def project_out_bound(psi_cols, atom, n_bound, dx):
    """Remove the lowest n_bound bound states from each column."""
    if n_bound <= 0:
        return psi_cols
    _, vecs = bound_states(atom, n_bound)
    overlaps = vecs.T @ psi_cols * dx       # (k, n_cols)
    return psi_cols - vecs @ overlaps


def spectrum_columns(psi_cols, atom, egrid, project_bound=0):
    """Window spectrum of each column; returns (n_bins, n_cols)."""
    psi_cols = np.asarray(psi_cols, dtype=complex)
    dx = atom.grid.dx
    psi_cols = project_out_bound(psi_cols, atom, project_bound, dx)
    out = np.empty((egrid.n_bins, psi_cols.shape[1]))
    for k, e_k in enumerate(egrid.energies):
        out[k] = _window_amplitudes(psi_cols, atom, e_k, egrid.gamma,
                                    egrid.window_order)
    return out


def pes(psi, atom, egrid, project_bound=8):
    """Photoelectron spectrum P(E) of an electron state."""
    return spectrum_columns(psi.psi[:, None], atom, egrid, project_bound)[:, 0]


def joint_spectrum(state, atom, egrid, project_bound=8):
    """P(E, n): the window spectrum of each Fock column."""
    return spectrum_columns(state.c, atom, egrid, project_bound)


def photon_distribution(state):
    """P(n) = column norms of the joint amplitude array."""
    return state.column_norms()


def up_shift(n, fp):
    """Fock-resolved ponderomotive shift eps_v^2 (2n+1) / (2 w^2)."""
    n = np.asarray(n)
    if np.any(n < 0):
        raise InvalidParameterError("photon number must be non-negative")
    return fp.eps_v ** 2 * (2.0 * n + 1.0) / (2.0 * fp.omega ** 2)


def cutoff_lines(fp, band):
    """The 2 Up(n) and 10 Up(n) cutoff lines over the band.

    Returns (ns, e_2up, e_10up).
    """
    ns = band.ns
    up = up_shift(ns, fp)
    return ns, 2.0 * up, 10.0 * up
