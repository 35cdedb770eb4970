"""Quantum-optics state algebra: Fock expansions of coherent and
squeezed-vacuum states, overlap kernels, the Husimi Q function, and
alpha-plane quadrature rules for the ensemble engines.

Overlap magnitudes are evaluated in the log domain so that photon
numbers up to ~1e6 stay finite; naive alpha**n / sqrt(n!) overflows
near n ~ 150.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .errors import (
    BandTooSmallError,
    InvalidParameterError,
    QuadratureInsufficientError,
)
from .model import FockBand


def coherent_overlap_fock(n, alpha):
    """<n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!), log-domain.

    n may be a scalar or integer array; returns matching complex shape.
    """
    n = np.asarray(n)
    if np.any(n < 0):
        raise InvalidParameterError("photon number must be non-negative")
    alpha = complex(alpha)
    rho = abs(alpha)
    if rho == 0.0:
        return np.where(n == 0, 1.0 + 0.0j, 0.0j) if n.ndim else (1.0 + 0.0j if n == 0 else 0.0j)
    log_mag = -0.5 * rho ** 2 + n * np.log(rho) - 0.5 * gammaln(n + 1.0)
    phase = n * np.angle(alpha)
    out = np.exp(log_mag) * np.exp(1j * phase)
    return out if n.ndim else complex(out)


def coherent_overlap_fock_grid(band, alphas):
    """<n|alpha_j> for all n in band and all alphas; shape (n_alphas, band.count)."""
    alphas = np.asarray(alphas, dtype=complex)
    ns = band.ns[None, :].astype(float)
    rho = np.abs(alphas)[:, None]
    theta = np.angle(alphas)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_rho = np.where(rho > 0, np.log(np.where(rho > 0, rho, 1.0)), -np.inf)
        log_mag = -0.5 * rho ** 2 + ns * log_rho - 0.5 * gammaln(ns + 1.0)
    # alpha = 0 contributes only at n = 0
    log_mag = np.where((rho == 0) & (ns == 0), 0.0, log_mag)
    return np.exp(log_mag + 1j * ns * theta)


@dataclass(frozen=True)
class PhotonAmplitudes:
    """Fock-coefficient vector of the initial photon state on a band."""

    band: FockBand
    coeffs: np.ndarray
    truncation_threshold: float = 1e-10

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.band.count,):
            raise InvalidParameterError(
                f"coeffs shape {coeffs.shape} does not match band count {self.band.count}")
        object.__setattr__(self, "coeffs", coeffs)
        if self.truncation_mass > self.truncation_threshold:
            raise BandTooSmallError(
                f"truncation mass {self.truncation_mass:.3e} exceeds "
                f"threshold {self.truncation_threshold:.1e} on band "
                f"[{self.band.n_min}, {self.band.n_max}]")

    @property
    def truncation_mass(self):
        return max(0.0, 1.0 - float(np.sum(np.abs(self.coeffs) ** 2)))

    def overlap_with_coherent(self, alpha):
        """<alpha|phi> from the Fock expansion."""
        kern = coherent_overlap_fock_grid(self.band, np.atleast_1d(alpha))
        return complex(np.sum(np.conj(kern[0]) * self.coeffs))


def _squeezed_log_coeff(m, r):
    """log |s_{2m}| for squeezed vacuum (m = n/2)."""
    t = np.tanh(r)
    return (m * np.log(t) + 0.5 * gammaln(2.0 * m + 1.0)
            - m * np.log(2.0) - gammaln(m + 1.0) - 0.5 * np.log(np.cosh(r)))


def squeezed_required_n_max(r, threshold=1e-10):
    """Smallest even n_max holding the squeezed vacuum to the given mass."""
    def mass_ok(n_max):
        ms = np.arange(0, n_max // 2 + 1, dtype=float)
        return 1.0 - np.sum(np.exp(2.0 * _squeezed_log_coeff(ms, r))) <= threshold

    hi = 2
    while not mass_ok(hi):
        hi *= 2
        if hi > 10 ** 8:
            raise BandTooSmallError("squeezed state does not converge", None)
    lo = hi // 2
    while hi - lo > 2:          # binary refine to the smallest even n_max
        mid = 2 * ((lo + hi) // 4)
        if mass_ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def squeezed_fock_coeffs(r, phi, band, truncation_threshold=1e-10):
    """Fock coefficients of squeezed vacuum on a band.

    Convention: s_{2m} = (e^{i phi} tanh r)^m sqrt((2m)!)/(2^m m!)/sqrt(cosh r),
    so at phi = 0 the coefficients are real positive (the state
    exp[(r/2)(adag^2 - a^2)]|0>) and the anti-squeezed quadrature lies
    along the real alpha axis, i.e. along the sin(wt) drive.
    Odd coefficients are exactly zero.
    """
    if r < 0:
        raise InvalidParameterError(f"r must be >= 0, got {r}")
    ns = band.ns
    coeffs = np.zeros(band.count, dtype=complex)
    even = ns % 2 == 0
    ms = (ns[even] // 2).astype(float)
    if r == 0:
        coeffs[even & (ns == 0)] = 1.0
    else:
        coeffs[even] = np.exp(_squeezed_log_coeff(ms, r)) * np.exp(1j * phi * ms)
    mass = float(np.sum(np.abs(coeffs) ** 2))
    if 1.0 - mass > truncation_threshold:
        needed = squeezed_required_n_max(r, truncation_threshold)
        raise BandTooSmallError(
            f"band [{band.n_min}, {band.n_max}] holds only {mass:.12f} of the "
            f"squeezed vacuum (r={r}); need n_max >= {needed}",
            required_n_max=needed)
    return PhotonAmplitudes(band=band, coeffs=coeffs,
                            truncation_threshold=truncation_threshold)


def coherent_squeezed_overlap(alpha, r, phi=0.0):
    """<alpha|phi_gamma> for squeezed vacuum, closed form.

    (cosh r)^{-1/2} exp(-|alpha|^2/2 + e^{i phi} tanh(r) conj(alpha)^2 / 2),
    matching the sign convention of squeezed_fock_coeffs.
    """
    if r < 0:
        raise InvalidParameterError(f"r must be >= 0, got {r}")
    alpha = np.asarray(alpha, dtype=complex)
    val = np.exp(-0.5 * np.abs(alpha) ** 2
                 + 0.5 * np.exp(1j * phi) * np.tanh(r) * np.conj(alpha) ** 2)
    val = val / np.sqrt(np.cosh(r))
    return complex(val) if val.ndim == 0 else val


# --- photon state specs (configuration-facing) ---

@dataclass(frozen=True)
class SqueezedVacuumSpec:
    r: float
    phi: float = 0.0

    def fock_coeffs(self, band, truncation_threshold=1e-10):
        return squeezed_fock_coeffs(self.r, self.phi, band, truncation_threshold)

    def overlap(self, alphas):
        """<alpha|phi_gamma>, vectorized over alphas."""
        return coherent_squeezed_overlap(np.asarray(alphas, dtype=complex),
                                         self.r, self.phi)


@dataclass(frozen=True)
class CoherentSpec:
    alpha0: complex

    def fock_coeffs(self, band, truncation_threshold=1e-10):
        coeffs = coherent_overlap_fock_grid(band, [self.alpha0])[0]
        mass = float(np.sum(np.abs(coeffs) ** 2))
        if 1.0 - mass > truncation_threshold:
            need = int(np.ceil(abs(self.alpha0) ** 2
                               + 12.0 * max(1.0, abs(self.alpha0))))
            raise BandTooSmallError(
                f"band holds only {mass:.12f} of coherent |{self.alpha0}>; "
                f"need n_max >= {need}", required_n_max=need)
        return PhotonAmplitudes(band=band, coeffs=coeffs,
                                truncation_threshold=truncation_threshold)

    def overlap(self, alphas):
        a = np.asarray(alphas, dtype=complex)
        b = complex(self.alpha0)
        out = np.exp(-0.5 * np.abs(a) ** 2 - 0.5 * abs(b) ** 2 + np.conj(a) * b)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FockSpec:
    n: int

    def fock_coeffs(self, band, truncation_threshold=1e-10):
        if not (band.n_min <= self.n <= band.n_max):
            raise BandTooSmallError(
                f"Fock state |{self.n}> outside band", required_n_max=self.n)
        coeffs = np.zeros(band.count, dtype=complex)
        coeffs[self.n - band.n_min] = 1.0
        return PhotonAmplitudes(band=band, coeffs=coeffs,
                                truncation_threshold=truncation_threshold)

    def overlap(self, alphas):
        a = np.atleast_1d(np.asarray(alphas, dtype=complex))
        out = np.conj(coherent_overlap_fock_grid(FockBand(self.n, self.n), a)[:, 0])
        return complex(out[0]) if np.ndim(alphas) == 0 else out


def q_function(alpha, state):
    """Husimi density Q(alpha) = |<alpha|phi>|^2 / pi.

    state may be a PhotonAmplitudes or any spec with an .overlap method.
    """
    if isinstance(state, PhotonAmplitudes):
        alphas = np.atleast_1d(np.asarray(alpha, dtype=complex))
        kern = coherent_overlap_fock_grid(state.band, alphas)
        ov = np.conj(kern) @ state.coeffs
        out = np.abs(ov) ** 2 / np.pi
        return float(out[0]) if np.ndim(alpha) == 0 else out
    ov = state.overlap(alpha)
    out = np.abs(np.asarray(ov)) ** 2 / np.pi
    return float(out) if np.ndim(alpha) == 0 else out


@dataclass(frozen=True)
class AlphaQuadrature:
    """Polar-product quadrature discretizing integral d^2alpha / pi.

    nodes alphas_j with positive weights w_j such that
    sum_j w_j g(alpha_j) ~ integral d^2alpha/pi g(alpha).
    """

    alphas: np.ndarray
    weights: np.ndarray
    n_radial: int
    n_angular: int
    rho_max: float
    radial_rule: str = "gauss-legendre"

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise InvalidParameterError("all quadrature weights must be positive")

    @property
    def n_nodes(self):
        return self.alphas.size

    def identity_error(self, band):
        """Worst |sum_j w_j <m|a_j><a_j|n> - delta_mn| over the band; with argmax."""
        kern = coherent_overlap_fock_grid(band, self.alphas)  # (J, N)
        gram = (kern * self.weights[:, None]).T.conj() @ kern
        gram = gram.conj()  # sum w <m|a><a|n> = sum w kern[:,m] conj(kern[:,n])
        err = np.abs(gram - np.eye(band.count))
        idx = np.unravel_index(np.argmax(err), err.shape)
        return float(err[idx]), (int(band.ns[idx[0]]), int(band.ns[idx[1]]))

    def check_identity(self, band, tol=1e-8):
        worst, pair = self.identity_error(band)
        if worst > tol:
            raise QuadratureInsufficientError(
                f"resolution-of-identity error {worst:.3e} > {tol:.1e} "
                f"at (m, n) = {pair}; increase n_radial/n_angular",
                worst_pair=pair, worst_error=worst)
        return worst


def build_alpha_quadrature(band, n_radial, n_angular, state_spec=None,
                           rho_max=None, radial_rule="gauss-legendre",
                           check=True, tol=1e-8):
    """Polar-product rule: periodic trapezoid in angle x a radial rule.

    n_angular must be >= 2*n_max + 2 so every Fourier mode e^{i(m-n)theta}
    occurring in band overlaps integrates exactly. Radial rules:

    - "gauss-legendre": nodes mapped onto [0, rho_max] with the
      rho d rho measure (default rho_max = sqrt(n_max) + 6).
    - "gauss-laguerre": nodes in u = rho^2 against the e^{-u} weight;
      makes the resolution of identity exact on the band whenever
      2*n_radial - 1 >= n_max, at roughly half the node count.
    """
    if n_radial < 2:
        raise InvalidParameterError(f"n_radial must be >= 2, got {n_radial}")
    required = 2 * band.n_max + 2
    if n_angular < required:
        raise InvalidParameterError(
            f"n_angular must be >= 2*n_max+2 = {required}, got {n_angular}")
    if radial_rule == "gauss-legendre":
        if rho_max is None:
            rho_max = np.sqrt(band.n_max) + 6.0
            if isinstance(state_spec, CoherentSpec):
                rho_max = max(rho_max, abs(state_spec.alpha0) + 6.0)
        nodes, gl_w = leggauss(n_radial)
        rho = 0.5 * rho_max * (nodes + 1.0)
        w_rho = 0.5 * rho_max * gl_w * rho          # rho d rho
    elif radial_rule == "gauss-laguerre":
        from scipy.special import roots_laguerre
        u, lag_w = roots_laguerre(n_radial)
        rho = np.sqrt(u)
        w_rho = 0.5 * lag_w * np.exp(u)             # d(rho^2)/2, weight undone
        rho_max = float(rho[-1])
    else:
        raise InvalidParameterError(f"unknown radial rule '{radial_rule}'")
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    w_theta = 2.0 * np.pi / n_angular
    alphas = (rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = (np.broadcast_to(w_rho[:, None] * w_theta / np.pi,
                               (n_radial, n_angular))).ravel().copy()
    quad = AlphaQuadrature(alphas=alphas, weights=weights,
                           n_radial=n_radial, n_angular=n_angular,
                           rho_max=float(rho_max), radial_rule=radial_rule)
    if check:
        quad.check_identity(band, tol=tol)
    return quad
