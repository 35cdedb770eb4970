"""Domain parameters, unit conversions, grids, pulse envelope and the
soft-core atom model shared by all solvers.

All internal quantities are in Hartree atomic units; conversions from
laboratory units (nm, W/cm^2) happen only at the configuration boundary.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSqueezingError, InvalidParameterError

# atomic-unit conversion constants
C_AU = 137.035999            # speed of light (a.u.)
NM_TO_AU = 18.897261         # 1 nm in Bohr radii
INTENSITY_AU_WCM2 = 3.50945e16  # atomic unit of intensity in W/cm^2


def wavelength_to_omega(lambda_nm):
    """Angular frequency (a.u.) of light with vacuum wavelength in nm."""
    if lambda_nm <= 0:
        raise InvalidParameterError(f"wavelength must be positive, got {lambda_nm}")
    return 2.0 * np.pi * C_AU / (lambda_nm * NM_TO_AU)


def intensity_to_field(intensity_wcm2):
    """Peak field amplitude (a.u.) for a given intensity in W/cm^2."""
    if intensity_wcm2 < 0:
        raise InvalidParameterError(f"intensity must be non-negative, got {intensity_wcm2}")
    return float(np.sqrt(intensity_wcm2 / INTENSITY_AU_WCM2))


def atom_potential(x, a=2.0):
    """Soft-core potential -1/sqrt(x^2 + a)."""
    if a <= 0:
        raise InvalidParameterError(f"softcore parameter must be positive, got {a}")
    return -1.0 / np.sqrt(np.asarray(x, dtype=float) ** 2 + a)


@dataclass(frozen=True)
class SpaceGrid:
    """Symmetric uniform position grid with x=0 as a grid point."""

    x_max: float
    nx: int

    def __post_init__(self):
        if self.nx < 3 or self.nx % 2 == 0:
            raise InvalidParameterError(f"nx must be odd and >= 3, got {self.nx}")
        if self.x_max <= 0:
            raise InvalidParameterError(f"x_max must be positive, got {self.x_max}")

    @property
    def dx(self):
        return 2.0 * self.x_max / (self.nx - 1)

    @property
    def x(self):
        return np.linspace(-self.x_max, self.x_max, self.nx)


@dataclass(frozen=True)
class AtomModel:
    """Soft-core 1D atom on a symmetric grid."""

    grid: SpaceGrid
    softcore_a: float = 2.0

    def __post_init__(self):
        if self.softcore_a <= 0:
            raise InvalidParameterError(
                f"softcore_a must be positive, got {self.softcore_a}")

    def potential(self):
        return atom_potential(self.grid.x, self.softcore_a)


@dataclass(frozen=True)
class FockBand:
    """Contiguous photon-number window [n_min, n_max]."""

    n_min: int
    n_max: int

    def __post_init__(self):
        if self.n_min < 0 or self.n_min > self.n_max:
            raise InvalidParameterError(
                f"need 0 <= n_min <= n_max, got [{self.n_min}, {self.n_max}]")

    @property
    def count(self):
        return self.n_max - self.n_min + 1

    @property
    def ns(self):
        return np.arange(self.n_min, self.n_max + 1)


@dataclass(frozen=True)
class FieldParams:
    """Single quantized field mode: frequency and single-photon amplitude."""

    omega: float
    eps_v: float

    def __post_init__(self):
        if self.omega <= 0:
            raise InvalidParameterError(f"omega must be positive, got {self.omega}")
        if self.eps_v <= 0:
            raise InvalidParameterError(f"eps_v must be positive, got {self.eps_v}")

    @property
    def quantization_volume(self):
        # eps_v = sqrt(2 pi omega / V)
        return 2.0 * np.pi * self.omega / self.eps_v ** 2


@dataclass(frozen=True)
class PulseEnvelope:
    """Trapezoidal envelope: linear ramp-up, flat top, linear ramp-down."""

    ramp_up_cycles: float
    flat_cycles: float
    ramp_down_cycles: float
    cycle_period: float

    def __post_init__(self):
        if min(self.ramp_up_cycles, self.flat_cycles, self.ramp_down_cycles) < 0:
            raise InvalidParameterError("cycle counts must be non-negative")
        if self.cycle_period <= 0:
            raise InvalidParameterError("cycle_period must be positive")
        if self.duration <= 0:
            raise InvalidParameterError("pulse has zero duration")

    @property
    def duration(self):
        total = self.ramp_up_cycles + self.flat_cycles + self.ramp_down_cycles
        return total * self.cycle_period

    def __call__(self, t):
        return envelope(t, self)


def envelope(t, env):
    """Trapezoidal envelope value f(t) in [0, 1]; 0 outside the pulse."""
    t = np.asarray(t, dtype=float)
    tc = env.cycle_period
    t_up = env.ramp_up_cycles * tc
    t_flat_end = t_up + env.flat_cycles * tc
    t_end = t_flat_end + env.ramp_down_cycles * tc
    out = np.zeros_like(t)
    if t_up > 0:
        rising = (t >= 0) & (t < t_up)
        out = np.where(rising, t / t_up, out)
    flat = (t >= t_up) & (t <= t_flat_end)
    out = np.where(flat, 1.0, out)
    if t_end > t_flat_end:
        falling = (t > t_flat_end) & (t < t_end)
        out = np.where(falling, (t_end - t) / (t_end - t_flat_end), out)
    out = np.where((t < 0) | (t > t_end), 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def derive_field_params(e0, r, omega):
    """FieldParams for a squeezed-vacuum drive of effective amplitude e0.

    Uses E0 = 2 eps_v sinh(r); the mean photon number is sinh(r)^2.
    """
    if r <= 0:
        raise DegenerateSqueezingError(
            "r must be > 0 for a squeezed-vacuum drive; "
            "use a coherent drive spec for r = 0")
    if e0 <= 0:
        raise InvalidParameterError(f"E0 must be positive, got {e0}")
    if omega <= 0:
        raise InvalidParameterError(f"omega must be positive, got {omega}")
    eps_v = e0 / (2.0 * np.sinh(r))
    return FieldParams(omega=omega, eps_v=eps_v)


@dataclass(frozen=True)
class DriveSpec:
    """Laboratory-facing description of the BSV drive."""

    intensity_wcm2: float
    wavelength_nm: float
    squeezing_r: float
    squeezing_phase: float = 0.0

    @property
    def omega(self):
        return wavelength_to_omega(self.wavelength_nm)

    @property
    def e0(self):
        return intensity_to_field(self.intensity_wcm2)

    @property
    def n_bar(self):
        return float(np.sinh(self.squeezing_r) ** 2)

    def field_params(self):
        return derive_field_params(self.e0, self.squeezing_r, self.omega)
