"""Run configuration: schema, tier presets, and dotted-path overrides.

Configs are plain JSON. A tier preset fills every field the user left
unset; unknown keys anywhere are rejected.
"""

import copy
import json
import math

from .errors import ConfigError, InvalidParameterError
from .model import (
    AtomModel,
    DriveSpec,
    FockBand,
    PulseEnvelope,
    SpaceGrid,
    derive_field_params,
    intensity_to_field,
    wavelength_to_omega,
)
from .photon import CoherentSpec, FockSpec, SqueezedVacuumSpec
from .propagate import Schedule

# wavelength giving omega = 0.8 a.u. exactly (up to rounding)
_CI_WAVELENGTH_NM = 56.95419136875685

SCHEMA = {
    "grid": {"x_max": float, "nx": int},
    "atom": {"softcore_a": float},
    "pulse": {"wavelength_nm": float, "intensity_wcm2": float,
              "ramp_up_cycles": float, "flat_cycles": float,
              "ramp_down_cycles": float},
    "photon": {"kind": str, "r": float, "phi": float,
               "alpha_re": float, "alpha_im": float, "n_fock": int,
               "truncation": float,
               "band": {"n_min": int, "n_max": int}},
    "solver": {"dt": float, "edge_threshold": float, "mask": str},
    "spectrum": {"e_min": float, "e_max": float, "n_bins": int,
                 "gamma": float, "window_order": int,
                 "n_bound_project": int},
    "ensemble": {"n_radial": int, "n_angular": int, "radial_rule": str,
                 "n_max": int, "mode": str, "seed": int,
                 "weight_cutoff": float},
    "tier": str,
}

TIERS = {
    "ci-small": {
        "grid": {"x_max": 60.0, "nx": 513},
        "atom": {"softcore_a": 2.0},
        "pulse": {"wavelength_nm": _CI_WAVELENGTH_NM,
                  "intensity_wcm2": 2.0e14,
                  "ramp_up_cycles": 1.0, "flat_cycles": 2.0,
                  "ramp_down_cycles": 1.0},
        "photon": {"kind": "squeezed_vacuum", "r": 2.655, "phi": 0.0,
                   "alpha_re": 0.0, "alpha_im": 0.0, "n_fock": 0,
                   "truncation": 1.0e-7,
                   "band": {"n_min": 0, "n_max": 1435}},
        "solver": {"dt": 0.0392699081698724, "edge_threshold": 1.0e-6,
                   "mask": "off"},
        "spectrum": {"e_min": 0.0, "e_max": 3.2, "n_bins": 161,
                     "window_order": 2, "n_bound_project": 8},
        "ensemble": {"n_radial": 126, "n_angular": 504,
                     "radial_rule": "gauss-laguerre", "n_max": 250,
                     "mode": "quadrature", "seed": 0,
                     "weight_cutoff": 1.0e-6},
    },
    "desk": {
        "grid": {"x_max": 400.0, "nx": 4097},
        "atom": {"softcore_a": 2.0},
        "pulse": {"wavelength_nm": 400.0, "intensity_wcm2": 1.0e14,
                  "ramp_up_cycles": 1.0, "flat_cycles": 2.0,
                  "ramp_down_cycles": 1.0},
        "photon": {"kind": "squeezed_vacuum", "r": 2.0, "phi": 0.0,
                   "alpha_re": 0.0, "alpha_im": 0.0, "n_fock": 0,
                   "truncation": 1.0e-8,
                   "band": {"n_min": 0, "n_max": 560}},
        "solver": {"dt": 0.05, "edge_threshold": 1.0e-8, "mask": "off"},
        # gamma above the box level spacing so spectra resolve physical
        # structure, not the discretized continuum
        "spectrum": {"e_min": 0.0, "e_max": 1.5, "n_bins": 601,
                     "gamma": 5.0e-3, "window_order": 2,
                     "n_bound_project": 8},
        "ensemble": {"n_radial": 76, "n_angular": 302,
                     "radial_rule": "gauss-laguerre", "n_max": 150,
                     "mode": "quadrature", "seed": 0,
                     "weight_cutoff": 1.0e-6},
    },
    # Full production scale (r = 5.3, nbar ~ 1e4, ~1e8 joint
    # amplitudes): recorded for documentation; not exercised by CI.
    "paper": {
        "grid": {"x_max": 1500.0, "nx": 16385},
        "atom": {"softcore_a": 2.0},
        "pulse": {"wavelength_nm": 400.0, "intensity_wcm2": 1.0e14,
                  "ramp_up_cycles": 1.0, "flat_cycles": 2.0,
                  "ramp_down_cycles": 1.0},
        "photon": {"kind": "squeezed_vacuum", "r": 5.3, "phi": 0.0,
                   "alpha_re": 0.0, "alpha_im": 0.0, "n_fock": 0,
                   "truncation": 1.0e-8,
                   "band": {"n_min": 0, "n_max": 60000}},
        "solver": {"dt": 0.02, "edge_threshold": 1.0e-8, "mask": "off"},
        "spectrum": {"e_min": 0.0, "e_max": 1.2, "n_bins": 2401,
                     "gamma": 1.0e-3, "window_order": 2,
                     "n_bound_project": 8},
        "ensemble": {"n_radial": 301, "n_angular": 1202,
                     "radial_rule": "gauss-laguerre", "n_max": 600,
                     "mode": "quadrature", "seed": 0,
                     "weight_cutoff": 1.0e-6},
    },
}


def _check_schema(data, schema, path=""):
    if not isinstance(data, dict):
        raise ConfigError(f"expected a mapping at '{path or '<root>'}'")
    for key, value in data.items():
        here = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"unknown config key '{here}'")
        expect = schema[key]
        if isinstance(expect, dict):
            _check_schema(value, expect, here)
        elif expect is float:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"'{here}' must be a number, got {value!r}")
        elif expect is int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"'{here}' must be an integer, got {value!r}")
        elif not isinstance(value, expect):
            raise ConfigError(f"'{here}' must be {expect.__name__}, got {value!r}")


def _deep_merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _coerce(value):
    """Parse a --set value: int, float, or bare string."""
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def apply_overrides(data, overrides):
    """Apply dotted-path key=value overrides to a config dict."""
    out = copy.deepcopy(data)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got '{item}'")
        dotted, raw = item.split("=", 1)
        node = out
        parts = dotted.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot descend into '{dotted}'")
        node[parts[-1]] = _coerce(raw)
    return out


def load_config(path=None, tier=None, overrides=()):
    """Assemble the effective config dict: tier preset < file < --set."""
    data = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config '{path}': {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in '{path}': {exc}") from exc
    data = apply_overrides(data, overrides)
    tier = tier or data.get("tier", "ci-small")
    if tier not in TIERS:
        raise ConfigError(f"unknown tier '{tier}'; "
                          f"choose from {sorted(TIERS)}")
    merged = _deep_merge(TIERS[tier], data)
    merged["tier"] = tier
    _check_schema(merged, SCHEMA)
    return merged


class RunSetup:
    """Config dict resolved into the domain objects the solvers consume."""

    def __init__(self, cfg):
        self.cfg = cfg
        try:
            self.grid = SpaceGrid(x_max=float(cfg["grid"]["x_max"]),
                                  nx=int(cfg["grid"]["nx"]))
            self.atom = AtomModel(grid=self.grid,
                                  softcore_a=float(cfg["atom"]["softcore_a"]))
            pulse = cfg["pulse"]
            self.omega = wavelength_to_omega(float(pulse["wavelength_nm"]))
            self.e0 = intensity_to_field(float(pulse["intensity_wcm2"]))
            self.envelope = PulseEnvelope(
                ramp_up_cycles=float(pulse["ramp_up_cycles"]),
                flat_cycles=float(pulse["flat_cycles"]),
                ramp_down_cycles=float(pulse["ramp_down_cycles"]),
                cycle_period=2.0 * math.pi / self.omega)
            ph = cfg["photon"]
            self.band = FockBand(n_min=int(ph["band"]["n_min"]),
                                 n_max=int(ph["band"]["n_max"]))
            self.photon_truncation = float(ph.get("truncation", 1e-10))
            kind = ph["kind"]
            if kind == "squeezed_vacuum":
                self.photon_spec = SqueezedVacuumSpec(r=float(ph["r"]),
                                                      phi=float(ph["phi"]))
                self.field_params = derive_field_params(
                    self.e0, float(ph["r"]), self.omega)
            elif kind == "coherent":
                alpha0 = complex(float(ph["alpha_re"]), float(ph["alpha_im"]))
                if alpha0 == 0:
                    raise ConfigError("coherent drive needs a nonzero alpha")
                self.photon_spec = CoherentSpec(alpha0=alpha0)
                self.field_params = derive_field_params_coherent(
                    self.e0, alpha0, self.omega)
            elif kind == "fock":
                n_fock = int(ph["n_fock"])
                if n_fock <= 0:
                    raise ConfigError("fock drive needs n_fock > 0")
                self.photon_spec = FockSpec(n=n_fock)
                self.field_params = derive_field_params_coherent(
                    self.e0, math.sqrt(n_fock), self.omega)
            else:
                raise ConfigError(f"unknown photon kind '{kind}'")
            solver = cfg["solver"]
            if solver["mask"] not in ("off", "cos8"):
                raise ConfigError(f"unknown mask '{solver['mask']}'")
            self.schedule = Schedule.for_pulse(self.envelope,
                                               float(solver["dt"]))
            self.edge_threshold = float(solver["edge_threshold"])
            spec = cfg["spectrum"]
            from .spectra import EnergyGrid
            self.energy_grid = EnergyGrid(
                e_min=float(spec["e_min"]), e_max=float(spec["e_max"]),
                n_bins=int(spec["n_bins"]),
                gamma=(float(spec["gamma"]) if "gamma" in spec else None),
                window_order=int(spec["window_order"]))
            self.n_bound_project = int(spec["n_bound_project"])
            ens = cfg["ensemble"]
            if ens["mode"] not in ("quadrature", "mc"):
                raise ConfigError(f"unknown ensemble mode '{ens['mode']}'")
            self.n_radial = int(ens["n_radial"])
            self.n_angular = int(ens["n_angular"])
            self.radial_rule = str(ens["radial_rule"])
            if self.radial_rule not in ("gauss-legendre", "gauss-laguerre"):
                raise ConfigError(
                    f"unknown radial rule '{self.radial_rule}'")
            # the ensemble engines reconstruct photon-resolved quantities
            # on a (possibly smaller) sub-band of the propagation band
            ens_n_max = int(ens["n_max"])
            if ens_n_max > self.band.n_max:
                raise ConfigError("ensemble.n_max cannot exceed the "
                                  "photon band n_max")
            self.ensemble_band = FockBand(n_min=self.band.n_min,
                                          n_max=ens_n_max)
            self.ensemble_mode = ens["mode"]
            self.seed = int(ens["seed"])
            self.weight_cutoff = float(ens.get("weight_cutoff", 0.0))
            if self.weight_cutoff < 0:
                raise ConfigError("ensemble.weight_cutoff must be >= 0")
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError,
                InvalidParameterError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    def drive_spec(self):
        ph = self.cfg["photon"]
        if ph["kind"] != "squeezed_vacuum":
            return None
        return DriveSpec(
            intensity_wcm2=float(self.cfg["pulse"]["intensity_wcm2"]),
            wavelength_nm=float(self.cfg["pulse"]["wavelength_nm"]),
            squeezing_r=float(ph["r"]), squeezing_phase=float(ph["phi"]))


def derive_field_params_coherent(e0, alpha0, omega):
    """eps_v from E0 = 2 eps_v |alpha0| for a coherent drive."""
    from .model import FieldParams
    mag = abs(alpha0)
    if mag <= 0 or e0 <= 0:
        raise ConfigError("coherent drive needs E0 > 0 and |alpha0| > 0")
    return FieldParams(omega=omega, eps_v=e0 / (2.0 * mag))
