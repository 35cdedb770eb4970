"""Strong-field ionization by quantized light: full electron-photon
TDSE, Husimi-ensemble and coherent-superposition engines, and
window-operator spectroscopy."""

__version__ = "0.1.0"

from .model import (
    AtomModel,
    DriveSpec,
    FieldParams,
    FockBand,
    PulseEnvelope,
    SpaceGrid,
    atom_potential,
    derive_field_params,
    envelope,
    intensity_to_field,
    wavelength_to_omega,
)
from .photon import (
    AlphaQuadrature,
    CoherentSpec,
    FockSpec,
    PhotonAmplitudes,
    SqueezedVacuumSpec,
    build_alpha_quadrature,
    coherent_overlap_fock,
    coherent_squeezed_overlap,
    q_function,
    squeezed_fock_coeffs,
)
from .propagate import (
    ElectronState,
    JointState,
    Schedule,
    classical_field,
    ground_state,
    init_joint_state,
    propagate_classical,
    propagate_fullq,
)
from .spectra import (
    EnergyGrid,
    SpectralResult,
    cutoff_lines,
    joint_spectrum,
    pes,
    photon_distribution,
    up_shift,
    window_probability,
)
from .ensembles import (
    EnsembleRun,
    diagonal_truncation,
    qrep_joint,
    qrep_photon_dist,
    qrep_total_pes,
    rrep_joint_spectrum,
    rrep_joint_state,
    rrep_photon_dist,
    run_ensemble,
)
