"""Command-line interface.

Subcommands cover the full pipeline: ground-state preparation, the
fully quantized run, the two ensemble engines, spectral post-processing
of saved states, container comparison, quadrature certification, and
convergence sweeps. Results are written as QLS1 containers.

Exit codes: 0 success, 2 configuration error, 3 numerical or
convergence error, 4 container or file error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import container as qio
from .config import RunSetup, load_config
from .errors import ConfigError, ContainerError, NumericalError, QlsfiError
from .model import FockBand
from .photon import build_alpha_quadrature
from .propagate import (
    ElectronState,
    JointState,
    Schedule,
    ground_state,
    init_joint_state,
    propagate_classical,
    propagate_fullq,
)
from .spectra import (
    cutoff_lines,
    joint_spectrum,
    pes,
    photon_distribution,
)
from .ensembles import (
    qrep_joint,
    qrep_photon_dist,
    qrep_total_pes,
    rrep_joint_spectrum,
    rrep_photon_dist,
    run_ensemble,
)


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    envv = os.environ.get("QLS_THREADS")
    if envv:
        try:
            return max(1, int(envv))
        except ValueError:
            raise ConfigError(f"QLS_THREADS must be an integer, got '{envv}'")
    return 1


def _setup(args):
    cfg = load_config(args.config, args.tier, args.set or ())
    return RunSetup(cfg)


def _out_path(args, default_name):
    out_dir = args.output or "."
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, default_name)


def _ensemble_quadrature(setup):
    band = setup.ensemble_band
    return build_alpha_quadrature(
        band, setup.n_radial, setup.n_angular,
        state_spec=setup.photon_spec, radial_rule=setup.radial_rule)


def cmd_ground_state(args):
    setup = _setup(args)
    psi, energy = ground_state(setup.atom)
    path = _out_path(args, "ground_state.qls1")
    qio.write_container(path, {"psi": psi.psi, "x": setup.grid.x},
                        setup.cfg, {"energy": energy})
    print(f"ground state energy {energy:.12f} -> {path}")
    return 0


def cmd_run_full(args):
    setup = _setup(args)
    psi_g, energy = ground_state(setup.atom)
    photon = setup.photon_spec.fock_coeffs(
        setup.band, truncation_threshold=setup.photon_truncation)
    state0 = init_joint_state(psi_g, photon)
    final, diag = propagate_fullq(state0, setup.atom, setup.field_params,
                                  setup.envelope, setup.schedule,
                                  edge_threshold=setup.edge_threshold)
    egrid = setup.energy_grid
    joint = joint_spectrum(final, setup.atom, egrid,
                           project_bound=setup.n_bound_project)
    total = joint.sum(axis=1)
    pdist = photon_distribution(final)
    ns, lo, hi = cutoff_lines(setup.field_params, setup.band)
    path = _out_path(args, "run_full.qls1")
    qio.write_container(path, {
        "final_state": final.c,
        "energies": egrid.energies,
        "fock_ns": setup.band.ns.astype(float),
        "joint": joint,
        "pes": total,
        "photon_dist": pdist,
        "cutoff_2up": lo,
        "cutoff_10up": hi,
        "record_times": diag["times"],
        "norm": diag["norm"],
        "edge_occupation": diag["edge_occupation"],
        "parity_leak": diag["parity_leak"],
    }, setup.cfg, {"ground_energy": energy,
                   "final_norm": float(diag["norm"][-1])})
    print(f"full-quantum run -> {path}")
    return 0


def cmd_run_qrep(args):
    setup = _setup(args)
    psi_g, energy = ground_state(setup.atom)
    quad = _ensemble_quadrature(setup)
    run = run_ensemble(psi_g, setup.photon_spec, quad, setup.atom,
                       setup.field_params, setup.envelope, setup.schedule,
                       n_workers=_threads(args),
                       weight_cutoff=setup.weight_cutoff)
    egrid = setup.energy_grid
    band = setup.ensemble_band
    total = qrep_total_pes(run, egrid, project_bound=setup.n_bound_project)
    joint = qrep_joint(run, egrid, band,
                       project_bound=setup.n_bound_project)
    pdist = qrep_photon_dist(setup.photon_spec, quad, band)
    path = _out_path(args, "run_qrep.qls1")
    qio.write_container(path, {
        "energies": egrid.energies,
        "fock_ns": band.ns.astype(float),
        "joint": joint,
        "pes": total,
        "photon_dist": pdist,
    }, setup.cfg, {"ground_energy": energy, "n_nodes": quad.n_nodes})
    print(f"Q-representation ensemble -> {path}")
    return 0


def cmd_run_rrep(args):
    setup = _setup(args)
    psi_g, energy = ground_state(setup.atom)
    quad = _ensemble_quadrature(setup)
    run = run_ensemble(psi_g, setup.photon_spec, quad, setup.atom,
                       setup.field_params, setup.envelope, setup.schedule,
                       n_workers=_threads(args),
                       weight_cutoff=setup.weight_cutoff)
    egrid = setup.energy_grid
    band = setup.ensemble_band
    joint = rrep_joint_spectrum(run, band, setup.grid, egrid,
                                project_bound=setup.n_bound_project)
    pdist = rrep_photon_dist(run, band, setup.grid)
    path = _out_path(args, "run_rrep.qls1")
    qio.write_container(path, {
        "energies": egrid.energies,
        "fock_ns": band.ns.astype(float),
        "joint": joint,
        "pes": joint.sum(axis=1),
        "photon_dist": pdist,
    }, setup.cfg, {"ground_energy": energy, "n_nodes": quad.n_nodes})
    print(f"R-representation reconstruction -> {path}")
    return 0


def cmd_spectrum(args):
    setup = _setup(args)
    arrays, cfg_echo, _ = qio.read_container(args.input)
    if "final_state" not in arrays:
        raise ContainerError(
            f"'{args.input}' holds no 'final_state' array to analyze")
    c = arrays["final_state"]
    egrid = setup.energy_grid
    band = FockBand(n_min=int(cfg_echo["photon"]["band"]["n_min"]),
                    n_max=int(cfg_echo["photon"]["band"]["n_max"]))
    state = JointState(grid=setup.grid, band=band, c=c)
    joint = joint_spectrum(state, setup.atom, egrid,
                           project_bound=setup.n_bound_project)
    path = _out_path(args, "spectrum.qls1")
    qio.write_container(path, {
        "energies": egrid.energies,
        "fock_ns": band.ns.astype(float),
        "joint": joint,
        "pes": joint.sum(axis=1),
    }, setup.cfg, {"source": args.input})
    print(f"spectrum -> {path}")
    return 0


def cmd_photon_dist(args):
    setup = _setup(args)
    arrays, cfg_echo, _ = qio.read_container(args.input)
    if "final_state" not in arrays:
        raise ContainerError(
            f"'{args.input}' holds no 'final_state' array to analyze")
    band = FockBand(n_min=int(cfg_echo["photon"]["band"]["n_min"]),
                    n_max=int(cfg_echo["photon"]["band"]["n_max"]))
    state = JointState(grid=setup.grid, band=band, c=arrays["final_state"])
    pdist = photon_distribution(state)
    path = _out_path(args, "photon_dist.qls1")
    qio.write_container(path, {
        "fock_ns": band.ns.astype(float),
        "photon_dist": pdist,
    }, setup.cfg, {"source": args.input})
    print(f"photon distribution -> {path}")
    return 0


def cmd_compare(args):
    arrays_a, _, _ = qio.read_container(args.container_a)
    arrays_b, _, _ = qio.read_container(args.container_b)
    name = args.array
    for label, arrs in (("first", arrays_a), ("second", arrays_b)):
        if name not in arrs:
            raise ContainerError(f"array '{name}' missing from {label} container")
    value = qio.compare_arrays(arrays_a[name], arrays_b[name],
                               metric=args.metric)
    print(f"{args.metric}({name}) = {value:.6e}")
    return 0


def cmd_quadrature_check(args):
    setup = _setup(args)
    band = setup.ensemble_band
    quad = build_alpha_quadrature(
        band, setup.n_radial, setup.n_angular,
        state_spec=setup.photon_spec, radial_rule=setup.radial_rule,
        check=False)
    err, pair = quad.identity_error(band)
    tol = 1e-8
    status = "ok" if err <= tol else "FAIL"
    print(f"quadrature identity error {err:.3e} at (m, n) = {pair} "
          f"[{quad.n_nodes} nodes, band {band.n_min}..{band.n_max}]: {status}")
    if err > tol:
        raise NumericalError(
            f"resolution of identity violated: error {err:.3e} > {tol:.1e} "
            f"at Fock pair {pair}")
    return 0


def _converge_report(axis, levels, values, deltas, order):
    print(f"convergence along '{axis}':")
    for lv, val, d in zip(levels, values, deltas):
        extra = "" if d is None else f"  delta {d:.3e}"
        print(f"  level {lv:g}: observable {val:.9e}{extra}")
    if order is not None:
        print(f"  fitted order {order:.2f}")


def cmd_converge(args):
    setup = _setup(args)
    levels = args.levels
    if len(levels) < 3:
        raise ConfigError("converge needs at least 3 levels")
    values = []
    if args.axis == "dt":
        psi_g, _ = ground_state(setup.atom)
        for dt in levels:
            sched = Schedule.for_pulse(setup.envelope, float(dt))
            alpha = np.sinh(getattr(setup.photon_spec, "r", 1.0)) or 1.0
            out = propagate_classical(psi_g, alpha, setup.atom,
                                      setup.field_params, setup.envelope,
                                      sched)
            values.append(out.psi)
        ref = values[-1]
        dx = setup.grid.dx
        obs = [float(np.sqrt(np.sum(np.abs(v - ref) ** 2) * dx))
               for v in values[:-1]]
        deltas = [None] + [obs[i] for i in range(1, len(obs))]
        with np.errstate(divide="ignore"):
            rates = [np.log(obs[i - 1] / obs[i])
                     / np.log(levels[i - 1] / levels[i])
                     for i in range(1, len(obs)) if obs[i] > 0]
        order = float(np.mean(rates)) if rates else None
        _converge_report("dt", levels[:-1], obs, deltas, order)
        report = np.array(obs)
    elif args.axis == "nx":
        from .model import AtomModel, SpaceGrid
        energies = []
        for nx in levels:
            grid = SpaceGrid(x_max=setup.grid.x_max, nx=int(nx))
            _, e = ground_state(AtomModel(grid=grid,
                                          softcore_a=setup.atom.softcore_a))
            energies.append(e)
        deltas = [None] + [abs(energies[i] - energies[i - 1])
                           for i in range(1, len(energies))]
        _converge_report("nx", levels, energies, deltas, None)
        report = np.array(energies)
    elif args.axis == "band":
        psi_g, _ = ground_state(setup.atom)
        edges = []
        for n_max in levels:
            band = FockBand(n_min=setup.band.n_min, n_max=int(n_max))
            photon = setup.photon_spec.fock_coeffs(
                band, truncation_threshold=np.inf)
            state0 = init_joint_state(psi_g, photon)
            _, diag = propagate_fullq(state0, setup.atom, setup.field_params,
                                      setup.envelope, setup.schedule,
                                      edge_threshold=np.inf)
            edges.append(float(diag["edge_occupation"][-1]))
        deltas = [None] + [edges[i] - edges[i - 1]
                           for i in range(1, len(edges))]
        if any(d is not None and d > 0 for d in deltas):
            print("warning: edge occupation not monotone across levels",
                  file=sys.stderr)
        _converge_report("band", levels, edges, deltas, None)
        report = np.array(edges)
    elif args.axis == "quadrature":
        band = setup.ensemble_band
        errs = []
        for n_ang in levels:
            quad = build_alpha_quadrature(
                band, setup.n_radial, int(n_ang),
                state_spec=setup.photon_spec,
                radial_rule=setup.radial_rule, check=False)
            err, _ = quad.identity_error(band)
            errs.append(err)
        deltas = [None] + [errs[i] - errs[i - 1]
                           for i in range(1, len(errs))]
        if any(d is not None and d > 0 for d in deltas):
            print("warning: identity error not monotone across levels",
                  file=sys.stderr)
        _converge_report("quadrature", levels, errs, deltas, None)
        report = np.array(errs)
    else:
        raise ConfigError(f"unknown convergence axis '{args.axis}'")
    path = _out_path(args, f"converge_{args.axis}.qls1")
    qio.write_container(path, {"levels": np.asarray(levels, dtype=float),
                               "observable": report},
                        setup.cfg, {"axis": args.axis})
    print(f"report -> {path}")
    return 0


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--tier", help="tier preset (ci-small, desk, paper)")
    sub.add_argument("--output", help="output directory (default: cwd)")
    sub.add_argument("--threads", type=int,
                     help="worker threads (fallback: QLS_THREADS)")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="dotted-path config override, repeatable")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qlsfi",
        description="strong-field ionization driven by quantized light")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, func in (("ground-state", cmd_ground_state),
                       ("run-full", cmd_run_full),
                       ("run-qrep", cmd_run_qrep),
                       ("run-rrep", cmd_run_rrep),
                       ("quadrature-check", cmd_quadrature_check)):
        sp = subs.add_parser(name)
        _add_common(sp)
        sp.set_defaults(func=func)

    for name, func in (("spectrum", cmd_spectrum),
                       ("photon-dist", cmd_photon_dist)):
        sp = subs.add_parser(name)
        _add_common(sp)
        sp.add_argument("--input", required=True,
                        help="container holding a saved final_state")
        sp.set_defaults(func=func)

    sp = subs.add_parser("compare")
    sp.add_argument("container_a")
    sp.add_argument("container_b")
    sp.add_argument("--array", required=True, help="array name to compare")
    sp.add_argument("--metric", choices=("l1", "linf"), default="l1")
    sp.set_defaults(func=cmd_compare)

    sp = subs.add_parser("converge")
    _add_common(sp)
    sp.add_argument("--axis", required=True,
                    choices=("dt", "nx", "band", "quadrature"))
    sp.add_argument("--levels", required=True, type=float, nargs="+",
                    help="parameter values, coarse to fine")
    sp.set_defaults(func=cmd_converge)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except NumericalError as exc:
        _emit_error(exc)
        return 3
    except (ContainerError, OSError) as exc:
        _emit_error(exc)
        return 4
    except QlsfiError as exc:
        _emit_error(exc)
        return 3


def _emit_error(exc):
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
