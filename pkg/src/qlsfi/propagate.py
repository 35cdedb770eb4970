"""Crank-Nicolson machinery: ground-state preparation, the
classical-field electron propagator (one per coherent amplitude), and
the fully quantized joint electron-photon propagator.

The joint step is Strang-split: half-step of the atomic Hamiltonian
(tridiagonal in x, independent per Fock column), a full step of the
dipole coupling evaluated at the sub-step midpoint (tridiagonal in n,
independent per grid row), then another atomic half-step. Every factor
is a Cayley form and therefore unitary.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BandOverflowError,
    EigenSolverError,
    InvalidParameterError,
    NumericalBlowupError,
)
from .model import envelope
from .tridiag import solve_tridiag, tridiag_matvec


@dataclass
class ElectronState:
    grid: object
    psi: np.ndarray

    def norm(self):
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)


@dataclass
class JointState:
    grid: object
    band: object
    c: np.ndarray          # shape (nx, band.count)
    time: float = 0.0

    def norm(self):
        return float(np.sum(np.abs(self.c) ** 2) * self.grid.dx)

    def column_norms(self):
        return np.sum(np.abs(self.c) ** 2, axis=0) * self.grid.dx


@dataclass(frozen=True)
class Schedule:
    dt: float
    n_steps: int
    record_every: int = 0

    def __post_init__(self):
        if self.dt == 0 or self.n_steps <= 0:
            raise InvalidParameterError("need dt != 0 and n_steps > 0")

    @classmethod
    def for_pulse(cls, env, dt_target, record_every=0):
        n_steps = max(1, int(round(env.duration / dt_target)))
        return cls(dt=env.duration / n_steps, n_steps=n_steps,
                   record_every=record_every)


def atomic_tridiag(atom):
    """(lower/upper, diag) of H_A = -1/2 d2/dx2 + V on the grid."""
    dx = atom.grid.dx
    v = atom.potential()
    diag = 1.0 / dx ** 2 + v
    off = np.full(atom.grid.nx - 1, -0.5 / dx ** 2)
    return off, diag


def ground_state(atom, tol=1e-12, max_iter=500):
    """Lowest eigenpair of the discretized H_A by shifted inverse iteration.

    Returns (ElectronState, energy). The state is real, normalized to
    sum |psi|^2 dx = 1 and positive at x = 0.
    """
    off, diag = atomic_tridiag(atom)
    dx = atom.grid.dx
    shift = float(atom.potential().min()) - 0.1
    psi = np.exp(-np.abs(atom.grid.x))     # crude even seed
    psi /= np.sqrt(np.sum(psi ** 2) * dx)
    energy = None
    for _ in range(max_iter):
        psi = solve_tridiag(off, diag - shift, off, psi.astype(complex)).real
        psi /= np.sqrt(np.sum(psi ** 2) * dx)
        e_new = float(np.sum(psi * tridiag_matvec(off, diag, off, psi)) * dx)
        if energy is not None and abs(e_new - energy) < tol:
            energy = e_new
            break
        energy = e_new
    else:
        raise EigenSolverError(
            f"ground state not converged after {max_iter} iterations")
    center = atom.grid.nx // 2
    if psi[center] < 0:
        psi = -psi
    edge = max(abs(psi[0]), abs(psi[-1]))
    if edge > 1e-10:
        warnings.warn(f"ground state not negligible at the boundary "
                      f"(|psi(x_max)| = {edge:.2e}); enlarge the box",
                      stacklevel=2)
    return ElectronState(grid=atom.grid, psi=psi.astype(complex)), energy


def bound_states(atom, k):
    """Lowest k bound eigenpairs (E < 0) of the discretized H_A."""
    from scipy.linalg import eigh_tridiagonal
    off, diag = atomic_tridiag(atom)
    vals, vecs = eigh_tridiagonal(diag, off, select="i",
                                  select_range=(0, k - 1))
    keep = vals < 0
    vecs = vecs[:, keep] / np.sqrt(atom.grid.dx)   # normalize to dx measure
    return vals[keep], vecs


def classical_field(t, alpha, fp, env):
    """E(t) = 2 |alpha| eps_v sin(w t - arg alpha) f(t)."""
    alpha = complex(alpha)
    return (2.0 * abs(alpha) * fp.eps_v
            * np.sin(fp.omega * np.asarray(t) - np.angle(alpha))
            * envelope(t, env))


def propagate_classical_batch(psi0, alphas, atom, fp, env, sched, t0=0.0):
    """Crank-Nicolson propagation of one electron wavefunction per alpha.

    psi0: (nx,) shared initial state, or (n_nodes, nx).
    Returns final wavefunctions of shape (n_nodes, nx).
    """
    alphas = np.asarray(alphas, dtype=complex)
    x = atom.grid.x
    off, diag = atomic_tridiag(atom)
    dt = sched.dt
    off_a = 1j * dt / 2.0 * off
    diag_a = 1j * dt / 2.0 * diag
    amp = 2.0 * np.abs(alphas) * fp.eps_v            # (J,)
    theta = np.angle(alphas)
    psi = np.broadcast_to(np.asarray(psi0, dtype=complex),
                          (alphas.size, x.size)).copy()
    for step in range(sched.n_steps):
        tm = t0 + (step + 0.5) * dt
        e_field = amp * np.sin(fp.omega * tm - theta) * envelope(tm, env)
        d = diag_a + (1j * dt / 2.0) * e_field[:, None] * x[None, :]
        rhs = tridiag_matvec(-off_a, 1.0 - d, -off_a, psi)
        psi = solve_tridiag(off_a, 1.0 + d, off_a, rhs)
    return psi


def propagate_classical(psi0, alpha, atom, fp, env, sched, t0=0.0):
    """Single-node classical-field propagation; see propagate_classical_batch."""
    out = propagate_classical_batch(psi0.psi, [alpha], atom, fp, env, sched, t0)
    return ElectronState(grid=psi0.grid, psi=out[0])


def init_joint_state(psi_g, photon):
    """Product state c(x, n) = psi_g(x) s_n."""
    c = psi_g.psi[:, None] * photon.coeffs[None, :]
    return JointState(grid=psi_g.grid, band=photon.band, c=c, time=0.0)


def parity_sector_masses(state):
    """(allowed, forbidden) combined-parity masses, relative to Pi = +1.

    Pi = (x parity) * (-1)^n. The Pi = +1 sector is (even x, even n)
    plus (odd x, odd n).
    """
    c = state.c
    ce = 0.5 * (c + c[::-1, :])
    co = 0.5 * (c - c[::-1, :])
    even_n = state.band.ns % 2 == 0
    dx = state.grid.dx
    m_ee = np.sum(np.abs(ce[:, even_n]) ** 2) * dx
    m_oo = np.sum(np.abs(co[:, ~even_n]) ** 2) * dx
    m_oe = np.sum(np.abs(co[:, even_n]) ** 2) * dx
    m_eo = np.sum(np.abs(ce[:, ~even_n]) ** 2) * dx
    return float(m_ee + m_oo), float(m_oe + m_eo)


def propagate_fullq(state, atom, fp, env, sched, edge_threshold=1e-8):
    """Propagate the joint electron-photon state through the pulse.

    Returns (final JointState, diagnostics dict). Diagnostics hold the
    recording times plus norm, Fock-edge occupation and the mass leaked
    into the forbidden combined-parity sector at each record point.
    """
    from scipy.linalg import solve_banded

    grid, band = state.grid, state.band
    x = grid.x
    dx = grid.dx
    off, diag = atomic_tridiag(atom)
    dt = sched.dt
    # atomic half step over dt/2: Cayley with dt/4 factors
    off_h = 1j * dt / 4.0 * off
    diag_h = 1.0 + 1j * dt / 4.0 * diag
    ab = np.zeros((3, grid.nx), dtype=complex)
    ab[0, 1:] = off_h
    ab[1, :] = diag_h
    ab[2, :-1] = off_h
    sq = np.sqrt(band.ns[:-1] + 1.0)        # couples (n, n+1), n = ns[k]

    c = state.c.copy()
    allowed0, _ = parity_sector_masses(state)
    initial_pi_plus = allowed0 >= 0.5 * state.norm()

    times, norms, edges, leaks = [], [], [], []

    def record(t_now):
        st = JointState(grid=grid, band=band, c=c, time=t_now)
        allowed, forbidden = parity_sector_masses(st)
        times.append(t_now)
        norms.append(st.norm())
        # the lower edge is a truncation boundary only when n_min > 0;
        # at n_min = 0 the vacuum column is physically occupied
        low = np.sum(np.abs(c[:, 0]) ** 2) if band.n_min > 0 else 0.0
        edges.append(float((low + np.sum(np.abs(c[:, -1]) ** 2)) * dx))
        leaks.append(forbidden if initial_pi_plus else allowed)

    record(state.time)
    for step in range(sched.n_steps):
        t = state.time + step * dt
        # half step of H_A, per Fock column (solve along x)
        rhs = tridiag_matvec(-off_h, 2.0 - diag_h, -off_h, c.T).T
        c = solve_banded((1, 1), ab, rhs)
        # full step of H_int at the midpoint, per grid row (solve along n)
        tm = t + 0.5 * dt
        g = envelope(tm, env) * fp.eps_v
        if g != 0.0 and band.count > 1:
            # M_{n,n+1} = i g x sqrt(n+1) e^{-i w tm}; A = 1 + i dt/2 M
            up = (-dt / 2.0 * g * np.exp(-1j * fp.omega * tm)) \
                * x[:, None] * sq[None, :]
            lo = (dt / 2.0 * g * np.exp(1j * fp.omega * tm)) \
                * x[:, None] * sq[None, :]
            rhs = tridiag_matvec(-lo, np.ones(band.count), -up, c)
            c = solve_tridiag(lo, np.ones(band.count), up, rhs)
        # second half step of H_A
        rhs = tridiag_matvec(-off_h, 2.0 - diag_h, -off_h, c.T).T
        c = solve_banded((1, 1), ab, rhs)

        if not np.all(np.isfinite(c)):
            raise NumericalBlowupError(
                f"non-finite amplitude at step {step}", step=step)
        if sched.record_every and (step + 1) % sched.record_every == 0:
            record(state.time + (step + 1) * dt)

    t_end = state.time + sched.n_steps * dt
    if not sched.record_every or sched.n_steps % sched.record_every != 0:
        record(t_end)
    final = JointState(grid=grid, band=band, c=c, time=t_end)
    if edges[-1] > edge_threshold:
        suggest = band.n_max + max(2, band.count // 2)
        raise BandOverflowError(
            f"Fock-edge occupation {edges[-1]:.3e} exceeds "
            f"{edge_threshold:.1e}; widen the band to n_max >= {suggest}",
            suggested_n_max=suggest)
    diagnostics = {
        "times": np.array(times),
        "norm": np.array(norms),
        "edge_occupation": np.array(edges),
        "parity_leak": np.array(leaks),
    }
    return final, diagnostics
