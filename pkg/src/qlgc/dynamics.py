"""Propagation of ladder-system states under a pulse schedule.

Two independent engines evolve the interaction-picture operator U_I(t).
The piecewise engine is exact: within one resonant pulse, U_I is the
rotation factor of the running pulse area, evaluated in closed form.
The ODE engine integrates the same driving field with an adaptive
Runge-Kutta method and serves as an end-to-end cross-check; unitarity is
never re-imposed, so its drift is a genuine error metric.

Populations, coherence magnitudes and the unperturbed energy are frame
independent, so the stored time series applies to the lab frame as well.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import HBAR
from .linalg import RotationFactor, factor_matrix
from .pulses import SWP, PulseSchedule, cumulative_window_fraction, operative_envelope
from .systems import LevelSystem

__all__ = [
    "QuantumState",
    "TimeSeries",
    "ground_state",
    "pure_state",
    "density_state",
    "coherence_pairs",
    "free_propagator",
    "propagate_piecewise",
    "propagate_ode",
    "observables",
]

DEFAULT_SAMPLES_PER_PULSE = 512


@dataclass(frozen=True)
class QuantumState:
    """Pure state vector or density matrix, tagged with its frame."""

    kind: str                 # "pure" | "density"
    data: np.ndarray
    frame: str = "interaction"  # "lab" | "interaction" (identical at t = 0)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        if self.kind == "pure":
            if data.ndim != 1:
                raise ValueError("pure state must be a vector")
            if abs(np.linalg.norm(data) - 1.0) > 1e-9:
                raise ValueError("pure state must be normalized")
        elif self.kind == "density":
            if data.ndim != 2 or data.shape[0] != data.shape[1]:
                raise ValueError("density matrix must be square")
            if np.linalg.norm(data - data.conj().T) > 1e-9:
                raise ValueError("density matrix must be Hermitian")
            if abs(np.trace(data).real - 1.0) > 1e-9:
                raise ValueError("density matrix must have unit trace")
            if np.linalg.eigvalsh((data + data.conj().T) / 2).min() < -1e-9:
                raise ValueError("density matrix must be positive semidefinite")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        if self.frame not in ("lab", "interaction"):
            raise ValueError(f"unknown frame {self.frame!r}")

    @property
    def dimension(self) -> int:
        return self.data.shape[0]

    def density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data.copy()


def ground_state(n: int) -> QuantumState:
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return QuantumState("pure", v)


def pure_state(vector) -> QuantumState:
    return QuantumState("pure", np.asarray(vector, dtype=complex))


def density_state(matrix) -> QuantumState:
    return QuantumState("density", np.asarray(matrix, dtype=complex))


def coherence_pairs(n: int):
    """Index pairs (m, k), m < k, in the lexicographic storage order."""
    return [(m, k) for m in range(1, n + 1) for k in range(m + 1, n + 1)]


@dataclass(frozen=True)
class TimeSeries:
    """Sampled observables along a propagation run."""

    times: np.ndarray          # (T,)
    populations: np.ndarray    # (T, N)
    coherences: np.ndarray     # (T, N(N-1)/2), magnitudes, pairs lexicographic
    energy: np.ndarray         # (T,)
    envelope: np.ndarray       # (T,), operative driving field in V/m
    obs: np.ndarray = None     # (T,) dynamic-observable average, optional

    @property
    def level_count(self) -> int:
        return self.populations.shape[1]

    def header(self):
        n = self.level_count
        cols = ["t_s"] + [f"pop_{i}" for i in range(1, n + 1)]
        cols += [f"coh_{m}_{k}" for m, k in coherence_pairs(n)]
        cols += ["energy_J", "obs_avg", "envelope_Vm"]
        return cols

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header())
            for i, t in enumerate(self.times):
                row = [repr(float(t))]
                row += [repr(float(x)) for x in self.populations[i]]
                row += [repr(float(x)) for x in self.coherences[i]]
                row.append(repr(float(self.energy[i])))
                row.append("" if self.obs is None else repr(float(self.obs[i])))
                row.append(repr(float(self.envelope[i])))
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
        n = sum(1 for c in header if c.startswith("pop_"))
        k = sum(1 for c in header if c.startswith("coh_"))
        times, pops, cohs, energy, obs, env = [], [], [], [], [], []
        for row in rows:
            times.append(float(row[0]))
            pops.append([float(x) for x in row[1:1 + n]])
            cohs.append([float(x) for x in row[1 + n:1 + n + k]])
            energy.append(float(row[1 + n + k]))
            obs.append(float(row[2 + n + k]) if row[2 + n + k] != "" else math.nan)
            env.append(float(row[3 + n + k]))
        obs_arr = np.asarray(obs)
        if np.all(np.isnan(obs_arr)):
            obs_arr = None
        return cls(
            times=np.asarray(times),
            populations=np.asarray(pops),
            coherences=np.asarray(cohs),
            energy=np.asarray(energy),
            envelope=np.asarray(env),
            obs=obs_arr,
        )


def free_propagator(system: LevelSystem, t: float) -> np.ndarray:
    """Unperturbed evolution operator, diag(e^{-i E_n t / hbar})."""
    e = np.asarray(system.energies)
    return np.diag(np.exp(-1j * e * t / HBAR))


def _check_observable(a, n):
    if a is None:
        return None
    a = np.asarray(a, dtype=complex)
    if a.shape != (n, n):
        raise ValueError("observable dimension mismatch")
    if np.linalg.norm(a - a.conj().T) > 1e-10 * max(np.linalg.norm(a), 1e-300):
        raise ValueError("observable must be Hermitian")
    return a


def observables(state: QuantumState, system: LevelSystem, a=None, t: float = 0.0) -> dict:
    """Populations, coherence magnitudes, energy and an optional dynamic
    observable average Tr(A rho_I) for one state.

    The dynamic observable follows the free frame rotation, so its average
    equals the plain interaction-picture trace regardless of t.
    """
    n = system.level_count
    a = _check_observable(a, n)
    rho = state.density()
    if state.frame == "lab":
        u0 = free_propagator(system, t)
        rho_i = u0.conj().T @ rho @ u0
    else:
        rho_i = rho
    pops = np.real(np.diag(rho_i))
    cohs = np.array([abs(rho_i[m - 1, k - 1]) for m, k in coherence_pairs(n)])
    energy = float(np.real(np.sum(np.asarray(system.energies) * pops)))
    rec = {"populations": pops, "coherences": cohs, "energy": energy, "obs_avg": None}
    if a is not None:
        rec["obs_avg"] = float(np.real(np.trace(a @ rho_i)))
    return rec


def _sample_grid(schedule: PulseSchedule, samples_per_pulse: int):
    """Per-pulse sample times; duplicate boundary points are merged."""
    groups = []
    last_t = None
    if not schedule.pulses or schedule.pulses[0].start > 0.0:
        groups.append((None, np.array([0.0])))
        last_t = 0.0
    for p in schedule.pulses:
        grid = np.linspace(p.start, p.end, max(2, samples_per_pulse))
        if last_t is not None and abs(grid[0] - last_t) <= 1e-18 + 1e-12 * abs(last_t):
            grid = grid[1:]
        groups.append((p, grid))
        last_t = p.end
    return groups


def _assemble_series(times, rows_u, rho0, system, a, env_values):
    n = system.level_count
    pairs = coherence_pairs(n)
    e = np.asarray(system.energies)
    t_count = len(times)
    pops = np.empty((t_count, n))
    cohs = np.empty((t_count, len(pairs)))
    energy = np.empty(t_count)
    obs = np.empty(t_count) if a is not None else None
    for i, u in enumerate(rows_u):
        rho = u @ rho0 @ u.conj().T
        pops[i] = np.real(np.diag(rho))
        cohs[i] = [abs(rho[m - 1, k - 1]) for m, k in pairs]
        energy[i] = float(np.real(np.sum(e * pops[i])))
        if a is not None:
            obs[i] = float(np.real(np.trace(a @ rho)))
    return TimeSeries(
        times=np.asarray(times),
        populations=pops,
        coherences=cohs,
        energy=energy,
        envelope=np.asarray(env_values),
        obs=obs,
    )


def propagate_piecewise(schedule: PulseSchedule, state0: QuantumState,
                        samples_per_pulse: int = DEFAULT_SAMPLES_PER_PULSE,
                        observable=None):
    """Exact interaction-picture propagation, one rotation factor per pulse.

    Within pulse k the operator is the closed-form factor of the running
    area angle C_k(t), which reaches the design angle exactly at the pulse
    end.

    Returns:
        (TimeSeries, final interaction operator U_I(T)).
    """
    n = schedule.system.level_count
    if state0.dimension != n:
        raise ValueError("state and schedule dimensions differ")
    a = _check_observable(observable, n)
    rho0 = state0.density()
    u_acc = np.eye(n, dtype=complex)
    times, rows_u, env = [], [], []
    for pulse, grid in _sample_grid(schedule, samples_per_pulse):
        if pulse is None:
            for t in grid:
                times.append(t)
                rows_u.append(u_acc.copy())
                env.append(0.0)
            continue
        frac = cumulative_window_fraction(pulse, grid)
        field = operative_envelope(pulse, grid)
        for t, fr, ev in zip(grid, np.atleast_1d(frac), np.atleast_1d(field)):
            v = factor_matrix(
                n, RotationFactor(pulse.transition, pulse.target_area_angle * fr,
                                  pulse.initial_phase))
            times.append(t)
            rows_u.append(v @ u_acc)
            env.append(float(ev))
        v_full = factor_matrix(
            n, RotationFactor(pulse.transition, pulse.target_area_angle, pulse.initial_phase))
        u_acc = v_full @ u_acc
    series = _assemble_series(times, rows_u, rho0, schedule.system, a, env)
    return series, u_acc


def _pulse_generator(pulse, n):
    """Direction matrix G with dU/dt = rate(t) G U during the pulse."""
    g = np.zeros((n, n), dtype=complex)
    m = pulse.transition
    phi = pulse.initial_phase
    # x_m sin(phi) - y_m cos(phi): the 2x2 block of the factor's generator
    g[m - 1, m] = math.sin(phi) - 1j * math.cos(phi)
    g[m, m - 1] = -math.sin(phi) - 1j * math.cos(phi)
    return g


def propagate_ode(schedule: PulseSchedule, state0: QuantumState, rel_tol: float = 1e-9,
                  samples_per_pulse: int = DEFAULT_SAMPLES_PER_PULSE,
                  observable=None):
    """Adaptive Runge-Kutta integration of the driven interaction picture.

    Integrates dU_I/dt = (d/2hbar) E(t) (x_m sin phi - y_m cos phi) U_I
    pulse by pulse with the same operative field the piecewise engine
    uses, without re-unitarization.

    Returns:
        (TimeSeries, final interaction operator U_I(T)).
    """
    if not 1e-12 <= rel_tol <= 1e-3:
        raise ValueError("rel_tol must lie in [1e-12, 1e-3]")
    n = schedule.system.level_count
    if state0.dimension != n:
        raise ValueError("state and schedule dimensions differ")
    a = _check_observable(observable, n)
    rho0 = state0.density()
    u_acc = np.eye(n, dtype=complex)
    times, rows_u, env = [], [], []

    def pack(u):
        return np.concatenate([u.real.ravel(), u.imag.ravel()])

    def unpack(y):
        return y[: n * n].reshape(n, n) + 1j * y[n * n:].reshape(n, n)

    for pulse, grid in _sample_grid(schedule, samples_per_pulse):
        if pulse is None:
            for t in grid:
                times.append(t)
                rows_u.append(u_acc.copy())
                env.append(0.0)
            continue
        g = _pulse_generator(pulse, n)
        gr, gi = g.real, g.imag
        d = schedule.system.dipoles[pulse.transition - 1]

        def rhs(t, y, gr=gr, gi=gi, d=d, pulse=pulse):
            rate = float(operative_envelope(pulse, t)) * d / (2.0 * HBAR)
            ur = y[: n * n].reshape(n, n)
            ui = y[n * n:].reshape(n, n)
            dur = rate * (gr @ ur - gi @ ui)
            dui = rate * (gr @ ui + gi @ ur)
            return np.concatenate([dur.ravel(), dui.ravel()])

        sol = solve_ivp(
            rhs, (pulse.start, pulse.end), pack(u_acc),
            method="DOP853", rtol=rel_tol, atol=rel_tol * 1e-3,
            t_eval=np.asarray(grid),
        )
        if not sol.success:
            raise RuntimeError(f"ODE integration failed: {sol.message}")
        field = np.atleast_1d(operative_envelope(pulse, grid))
        for i, t in enumerate(grid):
            times.append(t)
            rows_u.append(unpack(sol.y[:, i]))
            env.append(float(field[i]))
        u_acc = unpack(sol.y[:, -1])  # grid always ends at pulse.end
    series = _assemble_series(times, rows_u, rho0, schedule.system, a, env)
    return series, u_acc
