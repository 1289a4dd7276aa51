"""Pulse synthesis: turn rotation factors into timed, physical pulses.

Two envelope families are supported.  A square wave pulse (SWP) is a
plateau of height 2A with erf-smoothed rise and decay of width tau0; its
full-line area equals the rectangle 2A*(duration - tau0) exactly.  A
Gaussian wave packet (GWP) is 2A*exp(-q^2 (t - center)^2) with q fixed to
4/duration, so the scheduling window covers erf(2) = 99.53% of the area.

Amplitudes and durations are linked through the effective pulse area
integral(2A(t)) * d/hbar = 2C for a rotation by C on a transition with
dipole d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .constants import HBAR
from .decompose import ANGLE_EPS, Factorization
from .linalg import wrap_angle
from .systems import LevelSystem, min_detuning, system_from_json, system_to_json

__all__ = [
    "PulseSpec",
    "PulseSchedule",
    "FixedDuration",
    "FixedAmplitude",
    "ValidationReport",
    "PulseValidation",
    "swp_envelope",
    "gwp_envelope",
    "envelope",
    "operative_envelope",
    "cumulative_window_fraction",
    "window_area_fraction",
    "amplitude_for_area",
    "duration_for_amplitude",
    "schedule_from_factorization",
    "validate_schedule",
    "total_duration_bound",
    "schedule_to_json",
    "schedule_from_json",
]

SWP = "swp"
GWP = "gwp"

# Operational thresholds for the validity report: "much less than" for the
# Rabi/detuning ratio and "much greater than" for the Fourier dispersion
# margin, calibrated so 100 ps scale pulses pass and sub-ps pulses fail.
RABI_RATIO_MAX = 0.1
DISPERSION_MIN = {SWP: 10.0, GWP: 40.0}
LIFETIME_FRACTION = 0.1


@dataclass(frozen=True)
class PulseSpec:
    """One resonant pulse.

    half_amplitude is A; the field peak is 2A.  rise_decay (tau0) applies
    to SWP only, width_param (q) to GWP only.  target_area_angle is the
    rotation angle C the pulse implements.
    """

    shape: str
    transition: int
    carrier: float
    initial_phase: float
    half_amplitude: float
    start: float
    end: float
    target_area_angle: float
    rise_decay: float = None
    width_param: float = None

    def __post_init__(self):
        if self.shape not in (SWP, GWP):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if not self.end > self.start:
            raise ValueError("pulse must have positive duration")
        if self.shape == SWP:
            if self.rise_decay is None or not 0 < self.rise_decay < self.duration:
                raise ValueError("SWP needs 0 < tau0 < duration")
        else:
            if self.width_param is None:
                raise ValueError("GWP needs a width parameter q")
            if abs(self.width_param * self.duration - 4.0) > 1e-12:
                raise ValueError("GWP width must satisfy q * duration = 4")

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def center(self) -> float:
        return 0.5 * (self.start + self.end)


def swp_envelope(t, a, start, duration, tau0):
    """Smoothed square-wave field envelope (peak 2a) at time(s) t."""
    tt = np.asarray(t, dtype=float) - start
    edge = 4.0 / tau0
    return a * (erf(edge * (tt - tau0 / 2)) - erf(edge * (tt - duration + tau0 / 2)))


def gwp_envelope(t, a, start, duration):
    """Gaussian field envelope (peak 2a, q = 4/duration) at time(s) t."""
    tt = np.asarray(t, dtype=float) - start
    q = 4.0 / duration
    return 2.0 * a * np.exp(-(q * (tt - duration / 2)) ** 2)


def envelope(pulse: PulseSpec, t):
    """Nominal field envelope of a pulse at absolute time(s) t."""
    if pulse.shape == SWP:
        return swp_envelope(t, pulse.half_amplitude, pulse.start, pulse.duration, pulse.rise_decay)
    return gwp_envelope(t, pulse.half_amplitude, pulse.start, pulse.duration)


def _swp_shape_integral(t_rel, duration, tau0):
    """Integral from 0 to t_rel of the unit-plateau SWP shape.

    Uses the closed-form primitive Phi(x) = x*(1 + erf(a*x)) + exp(-(a*x)^2)/(a*sqrt(pi))
    of 1 + erf(a*x), so no quadrature is needed.
    """
    a = 4.0 / tau0
    tr, tf = tau0 / 2.0, duration - tau0 / 2.0

    def phi(x):
        return x * (1.0 + erf(a * x)) + np.exp(-((a * x) ** 2)) / (a * math.sqrt(math.pi))

    def big_f(u):
        return 0.5 * (phi(u - tr) - phi(u - tf))

    return big_f(np.asarray(t_rel, dtype=float)) - big_f(0.0)


def _gwp_shape_integral(t_rel, duration):
    """Integral from 0 to t_rel of the unit-peak GWP shape."""
    q = 4.0 / duration
    c = duration / 2.0
    s = np.asarray(t_rel, dtype=float)
    return (math.sqrt(math.pi) / (2.0 * q)) * (erf(q * (s - c)) + erf(q * c))


def _full_line_shape_area(shape, duration, tau0=None):
    if shape == SWP:
        return duration - tau0
    return math.sqrt(math.pi) * duration / 4.0  # sqrt(pi)/q


def window_area_fraction(shape, duration, tau0=None) -> float:
    """Fraction of the full-line envelope area inside the pulse window."""
    if shape == SWP:
        window = float(_swp_shape_integral(duration, duration, tau0))
    else:
        window = float(_gwp_shape_integral(duration, duration))
    return window / _full_line_shape_area(shape, duration, tau0)


def cumulative_window_fraction(pulse: PulseSpec, t):
    """Fraction of the pulse's window area accumulated by time(s) t.

    Runs from 0 at the pulse start to exactly 1 at the pulse end; the
    propagators scale it by the target rotation angle C.
    """
    t_rel = np.asarray(t, dtype=float) - pulse.start
    if pulse.shape == SWP:
        cum = _swp_shape_integral(t_rel, pulse.duration, pulse.rise_decay)
        total = _swp_shape_integral(pulse.duration, pulse.duration, pulse.rise_decay)
    else:
        cum = _gwp_shape_integral(t_rel, pulse.duration)
        total = _gwp_shape_integral(pulse.duration, pulse.duration)
    return cum / total


def operative_envelope(pulse: PulseSpec, t):
    """Driving field the simulator integrates: the nominal envelope scaled
    so the window delivers the full design area 2C (GWP: 1/erf(2))."""
    tau0 = pulse.rise_decay if pulse.shape == SWP else None
    kappa = 1.0 / window_area_fraction(pulse.shape, pulse.duration, tau0)
    return kappa * envelope(pulse, t)


def amplitude_for_area(c_angle: float, shape: str, duration: float, tau0_or_q, d: float) -> float:
    """Half-amplitude A giving effective pulse area 2C at fixed duration.

    SWP: A = hbar*C / ((duration - tau0) * d);
    GWP: A = 4*hbar*C / (sqrt(pi) * duration * d).
    """
    if c_angle <= 0:
        raise ValueError("rotation angle must be positive")
    if shape == SWP:
        tau0 = tau0_or_q
        if duration <= tau0:
            raise ValueError("SWP duration must exceed tau0")
        return HBAR * c_angle / ((duration - tau0) * d)
    if shape == GWP:
        return 4.0 * HBAR * c_angle / (math.sqrt(math.pi) * duration * d)
    raise ValueError(f"unknown pulse shape {shape!r}")


def duration_for_amplitude(c_angle: float, shape: str, a_max: float, d: float, tau0: float = 0.0) -> float:
    """Pulse duration at the peak-field ceiling a_max (the full field 2A).

    SWP: duration = 2*C*hbar/(a_max*d) + tau0;
    GWP: duration = 8*C*hbar/(sqrt(pi)*a_max*d).
    """
    if c_angle <= 0 or a_max <= 0:
        raise ValueError("rotation angle and field ceiling must be positive")
    if shape == SWP:
        return 2.0 * c_angle * HBAR / (a_max * d) + tau0
    if shape == GWP:
        return 8.0 * c_angle * HBAR / (math.sqrt(math.pi) * a_max * d)
    raise ValueError(f"unknown pulse shape {shape!r}")


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered, non-overlapping pulses on one system."""

    system: LevelSystem
    pulses: tuple

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        n = self.system.level_count
        prev_end = -math.inf
        for p in self.pulses:
            if not 1 <= p.transition <= n - 1:
                raise ValueError(f"pulse transition {p.transition} out of range")
            if p.start < prev_end - 1e-15 * max(abs(prev_end), 1.0):
                raise ValueError("pulses must be ordered and non-overlapping")
            prev_end = p.end
            d = self.system.dipoles[p.transition - 1]
            tau0 = p.rise_decay if p.shape == SWP else None
            area = 2.0 * p.half_amplitude * _full_line_shape_area(p.shape, p.duration, tau0) * d / HBAR
            want = 2.0 * p.target_area_angle
            if abs(area - want) > 1e-9 * max(abs(want), 1e-30):
                raise ValueError(
                    f"pulse area {area:.12e} does not match 2C = {want:.12e} "
                    f"on transition {p.transition}"
                )

    @property
    def total_duration(self) -> float:
        return self.pulses[-1].end if self.pulses else 0.0


@dataclass(frozen=True)
class FixedDuration:
    """Every pulse gets the same duration; amplitudes absorb the areas."""

    shape: str
    duration: float
    tau0: float = 0.0

    def solve(self, c_angle, d):
        a = amplitude_for_area(c_angle, self.shape, self.duration, self.tau0, d)
        return a, self.duration


@dataclass(frozen=True)
class FixedAmplitude:
    """Every pulse runs at the peak-field ceiling; durations absorb the areas."""

    shape: str
    max_field: float   # field peak 2A in V/m
    tau0: float = 0.0

    def solve(self, c_angle, d):
        dt = duration_for_amplitude(c_angle, self.shape, self.max_field, d, self.tau0)
        return self.max_field / 2.0, dt


def schedule_from_factorization(f: Factorization, system: LevelSystem, policy) -> PulseSchedule:
    """One pulse per factor, back to back, in application order.

    Negative rotation angles are folded into the phase (C, phi) ->
    (-C, phi + pi); zero-angle factors are dropped.
    """
    if f.n != system.level_count:
        raise ValueError("factorization and system dimensions differ")
    pulses = []
    cursor = 0.0
    for fac in f.factors:
        c_angle, phi = fac.angle, fac.phase
        if c_angle < 0:
            c_angle, phi = -c_angle, float(wrap_angle(phi + math.pi))
        if c_angle < ANGLE_EPS:
            continue
        d = system.dipoles[fac.transition - 1]
        a, dt = policy.solve(c_angle, d)
        pulses.append(
            PulseSpec(
                shape=policy.shape,
                transition=fac.transition,
                carrier=system.frequencies[fac.transition - 1],
                initial_phase=phi,
                half_amplitude=a,
                start=cursor,
                end=cursor + dt,
                target_area_angle=c_angle,
                rise_decay=policy.tau0 if policy.shape == SWP else None,
                width_param=4.0 / dt if policy.shape == GWP else None,
            )
        )
        cursor += dt
    return PulseSchedule(system=system, pulses=tuple(pulses))


@dataclass(frozen=True)
class PulseValidation:
    transition: int
    shape: str
    peak_rabi: float
    rabi_ratio: float
    rabi_pass: bool
    dispersion_margin: float
    dispersion_pass: bool


@dataclass(frozen=True)
class ValidationReport:
    pulses: tuple
    total_duration: float
    min_lifetime: float
    lifetime_pass: bool

    @property
    def passed(self) -> bool:
        return self.lifetime_pass and all(
            p.rabi_pass and p.dispersion_pass for p in self.pulses
        )

    def to_json(self) -> dict:
        return {
            "pulses": [
                {
                    "transition": p.transition,
                    "shape": p.shape,
                    "peak_rabi_rads": p.peak_rabi,
                    "rabi_ratio": p.rabi_ratio,
                    "rabi_pass": p.rabi_pass,
                    "dispersion_margin": p.dispersion_margin,
                    "dispersion_pass": p.dispersion_pass,
                }
                for p in self.pulses
            ],
            "total_duration_s": self.total_duration,
            "min_lifetime_s": self.min_lifetime,
            "lifetime_pass": self.lifetime_pass,
            "passed": self.passed,
        }


def validate_schedule(schedule: PulseSchedule) -> ValidationReport:
    """Check each pulse against the resonant-control validity conditions.

    Peak Rabi frequency (2A*d/hbar on the SWP plateau, 8C/(sqrt(pi)*dt)
    for GWP) must stay well below the minimum detuning, and the Fourier
    dispersion margin dt * min_detuning must be large so the pulse
    spectrum cannot reach neighbouring transitions.  Report-only.
    """
    dw = min_detuning(schedule.system)
    rows = []
    for p in schedule.pulses:
        d = schedule.system.dipoles[p.transition - 1]
        if p.shape == SWP:
            rabi = 2.0 * p.half_amplitude * d / HBAR
        else:
            rabi = 8.0 * p.target_area_angle / (math.sqrt(math.pi) * p.duration)
        ratio = 0.0 if math.isinf(dw) else rabi / dw
        margin = math.inf if math.isinf(dw) else p.duration * dw
        rows.append(
            PulseValidation(
                transition=p.transition,
                shape=p.shape,
                peak_rabi=rabi,
                rabi_ratio=ratio,
                rabi_pass=ratio < RABI_RATIO_MAX,
                dispersion_margin=margin,
                dispersion_pass=margin > DISPERSION_MIN[p.shape],
            )
        )
    lifetimes = schedule.system.lifetimes
    min_life = min(lifetimes) if lifetimes else None
    life_ok = True if min_life is None else schedule.total_duration < LIFETIME_FRACTION * min_life
    return ValidationReport(
        pulses=tuple(rows),
        total_duration=schedule.total_duration,
        min_lifetime=min_life,
        lifetime_pass=life_ok,
    )


def total_duration_bound(system: LevelSystem, max_fields, shape: str, tau0: float = 0.0,
                         exact_mode: bool = False) -> float:
    """Worst-case schedule length for decomposing any unitary on the system.

    A generic factorization spends N-m rotations on transition m (plus two
    more in exact mode), each at most a pi pulse at the field ceiling.
    """
    n = system.level_count
    if np.isscalar(max_fields):
        max_fields = [float(max_fields)] * (n - 1)
    if len(max_fields) != n - 1:
        raise ValueError("need one field ceiling per transition")
    total = 0.0
    for m in range(1, n):
        dt = duration_for_amplitude(math.pi / 2, shape, max_fields[m - 1],
                                    system.dipoles[m - 1], tau0)
        count = (n - m + 2) if exact_mode else (n - m)
        total += dt * count
    return total


def schedule_to_json(schedule: PulseSchedule) -> dict:
    pulses = []
    for p in schedule.pulses:
        doc = {
            "shape": p.shape,
            "transition": p.transition,
            "carrier_rads": p.carrier,
            "phase_rad": p.initial_phase,
            "half_amplitude_Vm": p.half_amplitude,
            "start_s": p.start,
            "end_s": p.end,
            "angle_rad": p.target_area_angle,
        }
        if p.shape == SWP:
            doc["tau0_s"] = p.rise_decay
        else:
            doc["q_per_s"] = p.width_param
        pulses.append(doc)
    return {"system": system_to_json(schedule.system), "pulses": pulses}


def schedule_from_json(doc: dict) -> PulseSchedule:
    system = system_from_json(doc["system"])
    pulses = tuple(
        PulseSpec(
            shape=d["shape"],
            transition=int(d["transition"]),
            carrier=float(d["carrier_rads"]),
            initial_phase=float(d["phase_rad"]),
            half_amplitude=float(d["half_amplitude_Vm"]),
            start=float(d["start_s"]),
            end=float(d["end_s"]),
            target_area_angle=float(d["angle_rad"]),
            rise_decay=float(d["tau0_s"]) if "tau0_s" in d else None,
            width_param=float(d["q_per_s"]) if "q_per_s" in d else None,
        )
        for d in doc["pulses"]
    )
    return PulseSchedule(system=system, pulses=pulses)
