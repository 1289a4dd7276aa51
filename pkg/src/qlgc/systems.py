"""N-level ladder systems: energies, adjacent-transition dipoles, frequencies.

Only neighbouring levels are dipole coupled.  Two presets ship with the
package: a 4-level rubidium ladder ("rb4") and a 4-level Morse-oscillator
ladder for hydrogen fluoride ("hf4").
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR

__all__ = [
    "LevelSystem",
    "ValidityBudget",
    "build_ladder_system",
    "morse_system",
    "hf4_preset",
    "rb4_preset",
    "min_detuning",
    "validity_budget",
    "system_to_json",
    "system_from_json",
    "get_system",
    "PRESET_NAMES",
]

PRESET_NAMES = ("rb4", "hf4")

# Dipole scale of the HF Morse ladder, calibrated so that pi pulses at a
# 5e6 V/m peak field last 224.4/164.5/138.0 ps (square) and
# 461.3/326.2/266.3 ps (Gaussian) on transitions 1/2/3.
_HF_P0 = 3.2416e-31

# Rb transition dipoles, calibrated against pi-pulse lengths at a
# 1e5 V/m peak field: 124.2/132.7/697.1 ps square (20 ps edges) and the
# matching Gaussian lengths.  d2 balances the square and Gaussian fits.
_RB_D1 = math.pi * HBAR / (1e5 * 104.2e-12)
_RB_D2 = (math.pi + 4.0 * math.sqrt(math.pi)) * HBAR / (1e5 * 367.4e-12)
_RB_D3 = math.pi * HBAR / (1e5 * 677.1e-12)


@dataclass(frozen=True)
class LevelSystem:
    """Immutable description of an N-level ladder.

    energies are in joules (strictly increasing), dipoles in C m (one per
    adjacent transition, strictly positive), frequencies in rad/s (pairwise
    distinct so each pulse addresses a single transition).  Lifetimes, when
    present, budget how long a schedule may run; they never enter the
    dynamics.
    """

    name: str
    energies: tuple
    dipoles: tuple
    frequencies: tuple
    lifetimes: tuple = None
    min_detuning_override: float = None

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        object.__setattr__(self, "dipoles", tuple(float(d) for d in self.dipoles))
        object.__setattr__(self, "frequencies", tuple(float(w) for w in self.frequencies))
        if self.lifetimes is not None:
            object.__setattr__(self, "lifetimes", tuple(float(t) for t in self.lifetimes))
        n = len(self.energies)
        if n < 2:
            raise ValueError("a ladder system needs at least 2 levels")
        if len(self.dipoles) != n - 1 or len(self.frequencies) != n - 1:
            raise ValueError("need exactly N-1 dipoles and N-1 frequencies")
        if self.lifetimes is not None and len(self.lifetimes) != n - 1:
            raise ValueError("need exactly N-1 lifetimes (levels 2..N)")
        if any(e2 <= e1 for e1, e2 in zip(self.energies, self.energies[1:])):
            raise ValueError("energies must be strictly increasing")
        if any(d <= 0 for d in self.dipoles):
            raise ValueError("dipole moments must be strictly positive")
        for i in range(n - 1):
            for j in range(i + 1, n - 1):
                wi, wj = self.frequencies[i], self.frequencies[j]
                if abs(wi - wj) <= 1e-9 * max(abs(wi), abs(wj)):
                    raise ValueError(
                        f"duplicate transition frequencies on transitions "
                        f"{i + 1} and {j + 1}: resonant pulses cannot be selective"
                    )

    @property
    def level_count(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class ValidityBudget:
    min_detuning: float           # rad/s
    min_lifetime: float = None    # s, absent when the system declares none


def build_ladder_system(energies, dipoles, lifetimes=None, name="custom") -> LevelSystem:
    """Build a ladder system, deriving frequencies from energy gaps."""
    energies = tuple(float(e) for e in energies)
    freqs = tuple((e2 - e1) / HBAR for e1, e2 in zip(energies, energies[1:]))
    return LevelSystem(name, energies, tuple(dipoles), freqs, lifetimes)


def morse_system(omega0: float, b: float, p0: float, n: int, name=None) -> LevelSystem:
    """Morse-oscillator ladder with anharmonicity b and dipole scale p0.

    E_n = hbar*omega0*(n - 1/2)*(1 - (b/2)*(n - 1/2)) for n = 1..N,
    d_m = p0*sqrt(m), omega_m = omega0*(1 - b*m).
    """
    if n < 2:
        raise ValueError("need at least 2 levels")
    energies = tuple(
        HBAR * omega0 * (k - 0.5) * (1.0 - (b / 2.0) * (k - 0.5)) for k in range(1, n + 1)
    )
    dipoles = tuple(p0 * math.sqrt(m) for m in range(1, n))
    freqs = tuple(omega0 * (1.0 - b * m) for m in range(1, n))
    return LevelSystem(name or f"morse{n}", energies, dipoles, freqs)


def hf4_preset() -> LevelSystem:
    """4-level HF vibrational ladder (Morse, omega0 = 0.78e15 rad/s, B = 0.0419)."""
    return morse_system(0.78e15, 0.0419, _HF_P0, 4, name="hf4")


def rb4_preset() -> LevelSystem:
    """4-level rubidium ladder driven through three optical transitions.

    Transition frequencies are nominal (the dynamics is frequency
    independent on resonance); selectivity uses the declared 4e14 rad/s
    minimum detuning.  Lifetimes bound the usable schedule length.
    """
    freqs = (2.414e15, 1.232e15, 0.362e15)
    energies = (0.0,) + tuple(HBAR * c for c in np.cumsum(freqs))
    return LevelSystem(
        name="rb4",
        energies=energies,
        dipoles=(_RB_D1, _RB_D2, _RB_D3),
        frequencies=freqs,
        lifetimes=(28e-9, 90e-9, 107e-9),
        min_detuning_override=4e14,
    )


def min_detuning(system: LevelSystem) -> float:
    """Smallest spacing between any two transition frequencies (rad/s).

    A two-level system has no off-resonant transition and returns +inf.
    Presets may declare an explicit override.
    """
    if system.min_detuning_override is not None:
        return system.min_detuning_override
    w = system.frequencies
    if len(w) < 2:
        return math.inf
    return min(abs(w[i] - w[j]) for i in range(len(w)) for j in range(i + 1, len(w)))


def validity_budget(system: LevelSystem) -> ValidityBudget:
    life = min(system.lifetimes) if system.lifetimes else None
    return ValidityBudget(min_detuning=min_detuning(system), min_lifetime=life)


def system_to_json(system: LevelSystem) -> dict:
    doc = {
        "name": system.name,
        "energies_J": list(system.energies),
        "dipoles_Cm": list(system.dipoles),
        "frequencies_rads": list(system.frequencies),
    }
    if system.lifetimes is not None:
        doc["lifetimes_s"] = list(system.lifetimes)
    if system.min_detuning_override is not None:
        doc["min_detuning_rads"] = system.min_detuning_override
    return doc


def system_from_json(doc: dict) -> LevelSystem:
    energies = doc["energies_J"]
    freqs = doc.get("frequencies_rads")
    if freqs is None:
        freqs = [(e2 - e1) / HBAR for e1, e2 in zip(energies, energies[1:])]
    return LevelSystem(
        name=doc.get("name", "custom"),
        energies=tuple(energies),
        dipoles=tuple(doc["dipoles_Cm"]),
        frequencies=tuple(freqs),
        lifetimes=tuple(doc["lifetimes_s"]) if "lifetimes_s" in doc else None,
        min_detuning_override=doc.get("min_detuning_rads"),
    )


def get_system(name_or_path: str) -> LevelSystem:
    """Resolve a preset name ("rb4", "hf4") or a system JSON file path."""
    if name_or_path == "rb4":
        return rb4_preset()
    if name_or_path == "hf4":
        return hf4_preset()
    with open(name_or_path) as fh:
        return system_from_json(json.load(fh))
