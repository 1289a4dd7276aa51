"""High-level control recipes.

Each scheme builds a target unitary, factorizes it, and returns the
factorization together with the predicted final state so the caller can
synthesize pulses and check the simulation against the prediction.
All schemes assume a diagonal initial ensemble, which is what makes the
mod-phase factorization sufficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .decompose import Factorization, decompose_mod_phase, factor_product
from .linalg import (
    DiagonalPhases,
    RotationFactor,
    gram_schmidt_extend,
    hermitian_eigensystem,
    wrap_angle,
)

__all__ = [
    "SchemeResult",
    "population_transfer_scheme",
    "inversion_scheme",
    "superposition_scheme",
    "superposition_phase_solution",
    "transition_dipole_observable",
    "kinematical_bound",
    "observable_max_scheme",
    "phase_sensitivity_probe",
]

DEFAULT_PHASE = -math.pi / 2   # pure-sine driving fields


@dataclass(frozen=True)
class SchemeResult:
    """Factorization plus predictions for one control objective."""

    factorization: Factorization
    predicted_state: np.ndarray          # density matrix
    predicted_objective: float | None = None
    notes: dict = field(default_factory=dict)


def _pi_pulse_factorization(n, transitions):
    factors = tuple(
        RotationFactor(m, math.pi / 2, DEFAULT_PHASE) for m in transitions
    )
    return Factorization(
        n=n, mode="mod-phase", factors=factors,
        residual=DiagonalPhases((0.0,) * n),
    )


def population_transfer_scheme(n: int) -> SchemeResult:
    """Move all population from level 1 to level N with N-1 pi pulses."""
    if n < 2:
        raise ValueError("need at least 2 levels")
    fact = _pi_pulse_factorization(n, range(1, n))
    predicted = np.zeros((n, n), dtype=complex)
    predicted[n - 1, n - 1] = 1.0
    return SchemeResult(
        factorization=fact,
        predicted_state=predicted,
        predicted_objective=1.0,  # final population of level N
        notes={"kind": "transfer"},
    )


def inversion_scheme(n: int, weights=None) -> SchemeResult:
    """Reverse the populations of any diagonal ensemble.

    N(N-1)/2 pi pulses on transitions (1..N-1, 1..N-2, ..., 1) map
    diag(w_1..w_N) to diag(w_N..w_1) independently of the pulse phases
    and of the weights themselves.
    """
    if n < 2:
        raise ValueError("need at least 2 levels")
    if weights is None:
        weights = (1.0,) + (0.0,) * (n - 1)
    weights = _check_weights(weights, n)
    transitions = []
    for block in range(n - 1, 0, -1):
        transitions.extend(range(1, block + 1))
    fact = _pi_pulse_factorization(n, transitions)
    predicted = np.diag(np.asarray(weights[::-1], dtype=complex))
    return SchemeResult(
        factorization=fact,
        predicted_state=predicted,
        notes={"kind": "invert", "weights": tuple(weights)},
    )


def superposition_scheme(r, theta) -> SchemeResult:
    """Drive level 1 into the superposition sum_n r_n e^{i theta_n} |n>.

    The target unitary is the diagonal phase matrix times the
    Gram-Schmidt completion of the amplitude column; its mod-phase
    factorization reproduces the target from |1> up to a global phase,
    so every coherence magnitude lands on r_m * r_n.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = r.size
    if theta.size != n:
        raise ValueError("r and theta must have the same length")
    if np.any(r < 0):
        raise ValueError("amplitudes must be non-negative")
    if abs(np.sum(r**2) - 1.0) > 1e-9:
        raise ValueError("amplitudes must satisfy sum r_n^2 = 1")
    u1 = gram_schmidt_extend(r.astype(complex))
    target = np.diag(np.exp(1j * theta)) @ u1
    fact = decompose_mod_phase(target)
    psi = r * np.exp(1j * theta)
    achieved = factor_product(fact)[:, 0]
    return SchemeResult(
        factorization=fact,
        predicted_state=np.outer(psi, psi.conj()),
        notes={
            "kind": "superpose",
            "target_amplitudes": tuple(r),
            "target_phases": tuple(theta),
            "achieved_phases": tuple(float(p) for p in np.angle(achieved)),
        },
    )


def superposition_phase_solution(theta, phi1: float):
    """Pulse phases creating the 4-level equal-amplitude superposition.

    For the fixed rotation-angle sequence (pi/3, arctan sqrt2, pi/4,
    pi/2, pi/2) on transitions (1, 2, 3, 2, 1), these five phases steer
    |1> to (1/2) sum_n e^{i theta_n} |n> for any target phases theta.
    """
    t1, t2, t3, t4 = (float(t) for t in theta)
    phi1 = float(phi1)
    phis = (
        phi1,
        math.pi / 2 - 2 * phi1 - t1 - t2 - t3,
        phi1 + t1 + t2 + t3 - t4,
        math.pi - phi1 - t3,
        -math.pi / 2 - t2,
    )
    return tuple(float(wrap_angle(p)) for p in phis)


def _check_weights(w, n=None):
    w = tuple(float(x) for x in w)
    if n is not None and len(w) != n:
        raise ValueError("weight count must equal the dimension")
    if any(x < -1e-12 for x in w):
        raise ValueError("weights must be non-negative")
    if abs(sum(w) - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    return w


def transition_dipole_observable(dipoles) -> np.ndarray:
    """Ladder coupling operator sum_m d_m (|m><m+1| + |m+1><m|)."""
    d = np.asarray(dipoles, dtype=float)
    n = d.size + 1
    a = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = d
    a[idx + 1, idx] = d
    return a


def kinematical_bound(a, w):
    """Largest ensemble average of observable a reachable by any unitary.

    Pairs the k-th largest weight with the k-th largest eigenvalue:
    bound = sum_n w_{sigma(n)} lambda_n.

    Returns:
        (bound, sigma) where w[sigma[n]] pairs with eigenvalue n.
    """
    w = np.asarray(_check_weights(w))
    lam, _ = hermitian_eigensystem(a)
    sigma = np.argsort(-w, kind="stable")
    bound = float(np.sum(w[sigma] * lam))
    return bound, tuple(int(s) for s in sigma)


def observable_max_scheme(a, w) -> SchemeResult:
    """Rotate a diagonal ensemble to maximize the average of observable a.

    The target unitary sends the energy level carrying the n-th largest
    weight onto the n-th eigenvector of a, attaining the kinematical
    bound.  The residual diagonal phases commute with the diagonal
    initial ensemble, so the mod-phase factorization implements the
    objective exactly.
    """
    a = np.asarray(a, dtype=complex)
    w = np.asarray(_check_weights(w, a.shape[0]))
    lam, psi = hermitian_eigensystem(a)
    bound, sigma = kinematical_bound(a, w)
    n = a.shape[0]
    u1 = np.zeros((n, n), dtype=complex)
    for k in range(n):
        u1[:, sigma[k]] = psi[:, k]
    fact = decompose_mod_phase(u1)
    predicted = u1 @ np.diag(w.astype(complex)) @ u1.conj().T
    return SchemeResult(
        factorization=fact,
        predicted_state=predicted,
        predicted_objective=bound,
        notes={
            "kind": "maximize",
            "weights": tuple(w),
            "observable": a,
            "bound": bound,
            "sigma": sigma,
            "eigenvalues": tuple(float(x) for x in lam),
        },
    )


def phase_sensitivity_probe(scheme: SchemeResult, pulse_index: int, new_phase: float) -> float:
    """Objective achieved after overriding one pulse phase.

    Re-simulates the factor product with factors[pulse_index] set to
    new_phase.  The objective is the observable average when the scheme
    carries an observable, otherwise the final population of level N.
    """
    fact = scheme.factorization
    if not 0 <= pulse_index < len(fact.factors):
        raise IndexError(f"pulse index {pulse_index} out of range")
    factors = list(fact.factors)
    factors[pulse_index] = replace(factors[pulse_index], phase=float(new_phase))
    altered = Factorization(
        n=fact.n, mode=fact.mode, factors=tuple(factors), residual=fact.residual
    )
    u = factor_product(altered)
    weights = scheme.notes.get("weights")
    if weights is None:
        rho0 = np.zeros((fact.n, fact.n), dtype=complex)
        rho0[0, 0] = 1.0
    else:
        rho0 = np.diag(np.asarray(weights, dtype=complex))
    rho_f = u @ rho0 @ u.conj().T
    a = scheme.notes.get("observable")
    if a is not None:
        return float(np.real(np.trace(np.asarray(a) @ rho_f)))
    return float(np.real(rho_f[fact.n - 1, fact.n - 1]))
