"""Factorization of unitaries into adjacent-transition rotation factors.

Any U in U(N) factors as e^{i Gamma/N} V_K ... V_1 Theta where each V_k
acts on one adjacent transition and Theta is a diagonal phase matrix.
Mod-phase mode stops there (sufficient for diagonal initial ensembles);
exact mode spends up to 2(N-1) extra factors to clear Theta as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DiagonalPhases,
    RotationFactor,
    factor_matrix,
    unitarity_defect,
    wrap_angle,
)

__all__ = [
    "Factorization",
    "elimination_step",
    "decompose_mod_phase",
    "eliminate_phases",
    "reconstruct",
    "factor_product",
    "factorization_to_json",
    "factorization_from_json",
]

ANGLE_EPS = 1e-12   # rotations smaller than this are elided
_UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class Factorization:
    """Ordered rotation factors plus residual phases.

    factors[0] is applied first (the product reads V_K ... V_1 right to
    left).  mode is "mod-phase" or "exact".
    """

    n: int
    mode: str
    factors: tuple
    residual: DiagonalPhases

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.mode not in ("mod-phase", "exact"):
            raise ValueError(f"unknown factorization mode {self.mode!r}")
        if len(self.residual.thetas) != self.n:
            raise ValueError("residual phase count must equal the dimension")
        k = self.n * (self.n - 1) // 2
        bound = k if self.mode == "mod-phase" else k + 2 * (self.n - 1)
        if len(self.factors) > bound:
            raise ValueError(f"{len(self.factors)} factors exceeds the {bound} bound")


def elimination_step(top: complex, below: complex, transition: int = 1):
    """Rotation that zeroes `top` against `below` in one column.

    Returns the factor (C, phi) whose inverse block maps (top, below) to
    (0, c) with |c| = sqrt(|top|^2 + |below|^2); C = atan2(r1, r2) lies in
    [0, pi/2].  Returns None when both entries vanish (nothing to do).
    """
    r1, r2 = abs(top), abs(below)
    if r1 < ANGLE_EPS and r2 < ANGLE_EPS:
        return None
    c = math.atan2(r1, r2)
    phi = wrap_angle(math.pi / 2 + np.angle(top) - np.angle(below))
    return RotationFactor(transition, c, float(phi))


def decompose_mod_phase(u) -> Factorization:
    """Reduce a unitary to rotation factors times diagonal phases.

    Works down the columns from N to 2, zeroing each column top-down with
    rotations on transitions 1..j-1; entries that already vanish cost no
    factor.  The factor count is at most N(N-1)/2.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n):
        raise ValueError("input must be square")
    if unitarity_defect(u) > _UNITARY_TOL:
        raise ValueError("input matrix is not unitary")
    gamma = float(np.angle(np.linalg.det(u)))
    m = u * np.exp(-1j * gamma / n)
    elim = []
    for j in range(n, 1, -1):
        for i in range(1, j):
            top, below = m[i - 1, j - 1], m[i, j - 1]
            if abs(top) < ANGLE_EPS:
                continue
            f = elimination_step(top, below, transition=i)
            w = factor_matrix(n, f).conj().T
            m = w @ m
            elim.append(f)
    thetas = np.angle(np.diag(m))
    return Factorization(
        n=n,
        mode="mod-phase",
        factors=tuple(reversed(elim)),
        residual=DiagonalPhases(tuple(thetas), gamma),
    )


def eliminate_phases(f: Factorization, n: int = None) -> Factorization:
    """Clear the residual diagonal phases with two extra factors per level.

    For each level n with theta_n != 0 (swept top level first), the pair
    (C = pi/2, phi = pi/2) then (C = pi/2, phi = -pi/2 - theta_n) on
    transition n-1 realizes diag(e^{-i theta_n}, e^{i theta_n}) on levels
    (n-1, n), so theta_n folds into theta_{n-1}.  The residual phases sum
    to a multiple of 2 pi once the global phase has been split off, so
    the sweep ends with every one cleared.
    """
    if n is None:
        n = f.n
    if n != f.n:
        raise ValueError("dimension does not match the factorization")
    if f.mode == "exact":
        return f
    cur = list(f.residual.thetas)
    pairs = {}
    for lvl in range(n, 1, -1):
        t = cur[lvl - 1]
        if abs(t) > 1e-15:
            pairs[lvl] = (
                RotationFactor(lvl - 1, math.pi / 2, math.pi / 2),
                RotationFactor(lvl - 1, math.pi / 2, float(wrap_angle(-math.pi / 2 - t))),
            )
        cur[lvl - 2] += t
        cur[lvl - 1] = 0.0
    prefix = []
    for lvl in range(2, n + 1):
        prefix.extend(pairs.get(lvl, ()))
    return Factorization(
        n=n,
        mode="exact",
        factors=tuple(prefix) + f.factors,
        residual=DiagonalPhases((0.0,) * n, f.residual.global_phase),
    )


def reconstruct(f: Factorization, n: int = None) -> np.ndarray:
    """Multiply the factorization back out: e^{i Gamma/N} V_K ... V_1 Theta."""
    if n is None:
        n = f.n
    if n != f.n:
        raise ValueError("dimension does not match the factorization")
    m = f.residual.matrix()
    for fac in f.factors:
        if fac.transition > n - 1:
            raise ValueError(f"transition {fac.transition} exceeds {n - 1}")
        m = factor_matrix(n, fac) @ m
    return m * np.exp(1j * f.residual.global_phase / n)


def factor_product(f: Factorization, n: int = None) -> np.ndarray:
    """Product V_K ... V_1 of the factors alone.

    This is the operator a pulse schedule realizes: residual phases and
    the global phase are not driven by any pulse.
    """
    if n is None:
        n = f.n
    m = np.eye(n, dtype=complex)
    for fac in f.factors:
        m = factor_matrix(n, fac) @ m
    return m


def factorization_to_json(f: Factorization) -> dict:
    return {
        "n": f.n,
        "mode": f.mode,
        "factors": [
            {"transition": fac.transition, "angle_rad": fac.angle, "phase_rad": fac.phase}
            for fac in f.factors
        ],
        "thetas_rad": list(f.residual.thetas),
        "gamma_rad": f.residual.global_phase,
    }


def factorization_from_json(doc: dict) -> Factorization:
    return Factorization(
        n=int(doc["n"]),
        mode=doc["mode"],
        factors=tuple(
            RotationFactor(int(d["transition"]), float(d["angle_rad"]), float(d["phase_rad"]))
            for d in doc["factors"]
        ),
        residual=DiagonalPhases(tuple(doc["thetas_rad"]), float(doc.get("gamma_rad", 0.0))),
    )
