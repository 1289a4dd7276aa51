"""Dense complex-matrix kernel for ladder-system control.

Rotation-factor matrices in closed form, Gram-Schmidt completion of a
target column to a unitary, deterministic Hermitian eigensystems, and
unitarity diagnostics.  Everything here is pure and side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RotationFactor",
    "DiagonalPhases",
    "wrap_angle",
    "factor_matrix",
    "gram_schmidt_extend",
    "hermitian_eigensystem",
    "unitarity_defect",
    "matrix_to_json",
    "matrix_from_json",
]


def wrap_angle(x):
    """Wrap an angle (or array of angles) into (-pi, pi]."""
    return np.angle(np.exp(1j * np.asarray(x)))


@dataclass(frozen=True)
class RotationFactor:
    """One elementary rotation on an adjacent transition.

    A resonant pulse of effective area 2C and initial phase phi on
    transition m realizes exp[C(x_m sin(phi) - y_m cos(phi))], which mixes
    levels m and m+1 only.  `angle` is C, `phase` is phi; phases are
    stored wrapped to (-pi, pi].
    """

    transition: int
    angle: float
    phase: float

    def __post_init__(self):
        if self.transition < 1:
            raise ValueError(f"transition index must be >= 1, got {self.transition}")
        if not math.isfinite(self.angle) or abs(self.angle) > math.pi + 1e-9:
            raise ValueError(f"rotation angle must lie in [-pi, pi], got {self.angle}")
        object.__setattr__(self, "phase", float(wrap_angle(self.phase)))


@dataclass(frozen=True)
class DiagonalPhases:
    """Residual diagonal phase matrix diag(e^{i theta_n}) plus global phase."""

    thetas: tuple
    global_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in wrap_angle(list(self.thetas))))

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * np.asarray(self.thetas)))


def factor_matrix(n: int, f: RotationFactor) -> np.ndarray:
    """Closed-form matrix of a rotation factor in an n-level system.

    Identity except the 2x2 block at levels (m, m+1):
        [[cos C, -i e^{i phi} sin C], [-i e^{-i phi} sin C, cos C]].
    Unitary with determinant 1 for any (C, phi).
    """
    m = f.transition
    if not 1 <= m <= n - 1:
        raise ValueError(f"transition {m} out of range for {n} levels")
    v = np.eye(n, dtype=complex)
    c, s = np.cos(f.angle), np.sin(f.angle)
    v[m - 1, m - 1] = v[m, m] = c
    v[m - 1, m] = -1j * np.exp(1j * f.phase) * s
    v[m, m - 1] = -1j * np.exp(-1j * f.phase) * s
    return v


def gram_schmidt_extend(first_column) -> np.ndarray:
    """Complete a unit vector to a unitary matrix with it as first column.

    The remaining columns come from Gram-Schmidt on the standard basis
    vectors e_2, ..., e_N (e_1 held in reserve for rank deficiencies),
    which makes the result deterministic.
    """
    c0 = np.asarray(first_column, dtype=complex).ravel()
    n = c0.size
    if abs(np.linalg.norm(c0) - 1.0) > 1e-9:
        raise ValueError("first column must be a unit vector")
    cols = [c0]
    candidates = [np.eye(n, dtype=complex)[:, k] for k in list(range(1, n)) + [0]]
    for cand in candidates:
        if len(cols) == n:
            break
        v = cand.copy()
        for _ in range(2):  # twice for orthogonality at machine precision
            for c in cols:
                v -= np.vdot(c, v) * c
        nv = np.linalg.norm(v)
        if nv < 1e-8:  # candidate already spanned, try the next one
            continue
        cols.append(v / nv)
    return np.column_stack(cols)


def hermitian_eigensystem(a) -> tuple:
    """Eigenvalues (descending) and phase-fixed eigenvectors of a Hermitian matrix.

    Each eigenvector is rotated so its first nonzero component is real
    and positive, which makes the output deterministic.

    Returns:
        (eigenvalues, eigenvector matrix) with a @ v[:, k] = lam[k] * v[:, k].
    """
    a = np.asarray(a, dtype=complex)
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > 1e-10 * max(scale, 1e-300):
        raise ValueError("matrix is not Hermitian")
    lam, vec = np.linalg.eigh((a + a.conj().T) / 2.0)
    order = np.argsort(-lam, kind="stable")
    lam, vec = lam[order], vec[:, order]
    for k in range(vec.shape[1]):
        nz = np.flatnonzero(np.abs(vec[:, k]) > 1e-12)
        if nz.size:
            ph = vec[nz[0], k]
            vec[:, k] *= np.conj(ph) / abs(ph)
    return lam, vec


def unitarity_defect(m) -> float:
    """Frobenius norm of M^dag M - I."""
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"n": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(doc: dict) -> np.ndarray:
    n = int(doc["n"])
    m = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    if m.shape != (n, n):
        raise ValueError(f"matrix shape {m.shape} does not match declared n={n}")
    return m
