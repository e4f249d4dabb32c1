"""Stationary Gaussian state of the fluctuations and its entanglement.

The steady-state covariance matrix V (V_ij = <u_i u_j + u_j u_i>/2, vacuum
variance 1/2) solves the Lyapunov equation M V + V M^T = -D.  Bipartite
entanglement between any two of the three modes is quantified by the
logarithmic negativity

    E_N = max[0, -ln(2 nu_minus)],
    nu_minus = sqrt( (S - sqrt(S^2 - 4 det V4)) / 2 ),
    S = det A + det B - 2 det C,

where A, B, C are the 2x2 blocks of the reduced 4x4 covariance V4.  With the
minus sign on det C this combination already encodes the partial transpose,
so nu_minus is the smallest symplectic eigenvalue of the partially
transposed two-mode state; in the entangled regime of this model det C < 0.
Tests verify E_N against the i*Omega*V eigenvalue route on every test point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg as sla

from .errors import NumericalError, PreconditionError, UnstableSystemError
from .dynamics import assess_stability, complex_matrix
from .model import MeanFields, SystemParams

__all__ = [
    "CovarianceMatrix",
    "BipartiteBlock",
    "Bipartition",
    "DarkModeCoupling",
    "solve_lyapunov",
    "reduce_bipartite",
    "log_negativity",
    "nu_minus",
    "symplectic_eigenvalues",
    "dark_mode_coupling",
    "symplectic_form",
]

# tolerated round-off when clamping small negative discriminants / variances
_CLAMP = 1e-12


class Bipartition(Enum):
    """Mode pair selector; values are the CLI/CSV tokens."""

    CAVITY_MECH1 = "cav-m1"
    CAVITY_MECH2 = "cav-m2"
    MECH1_MECH2 = "m1-m2"

    @property
    def indices(self) -> tuple[int, int, int, int]:
        return {
            Bipartition.CAVITY_MECH1: (0, 1, 2, 3),
            Bipartition.CAVITY_MECH2: (0, 1, 4, 5),
            Bipartition.MECH1_MECH2: (2, 3, 4, 5),
        }[self]

    @classmethod
    def from_token(cls, token: str) -> "Bipartition":
        for member in cls:
            if member.value == token:
                return member
        raise ValueError(f"unknown mode pair {token!r}; expected one of "
                         f"{', '.join(m.value for m in cls)}")


@dataclass(frozen=True)
class CovarianceMatrix:
    """Steady-state 6x6 covariance with the Lyapunov residual that produced it."""

    v: np.ndarray
    residual: float  # max-norm of M V + V M^T + D


@dataclass(frozen=True)
class BipartiteBlock:
    """Reduced two-mode covariance in 2x2 block form."""

    a_block: np.ndarray
    b_block: np.ndarray
    c_block: np.ndarray
    v4: np.ndarray
    pair: Bipartition


def symplectic_form(n_modes: int) -> np.ndarray:
    """Direct sum of n_modes copies of [[0, 1], [-1, 0]]."""
    omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = omega1
    return out


def solve_lyapunov(
    m_drift: np.ndarray,
    d_noise: np.ndarray,
    method: str = "direct",
) -> CovarianceMatrix:
    """Solve M V + V M^T = -D for the stationary covariance.

    ``method="direct"`` solves the vectorized 36x36 linear system (the size
    is tiny, so correctness beats speed); ``method="schur"`` delegates to the
    Bartels-Stewart solver in scipy.  Raises
    :class:`UnstableSystemError` when M is not strictly stable.
    """
    m = np.asarray(m_drift, dtype=float)
    d = np.asarray(d_noise, dtype=float)
    if m.shape != d.shape or m.shape[0] != m.shape[1]:
        raise PreconditionError("drift and noise matrices must be square and congruent")
    report = assess_stability(m)
    if not report.stable:
        raise UnstableSystemError(
            f"drift matrix is not strictly stable (max Re = {report.max_real_part:.3e})"
        )
    n = m.shape[0]
    if method == "direct":
        eye = np.eye(n)
        coef = np.kron(eye, m) + np.kron(m, eye)
        try:
            v = np.linalg.solve(coef, -d.reshape(-1)).reshape(n, n)
        except np.linalg.LinAlgError as exc:
            cond = np.linalg.cond(coef)
            raise NumericalError(
                f"vectorized Lyapunov solve failed (cond ~ {cond:.3e}): {exc}"
            ) from exc
    elif method == "schur":
        v = sla.solve_continuous_lyapunov(m, -d)
    else:
        raise ValueError(f"unknown method {method!r}")
    v = 0.5 * (v + v.T)
    residual = float(np.max(np.abs(m @ v + v @ m.T + d)))
    d_scale = float(np.max(np.abs(d)))
    if not residual <= 1e-10 * max(d_scale, np.finfo(float).tiny):
        raise NumericalError(
            f"Lyapunov residual {residual:.3e} exceeds 1e-10 * ||D||_max"
        )
    return CovarianceMatrix(v=v, residual=residual)


def reduce_bipartite(v: CovarianceMatrix | np.ndarray, pair: Bipartition) -> BipartiteBlock:
    """Principal 4x4 sub-matrix of V on the selected mode pair."""
    full = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    if not isinstance(pair, Bipartition):
        raise ValueError(f"invalid bipartition selector: {pair!r}")
    idx = np.array(pair.indices)
    v4 = full[np.ix_(idx, idx)]
    return BipartiteBlock(
        a_block=v4[:2, :2].copy(),
        b_block=v4[2:, 2:].copy(),
        c_block=v4[:2, 2:].copy(),
        v4=v4,
        pair=pair,
    )


def nu_minus(block: BipartiteBlock) -> float:
    """Smallest symplectic eigenvalue of the partially transposed two-mode
    state, from the block-determinant form."""
    det_a = float(np.linalg.det(block.a_block))
    det_b = float(np.linalg.det(block.b_block))
    det_c = float(np.linalg.det(block.c_block))
    det_v = float(np.linalg.det(block.v4))
    sigma = det_a + det_b - 2.0 * det_c
    disc = sigma * sigma - 4.0 * det_v
    if disc < 0.0:
        if disc < -_CLAMP:
            raise NumericalError(f"negative discriminant {disc:.3e} in nu_minus")
        disc = 0.0
    inner = sigma - math.sqrt(disc)
    if inner < 0.0:
        if inner < -_CLAMP:
            raise NumericalError(f"negative radicand {inner:.3e} in nu_minus")
        inner = 0.0
    return math.sqrt(0.5 * inner)


def log_negativity(block: BipartiteBlock) -> float:
    """Logarithmic negativity of the two-mode reduction; exactly zero when
    the partially transposed state is physical (nu_minus >= 1/2)."""
    nu = nu_minus(block)
    if 2.0 * nu >= 1.0:
        return 0.0
    return -math.log(2.0 * nu)


def symplectic_eigenvalues(v: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a 2n x 2n covariance matrix, one value per
    mode, sorted ascending (moduli of the eigenvalues of i Omega V)."""
    mat = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    n2 = mat.shape[0]
    if mat.shape != (n2, n2) or n2 % 2:
        raise PreconditionError("covariance must be square with even dimension")
    if np.max(np.abs(mat - mat.T)) > 1e-12 * max(1.0, np.max(np.abs(mat))):
        raise PreconditionError("covariance must be symmetric")
    omega = symplectic_form(n2 // 2)
    try:
        eigs = np.linalg.eigvals(1j * omega @ mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symplectic eigenvalue computation failed: {exc}") from exc
    moduli = np.sort(np.abs(eigs))
    # eigenvalues come in +/- pairs; keep one representative per mode
    return moduli[::2].copy()


@dataclass(frozen=True)
class DarkModeCoupling:
    """Coupling magnitudes after rotating the mechanical sector into the
    bright/dark superpositions B, D = (db1 -+ db2)/sqrt(2).

    ``cavity_bright``/``cavity_dark``: largest |entry| connecting the cavity
    to the respective superposition; ``bright_dark``: largest |entry| mixing
    the two superpositions.  The dark mode is decoupled exactly when both its
    numbers vanish.
    """

    cavity_bright: float
    cavity_dark: float
    bright_dark: float

    @property
    def dark_decoupled(self) -> bool:
        scale = max(1.0, self.cavity_bright)
        return (self.cavity_dark + self.bright_dark) <= 1e-12 * scale


def dark_mode_coupling(params: SystemParams, means: MeanFields) -> DarkModeCoupling:
    """Transform the mechanical sector of the fluctuation matrix into the
    bright/dark basis and report the coupling magnitudes."""
    a = complex_matrix(params, means)
    s = 1.0 / math.sqrt(2.0)
    u = np.zeros((6, 6))
    u[0, 0] = u[1, 1] = 1.0
    u[2, 2] = u[2, 4] = s       # B   = (b1  + b2 )/sqrt(2)
    u[3, 3] = u[3, 5] = s       # B+  = (b1+ + b2+)/sqrt(2)
    u[4, 2] = s                 # D   = (b1  - b2 )/sqrt(2)
    u[4, 4] = -s
    u[5, 3] = s                 # D+
    u[5, 5] = -s
    a_bd = u @ a @ u.T          # u is orthogonal
    cav = slice(0, 2)
    bright = slice(2, 4)
    dark = slice(4, 6)

    def block_max(rows: slice, cols: slice) -> float:
        return float(max(np.max(np.abs(a_bd[rows, cols])),
                         np.max(np.abs(a_bd[cols, rows]))))

    return DarkModeCoupling(
        cavity_bright=block_max(cav, bright),
        cavity_dark=block_max(cav, dark),
        bright_dark=block_max(bright, dark),
    )
