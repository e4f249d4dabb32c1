"""Linearized fluctuation dynamics: complex and quadrature drift matrices,
diffusion matrix, and linear stability assessment.

Two equivalent representations of the same linear flow are built:

* ``complex_matrix`` acts on (da, da+, db1, db1+, db2, db2+),
* ``drift_matrix`` acts on the quadratures (x, y, q1, p1, q2, p2) with
  x = (a+ + a)/sqrt(2), y = i (a+ - a)/sqrt(2) and likewise (q_j, p_j).

The quadrature form is obtained by the basis change, not transcribed from a
block table, so the two spectra must agree to round-off; this is enforced as
a test invariant and makes transcription errors detectable.

Stability is judged spectrally (all eigenvalue real parts below the margin).
A Routh-Hurwitz determinant test on the characteristic polynomial, computed
by the Faddeev-LeVerrier recursion so that it stays independent of any
eigendecomposition, is provided as a cross-check route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GaugeError, NumericalError, PreconditionError
from .model import MeanFields, SystemParams, RESIDUAL_TOL

__all__ = [
    "LinearModel",
    "StabilityReport",
    "complex_matrix",
    "drift_matrix",
    "noise_matrix",
    "linear_model",
    "assess_stability",
    "characteristic_polynomial",
    "hurwitz_minors",
    "hurwitz_stable",
    "save_matrix_csv",
]

# means are accepted as converged within 10x of the solver contract
_CONVERGED_SLACK = 10.0


def _check_converged(means: MeanFields) -> None:
    bound = _CONVERGED_SLACK * RESIDUAL_TOL * max(1.0, abs(means.alpha))
    if not np.isfinite(means.residual) or means.residual > bound:
        raise PreconditionError(
            f"mean fields not converged: residual {means.residual:.3e} > {bound:.3e}"
        )


def _real_coupling(means: MeanFields) -> float:
    g = complex(means.g_eff)
    if abs(g.imag) > 1e-9 * max(1.0, abs(g)):
        raise GaugeError(f"effective coupling has residual phase: {g!r}")
    if abs(means.alpha.imag) > 1e-9 * max(1.0, abs(means.alpha)):
        raise GaugeError(f"cavity amplitude not gauged real: {means.alpha!r}")
    return g.real


@dataclass(frozen=True)
class LinearModel:
    """Fluctuation dynamics in both bases plus the diffusion matrix."""

    a_complex: np.ndarray  # 6x6 complex, ladder-operator basis
    m_drift: np.ndarray    # 6x6 real, quadrature basis
    d_noise: np.ndarray    # 6x6 real diagonal


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_part: float
    eigenvalues: np.ndarray  # the six eigenvalues of the drift matrix
    margin: float = 0.0


def complex_matrix(params: SystemParams, means: MeanFields) -> np.ndarray:
    """Coefficient matrix of the fluctuations in the ladder-operator basis
    (da, da+, db1, db1+, db2, db2+)."""
    _check_converged(means)
    p = params
    g = _real_coupling(means)
    dt = means.delta_eff
    lam = means.lambda_nl
    hop = 1j * p.jm * np.exp(1j * p.theta)     # multiplies b2 in the b1 row

    a = np.zeros((6, 6), dtype=complex)
    # cavity rows
    a[0, 0] = 1j * dt - 0.5 * p.kappa
    a[1, 1] = -1j * dt - 0.5 * p.kappa
    a[0, 2] = a[0, 3] = a[0, 4] = a[0, 5] = 1j * g
    a[1, 2] = a[1, 3] = a[1, 4] = a[1, 5] = -1j * g
    # resonator 1 rows (Duffing shift on the diagonal, squeezing-like off term)
    a[2, 2] = -(0.5 * p.gamma1 + 1j * (p.omega1 + lam))
    a[2, 3] = -1j * lam
    a[3, 2] = 1j * lam
    a[3, 3] = -(0.5 * p.gamma1 - 1j * (p.omega1 + lam))
    a[2, 0] = a[2, 1] = 1j * g
    a[3, 0] = a[3, 1] = -1j * g
    a[2, 4] = -hop
    a[3, 5] = np.conj(-hop)
    # resonator 2 rows
    a[4, 4] = -(0.5 * p.gamma2 + 1j * p.omega2)
    a[5, 5] = -(0.5 * p.gamma2 - 1j * p.omega2)
    a[4, 0] = a[4, 1] = 1j * g
    a[5, 0] = a[5, 1] = -1j * g
    a[4, 2] = np.conj(hop)
    a[5, 3] = hop
    return a


def drift_matrix(params: SystemParams, means: MeanFields) -> np.ndarray:
    """Drift matrix of the quadrature fluctuations (x, y, q1, p1, q2, p2).

    Built from the ladder-basis dynamics via the quadrature transform with a
    real effective coupling; raises :class:`GaugeError` when the coupling
    carries residual phase.
    """
    _check_converged(means)
    p = params
    g2 = 2.0 * _real_coupling(means)
    dt = means.delta_eff
    lam = means.lambda_nl
    js, jc = p.jm * np.sin(p.theta), p.jm * np.cos(p.theta)

    m = np.zeros((6, 6))
    # cavity
    m[0, 0] = m[1, 1] = -0.5 * p.kappa
    m[0, 1] = -dt
    m[1, 0] = dt
    m[1, 2] = m[1, 4] = g2
    # resonator 1
    m[2, 2] = m[3, 3] = -0.5 * p.gamma1
    m[2, 3] = p.omega1
    m[3, 2] = -(p.omega1 + 2.0 * lam)
    m[3, 0] = g2
    # resonator 2
    m[4, 4] = m[5, 5] = -0.5 * p.gamma2
    m[4, 5] = p.omega2
    m[5, 4] = -p.omega2
    m[5, 0] = g2
    # phonon hopping: block from resonator 2 into 1, and its negative
    # transpose in the reverse direction
    m[2, 4] = js
    m[2, 5] = jc
    m[3, 4] = -jc
    m[3, 5] = js
    m[4, 2] = -js
    m[4, 3] = jc
    m[5, 2] = -jc
    m[5, 3] = -js
    return m


def noise_matrix(params: SystemParams) -> np.ndarray:
    """Diagonal diffusion matrix: vacuum input on the cavity quadratures and
    thermally scaled dissipation on each resonator."""
    p = params
    return np.diag([
        0.5 * p.kappa,
        0.5 * p.kappa,
        0.5 * p.gamma1 * (2.0 * p.nth1 + 1.0),
        0.5 * p.gamma1 * (2.0 * p.nth1 + 1.0),
        0.5 * p.gamma2 * (2.0 * p.nth2 + 1.0),
        0.5 * p.gamma2 * (2.0 * p.nth2 + 1.0),
    ])


def linear_model(params: SystemParams, means: MeanFields) -> LinearModel:
    return LinearModel(
        a_complex=complex_matrix(params, means),
        m_drift=drift_matrix(params, means),
        d_noise=noise_matrix(params),
    )


def assess_stability(m_drift: np.ndarray, margin: float = 0.0) -> StabilityReport:
    """Spectral stability verdict: stable iff every eigenvalue real part is
    below ``-margin``."""
    m = np.asarray(m_drift, dtype=float)
    if not np.all(np.isfinite(m)):
        raise PreconditionError("drift matrix has non-finite entries")
    try:
        eigs = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    max_real = float(np.max(eigs.real))
    return StabilityReport(
        stable=bool(max_real < -margin),
        max_real_part=max_real,
        eigenvalues=eigs,
        margin=float(margin),
    )


def characteristic_polynomial(m: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients (monic, descending powers) via
    the Faddeev-LeVerrier recursion; independent of eigendecomposition."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    work = np.zeros_like(m)
    eye = np.eye(n)
    for k in range(1, n + 1):
        work = m @ (work + coeffs[k - 1] * eye)
        coeffs[k] = -np.trace(work) / k
    return coeffs


def hurwitz_minors(coeffs: np.ndarray) -> np.ndarray:
    """Leading principal minors of the Hurwitz matrix of a monic polynomial."""
    c = np.asarray(coeffs, dtype=float)
    n = c.size - 1
    h = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            k = 2 * (j + 1) - (i + 1)
            if 0 <= k <= n:
                h[i, j] = c[k]
    return np.array([np.linalg.det(h[: k + 1, : k + 1]) for k in range(n)])


def hurwitz_stable(m: np.ndarray) -> bool:
    """Routh-Hurwitz verdict on the drift matrix (cross-check route)."""
    coeffs = characteristic_polynomial(m)
    if np.any(coeffs <= 0.0):
        # a Hurwitz polynomial with positive leading coefficient has all
        # coefficients positive
        return False
    return bool(np.all(hurwitz_minors(coeffs) > 0.0))


def save_matrix_csv(matrix: np.ndarray, path: str) -> None:
    """Row-major CSV dump in full-precision scientific notation.

    Complex entries are written as Python complex literals (``re+imj``)."""
    mat = np.asarray(matrix)
    with open(path, "w", encoding="utf-8") as fh:
        for row in mat:
            if np.iscomplexobj(mat):
                cells = [f"{z.real:.17e}{z.imag:+.17e}j" for z in row]
            else:
                cells = [f"{v:.17e}" for v in row]
            fh.write(",".join(cells) + "\n")
