"""System parameters and the nonlinear mean-field steady state.

All rates and frequencies are expressed in units of the reference mechanical
frequency omega_m (= 1 internally); the driving amplitude ``alpha_in`` carries
units of omega_m^(1/2).  The model is a single driven cavity mode coupled to
two mechanical resonators that exchange phonons through a phase-modulated
hopping term; the first resonator additionally carries a quartic (Duffing)
potential.

``delta`` is the detuning of the *operating point*, i.e. the effective
detuning of the linearized dynamics, following the usual convention of
linearized optomechanics: the static radiation-pressure displacement shifts
the cavity resonance, and operating points are specified by the detuning
that includes this shift.  (Feeding the static shift back into the cavity
equation instead makes the red-detuned branch fold well below the driving
strengths of interest; the published operating points live on the effective-
detuning parametrization.)  The implied bare pump-cavity detuning
``delta - 2 g (Re beta1 + Re beta2)`` is reported as a diagnostic.

The mean amplitudes (alpha, beta1, beta2) then solve

    0 = (i*delta - kappa/2) * alpha + sqrt(kappa) * alpha_in
    0 = -(gamma1/2 + i*omega1) * beta1 - i*jm*exp(+i*theta) * beta2
        + i*g*|alpha|^2 - 2i*eta*(beta1 + conj(beta1))^3
    0 = -(gamma2/2 + i*omega2) * beta2 - i*jm*exp(-i*theta) * beta1
        + i*g*|alpha|^2.

The cubic term admits several roots; we track the branch continuously
connected to the linear (eta = 0) solution by ramping eta geometrically and
re-solving with a damped Newton iteration at each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, asdict

import numpy as np
from scipy import constants

from .errors import ConfigError, ConvergenceError, DivergenceError

__all__ = [
    "SystemParams",
    "MeanFields",
    "PARAM_FIELDS",
    "thermal_occupancy",
    "steady_state",
    "mean_field_residual",
    "RESIDUAL_TOL",
]

# Absolute residual target (units of omega_m); the converged contract is
# max-norm(residual) <= RESIDUAL_TOL * max(1, |alpha|).
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the three-mode model, in units of omega_m.

    Defaults are the baseline operating point used throughout: degenerate
    resonators (omega = 1) with weak damping, red-detuned drive and a
    synthetic phase of pi/2 on the phonon hopping.
    """

    omega1: float = 1.0        # mechanical frequency, resonator 1
    omega2: float = 1.0        # mechanical frequency, resonator 2
    gamma1: float = 1e-5       # mechanical damping, resonator 1
    gamma2: float = 1e-5       # mechanical damping, resonator 2
    kappa: float = 0.2         # cavity decay rate
    delta: float = -1.0        # operating-point (effective) detuning
    g: float = 5e-4            # single-photon optomechanical coupling
    jm: float = 1e-2           # phonon hopping rate
    theta: float = math.pi / 2  # synthetic-magnetism phase [rad]
    eta: float = 0.0           # Duffing amplitude (may be negative)
    alpha_in: float = 0.0      # driving amplitude [omega_m^(1/2)]
    nth1: float = 0.0          # thermal phonon occupancy, resonator 1
    nth2: float = 0.0          # thermal phonon occupancy, resonator 2

    def __post_init__(self) -> None:
        for name in ("omega1", "omega2", "gamma1", "gamma2", "kappa"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be strictly positive")
        for name in ("g", "jm", "alpha_in", "nth1", "nth2"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be nonnegative")
        for name in PARAM_FIELDS:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite")

    def replace(self, **changes: float) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, float]) -> "SystemParams":
        unknown = set(data) - set(PARAM_FIELDS)
        if unknown:
            raise ConfigError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        return cls(**{k: float(v) for k, v in data.items()})


PARAM_FIELDS: tuple[str, ...] = tuple(SystemParams.__dataclass_fields__)


@dataclass(frozen=True)
class MeanFields:
    """Converged mean amplitudes and the derived linearization inputs.

    ``alpha`` is real nonnegative by convention: the solver rotates the
    global phase (equivalently, the phase of the noise-free input) so that
    the cavity amplitude comes out real, and stores the compensating input
    rotation in ``input_phase``.  The effective coupling ``g_eff = g*alpha``
    is then real as well.  All downstream observables are invariant under
    this gauge choice.
    """

    alpha: complex
    beta1: complex
    beta2: complex
    delta_eff: float     # detuning entering the linearized dynamics
    g_eff: float         # g * alpha, real in the rotated frame
    lambda_nl: float     # 24 eta (Re beta1)^2
    residual: float      # max-norm of the fixed-point residual
    input_phase: float   # phase rotation applied to the drive [rad]
    delta_bare: float = 0.0  # implied pump-cavity detuning (diagnostic)


def thermal_occupancy(omega: float, temperature: float) -> float:
    """Bose-Einstein phonon occupancy for angular frequency ``omega`` [rad/s]
    at ``temperature`` [K]; returns 0 at zero temperature.
    """
    if not omega > 0.0:
        raise ValueError("omega must be strictly positive")
    if temperature < 0.0:
        raise ValueError("temperature must be nonnegative")
    if temperature == 0.0:
        return 0.0
    x = constants.hbar * omega / (constants.k * temperature)
    return 1.0 / math.expm1(x)


def mean_field_residual(
    params: SystemParams,
    alpha: complex,
    beta1: complex,
    beta2: complex,
    input_phase: float = 0.0,
) -> np.ndarray:
    """Time derivatives of the mean amplitudes at the given point.

    Returns the complex 3-vector (d alpha/dt, d beta1/dt, d beta2/dt); a
    fixed point drives all three to zero.  ``input_phase`` rotates the drive
    term, matching the gauge stored on a converged :class:`MeanFields`.
    """
    p = params
    drive = math.sqrt(p.kappa) * p.alpha_in * np.exp(1j * input_phase)
    f_a = (1j * p.delta - 0.5 * p.kappa) * alpha + drive
    pump = 1j * p.g * abs(alpha) ** 2
    f_1 = (
        -(0.5 * p.gamma1 + 1j * p.omega1) * beta1
        - 1j * p.jm * np.exp(1j * p.theta) * beta2
        + pump
        - 2j * p.eta * (2.0 * beta1.real) ** 3
    )
    f_2 = (
        -(0.5 * p.gamma2 + 1j * p.omega2) * beta2
        - 1j * p.jm * np.exp(-1j * p.theta) * beta1
        + pump
    )
    return np.array([f_a, f_1, f_2])


def _residual_and_jacobian(p: SystemParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real 6-vector residual and its analytic 6x6 Jacobian.

    Unknowns x = (Re a, Im a, Re b1, Im b1, Re b2, Im b2).
    """
    ar, ai, b1r, b1i, b2r, b2i = x
    st, ct = math.sin(p.theta), math.cos(p.theta)
    n = ar * ar + ai * ai
    drive = math.sqrt(p.kappa) * p.alpha_in

    f = np.empty(6)
    f[0] = -0.5 * p.kappa * ar - p.delta * ai + drive
    f[1] = p.delta * ar - 0.5 * p.kappa * ai
    f[2] = -0.5 * p.gamma1 * b1r + p.omega1 * b1i + p.jm * (st * b2r + ct * b2i)
    f[3] = (
        -p.omega1 * b1r
        - 0.5 * p.gamma1 * b1i
        - p.jm * (ct * b2r - st * b2i)
        + p.g * n
        - 16.0 * p.eta * b1r**3
    )
    f[4] = -0.5 * p.gamma2 * b2r + p.omega2 * b2i + p.jm * (ct * b1i - st * b1r)
    f[5] = -p.omega2 * b2r - 0.5 * p.gamma2 * b2i - p.jm * (ct * b1r + st * b1i) + p.g * n

    jac = np.zeros((6, 6))
    jac[0, 0] = -0.5 * p.kappa
    jac[0, 1] = -p.delta
    jac[1, 0] = p.delta
    jac[1, 1] = -0.5 * p.kappa
    # resonator 1
    jac[2, 2] = -0.5 * p.gamma1
    jac[2, 3] = p.omega1
    jac[2, 4] = p.jm * st
    jac[2, 5] = p.jm * ct
    jac[3, 0] = 2.0 * p.g * ar
    jac[3, 1] = 2.0 * p.g * ai
    jac[3, 2] = -p.omega1 - 48.0 * p.eta * b1r**2
    jac[3, 3] = -0.5 * p.gamma1
    jac[3, 4] = -p.jm * ct
    jac[3, 5] = p.jm * st
    # resonator 2
    jac[4, 2] = -p.jm * st
    jac[4, 3] = p.jm * ct
    jac[4, 4] = -0.5 * p.gamma2
    jac[4, 5] = p.omega2
    jac[5, 0] = 2.0 * p.g * ar
    jac[5, 1] = 2.0 * p.g * ai
    jac[5, 2] = -p.jm * ct
    jac[5, 3] = -p.jm * st
    jac[5, 4] = -p.omega2
    jac[5, 5] = -0.5 * p.gamma2
    return f, jac


def _newton(p: SystemParams, x0: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """Damped Newton iteration on the 6 real unknowns."""
    x = x0.copy()
    f, jac = _residual_and_jacobian(p, x)
    norm = np.max(np.abs(f))
    for _ in range(max_iter):
        if not np.all(np.isfinite(f)):
            raise DivergenceError("mean-field iteration produced non-finite values")
        scale = max(1.0, math.hypot(x[0], x[1]))
        if norm <= tol * scale:
            return x
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian: {exc}", norm) from exc
        # backtracking line search on the residual max-norm
        lam = 1.0
        for _ in range(40):
            x_new = x + lam * step
            f_new, jac_new = _residual_and_jacobian(p, x_new)
            norm_new = np.max(np.abs(f_new))
            if np.isfinite(norm_new) and norm_new < norm:
                break
            lam *= 0.5
        else:
            raise ConvergenceError("line search stalled", norm)
        x, f, jac, norm = x_new, f_new, jac_new, norm_new
    scale = max(1.0, math.hypot(x[0], x[1]))
    if norm <= tol * scale:
        return x
    raise ConvergenceError(
        f"no convergence after {max_iter} Newton iterations (residual {norm:.3e})",
        norm,
    )


def _linear_start(p: SystemParams) -> np.ndarray:
    """Starting point: the exact cavity amplitude plus the resonators of the
    eta = 0 linear hopping system driven by |alpha|^2."""
    alpha = math.sqrt(p.kappa) * p.alpha_in / (0.5 * p.kappa - 1j * p.delta)
    pump = 1j * p.g * abs(alpha) ** 2
    d1 = 0.5 * p.gamma1 + 1j * p.omega1
    d2 = 0.5 * p.gamma2 + 1j * p.omega2
    h12 = 1j * p.jm * np.exp(1j * p.theta)
    h21 = 1j * p.jm * np.exp(-1j * p.theta)
    det = d1 * d2 - h12 * h21
    beta1 = pump * (d2 - h12) / det
    beta2 = pump * (d1 - h21) / det
    return np.array([alpha.real, alpha.imag, beta1.real, beta1.imag, beta2.real, beta2.imag])


def steady_state(
    params: SystemParams,
    tol: float = RESIDUAL_TOL,
    max_newton: int = 100,
    max_steps: int = 32,
) -> MeanFields:
    """Solve the mean-field fixed point and return the gauged amplitudes.

    Continuation: the eta = 0 problem is solved first (ramping alpha_in
    geometrically when the cold start fails), then eta is ramped toward its
    target in geometrically refined steps so the returned root is the one
    connected to the linear branch.  Raises :class:`ConvergenceError` once
    the step budget is exhausted and :class:`DivergenceError` if iterates
    leave the finite domain.
    """
    p = params
    if p.alpha_in == 0.0:
        return MeanFields(
            alpha=0j, beta1=0j, beta2=0j,
            delta_eff=p.delta, g_eff=0.0, lambda_nl=0.0,
            residual=0.0, input_phase=0.0, delta_bare=p.delta,
        )

    steps_used = 0

    def solve_at(q: SystemParams, x0: np.ndarray) -> np.ndarray:
        nonlocal steps_used
        if steps_used >= max_steps:
            raise ConvergenceError(f"continuation budget of {max_steps} steps exhausted")
        steps_used += 1
        return _newton(q, x0, tol, max_newton)

    def ramp(make, x: np.ndarray, u0: float) -> np.ndarray:
        """Adaptive geometric continuation of the ramp fraction u -> 1.

        ``make(u)`` builds the parameter set at fraction u; each step
        multiplies u by an adaptive factor and warm-starts Newton from the
        previous solution, shrinking the factor geometrically on failure.
        """
        u, factor = u0, 1.0 / u0
        while u < 1.0:
            u_next = min(1.0, u * factor)
            try:
                x = solve_at(make(u_next), x)
                u = u_next
            except ConvergenceError:
                if steps_used >= max_steps or factor <= 1.0 + 2**-10:
                    raise
                factor = math.sqrt(factor)
        return x

    # phase 1: linear (eta = 0) problem; the cold start is exact for the
    # cavity and usually inside the Newton basin for the resonators
    base = p.replace(eta=0.0)
    try:
        x = solve_at(base, _linear_start(base))
    except ConvergenceError:
        u0 = 2.0**-6
        q0 = base.replace(alpha_in=p.alpha_in * u0)
        x = solve_at(q0, _linear_start(q0))
        x = ramp(lambda u: base.replace(alpha_in=p.alpha_in * u), x, u0)

    # phase 2: geometric continuation in eta from the linear branch
    if p.eta != 0.0:
        try:
            x = solve_at(p, x)
        except ConvergenceError:
            u0 = 2.0**-6
            x = solve_at(p.replace(eta=p.eta * u0), x)
            x = ramp(lambda u: p.replace(eta=p.eta * u), x, u0)

    alpha = complex(x[0], x[1])
    beta1 = complex(x[2], x[3])
    beta2 = complex(x[4], x[5])
    residual = float(np.max(np.abs(mean_field_residual(p, alpha, beta1, beta2))))

    # global phase gauge: rotate so alpha lands on the positive real axis
    phase = math.atan2(alpha.imag, alpha.real)
    return MeanFields(
        alpha=complex(abs(alpha), 0.0),
        beta1=beta1,
        beta2=beta2,
        delta_eff=p.delta,
        g_eff=p.g * abs(alpha),
        lambda_nl=24.0 * p.eta * beta1.real**2,
        residual=residual,
        input_phase=-phase,
        delta_bare=p.delta - 2.0 * p.g * (beta1.real + beta2.real),
    )
