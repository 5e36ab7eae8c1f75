"""
Time-domain propagation of the driven qubit.

Lab frame:       H(t) = (omega_qubit / 2) sigma_z + rabi_omega cos(omega_drive t + phase) sigma_x
Rotating frame:  H'   = (detuning / 2) sigma_z + (rabi_omega / 2) (cos(phase) sigma_x - sin(phase) sigma_y)

(hbar = 1, rad/s.) Propagators follow the sign of the R and T gate
definitions, dU/dt = +i H U, so free evolution is phase_z(t, omega_qubit)
and a resonant rotating-frame pulse of length t is rot_x(rabi_omega * t).
"""
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from django.core.exceptions import ImproperlyConfigured
from scipy.linalg import polar

from qubit.core import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, Unitary2, phase_z
from qubit.exceptions import InvalidArgument

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-12
POINTS_PER_PERIOD = 50


@dataclass(frozen=True)
class DriveParams:
    """Lab-frame drive with a rectangular envelope [start, start + duration]."""
    omega_qubit: float
    omega_drive: float
    rabi_omega: float
    drive_phase: float = 0.0
    start: float = 0.0
    duration: float = 0.0

    def __post_init__(self):
        for name in ('omega_qubit', 'omega_drive', 'rabi_omega', 'start', 'duration'):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidArgument(f"{name} must be finite and >= 0, got {value!r}")
        if not math.isfinite(self.drive_phase):
            raise InvalidArgument("drive_phase must be finite")

    @property
    def end(self):
        return self.start + self.duration

    @property
    def detuning(self):
        return self.omega_qubit - self.omega_drive

    def max_frequency(self):
        return max(self.omega_qubit, self.omega_drive, self.rabi_omega)

    def rotating_frame(self):
        return RotatingFrameParams(
            detuning=self.detuning,
            rabi_omega=self.rabi_omega,
            duration=self.duration,
            drive_phase=self.drive_phase,
        )


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Fixed-step classical Runge-Kutta (4th order).

    ``max_frequency`` (rad/s) is the fastest frequency the step has to
    resolve; a step coarser than 1/50 of that period is refused at
    construction. ``lab_propagator`` rebuilds the config with its drive's
    fastest frequency through ``resolving``.
    """
    step: float = DEFAULT_STEP
    method: str = 'rk4'
    max_frequency: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise ImproperlyConfigured(f"integrator step must be > 0, got {self.step!r}")
        if self.method != 'rk4':
            raise ImproperlyConfigured(f"unsupported integrator method {self.method!r}")
        if not (math.isfinite(self.max_frequency) and self.max_frequency >= 0):
            raise ImproperlyConfigured(f"max_frequency must be finite and >= 0, got {self.max_frequency!r}")
        self.check_resolves(self.max_frequency)

    def resolving(self, max_angular_frequency):
        return replace(self, max_frequency=max(self.max_frequency, max_angular_frequency))

    def max_step_for(self, max_angular_frequency):
        if max_angular_frequency <= 0:
            return math.inf
        return 2 * math.pi / (POINTS_PER_PERIOD * max_angular_frequency)

    def check_resolves(self, max_angular_frequency):
        limit = self.max_step_for(max_angular_frequency)
        if self.step > limit:
            raise ImproperlyConfigured(
                f"integrator step {self.step:.3e} s is too coarse: the fastest frequency "
                f"{max_angular_frequency / (2 * math.pi):.4g} Hz needs a step <= {limit:.3e} s"
            )


@dataclass(frozen=True)
class RotatingFrameParams:
    detuning: float
    rabi_omega: float
    duration: float
    drive_phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.duration) or self.duration < 0:
            raise InvalidArgument(f"duration must be finite and >= 0, got {self.duration!r}")
        for name in ('detuning', 'rabi_omega', 'drive_phase'):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")


def _integrate(u0, omega_qubit, omega_drive, rabi_omega, drive_phase, t0, t1, step):
    span = t1 - t0
    if span <= 0:
        return u0
    n_steps = max(1, math.ceil(span / step - 1e-9))
    h = span / n_steps
    times = t0 + h * np.arange(n_steps)
    # drive amplitude at the three RK4 abscissae of every step
    c_start = rabi_omega * np.cos(omega_drive * times + drive_phase)
    c_mid = rabi_omega * np.cos(omega_drive * (times + h / 2) + drive_phase)
    c_end = rabi_omega * np.cos(omega_drive * (times + h) + drive_phase)
    static = 1j * (omega_qubit / 2) * SIGMA_Z
    coupling = 1j * SIGMA_X

    u = u0.copy()
    for k in range(n_steps):
        a_start = static + c_start[k] * coupling
        a_mid = static + c_mid[k] * coupling
        a_end = static + c_end[k] * coupling
        k1 = a_start @ u
        k2 = a_mid @ (u + (h / 2) * k1)
        k3 = a_mid @ (u + (h / 2) * k2)
        k4 = a_end @ (u + h * k3)
        u = u + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    logger.debug("rk4: %d steps of %.3e s over [%.3e, %.3e]", n_steps, h, t0, t1)
    return u


def lab_propagator(p: DriveParams, cfg: IntegratorConfig = IntegratorConfig()):
    """
    Time-ordered propagator over [0, p.end] with the drive on inside its
    envelope, integrated with fixed-step RK4 and projected back onto U(2).

    The free segment before the envelope and the driven segment are
    integrated separately so no step straddles the rectangular edge.
    """
    cfg = cfg.resolving(p.max_frequency())
    u = IDENTITY.copy()
    u = _integrate(u, p.omega_qubit, p.omega_drive, 0.0, p.drive_phase, 0.0, p.start, cfg.step)
    u = _integrate(u, p.omega_qubit, p.omega_drive, p.rabi_omega, p.drive_phase, p.start, p.end, cfg.step)
    unitary_part, _ = polar(u)
    return Unitary2(unitary_part)


def rwa_propagator(p: RotatingFrameParams):
    """Closed form exp(i t (detuning sigma_z + rabi_omega n.sigma) / 2)."""
    generalized = math.hypot(p.detuning, p.rabi_omega)
    if generalized == 0 or p.duration == 0:
        return Unitary2.identity()
    axis = (
        p.detuning * SIGMA_Z
        + p.rabi_omega * (math.cos(p.drive_phase) * SIGMA_X - math.sin(p.drive_phase) * SIGMA_Y)
    ) / generalized
    half_angle = generalized * p.duration / 2
    return Unitary2(math.cos(half_angle) * IDENTITY + 1j * math.sin(half_angle) * axis)


def frame_align(u_lab, omega_drive, t):
    """Move a lab-frame propagator ending at t into the frame rotating at omega_drive."""
    return phase_z(t, -omega_drive) @ u_lab


def average_gate_fidelity(u, v):
    """(|Tr(U^dag V)|^2 + d) / (d (d + 1)) for d = 2."""
    overlap = abs(np.trace(u.u.conj().T @ v.u)) ** 2
    return float((overlap + 2) / 6)


def rwa_prediction(p: DriveParams):
    """Rotating-frame propagator for the same window: idle lead-in, then the pulse."""
    return rwa_propagator(p.rotating_frame()) @ phase_z(p.start, p.detuning)


def rwa_error(p: DriveParams, cfg: IntegratorConfig = IntegratorConfig()):
    """1 - average gate fidelity between the frame-aligned lab propagator and the RWA one."""
    aligned = frame_align(lab_propagator(p, cfg), p.omega_drive, p.end)
    error = 1.0 - average_gate_fidelity(aligned, rwa_prediction(p))
    return min(max(error, 0.0), 1.0)
