"""
Exact two-level quantum math: states, 2x2 unitaries, the R and T gate
families, fidelity and Bloch-vector utilities.

Basis convention: vectors are stored in (g, e) order and |e> is the +1
eigenstate of sigma_z, so H = (hbar * omega_qubit / 2) * sigma_z puts |e>
above |g>. With this choice the feedback-sequence closed forms hold exactly.

States are compared through fidelity, never componentwise: every closed
form here is defined up to a global phase.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .exceptions import InvalidArgument

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
BLOCH_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)


def _frozen(matrix):
    array = np.array(matrix, dtype=complex)
    array.setflags(write=False)
    return array


def _check_finite(name, value):
    if not math.isfinite(value):
        raise InvalidArgument(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PureState:
    """Normalized state amp_g|g> + amp_e|e>."""
    amp_g: complex
    amp_e: complex

    def __post_init__(self):
        for name in ('amp_g', 'amp_e'):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise InvalidArgument(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        norm = abs(self.amp_g) ** 2 + abs(self.amp_e) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgument(f"state is not normalized (|psi|^2 = {norm!r})")

    @classmethod
    def basis(cls, label):
        """|g> or |e>."""
        if label == 'g':
            return cls(1, 0)
        if label == 'e':
            return cls(0, 1)
        raise InvalidArgument(f"basis label must be 'g' or 'e', got {label!r}")

    @classmethod
    def from_vector(cls, vector, normalize=False):
        vector = np.asarray(vector, dtype=complex).reshape(2)
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0 or not np.isfinite(norm):
                raise InvalidArgument("cannot normalize a zero or non-finite vector")
            vector = vector / norm
        return cls(vector[0], vector[1])

    @classmethod
    def from_bloch(cls, theta, phi):
        """Point on the sphere at polar angle theta measured from |e>."""
        return cls(cmath.exp(1j * phi) * math.sin(theta / 2), math.cos(theta / 2))

    @property
    def vector(self):
        return np.array([self.amp_g, self.amp_e], dtype=complex)

    @property
    def p_excited(self):
        return abs(self.amp_e) ** 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2x2 density operator in (g, e) order."""
    rho: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.rho)
        if rho.shape != (2, 2):
            raise InvalidArgument(f"density matrix must be 2x2, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvalidArgument("density matrix has non-finite entries")
        if np.linalg.norm(rho - rho.conj().T) > NORM_TOL:
            raise InvalidArgument("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > NORM_TOL:
            raise InvalidArgument(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -NORM_TOL:
            raise InvalidArgument("density matrix has a negative eigenvalue")
        object.__setattr__(self, 'rho', rho)

    @classmethod
    def from_pure(cls, state):
        v = state.vector
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls):
        return cls(IDENTITY / 2)

    @property
    def p_excited(self):
        return float(self.rho[1, 1].real)

    def purity(self):
        return float(np.trace(self.rho @ self.rho).real)


@dataclass(frozen=True, eq=False)
class Unitary2:
    """2x2 unitary; compose with ``@`` (right operand acts first)."""
    u: np.ndarray

    def __post_init__(self):
        u = _frozen(self.u)
        if u.shape != (2, 2):
            raise InvalidArgument(f"unitary must be 2x2, got shape {u.shape}")
        deviation = np.linalg.norm(u.conj().T @ u - IDENTITY)
        if not deviation <= UNITARY_TOL:
            raise InvalidArgument(f"matrix is not unitary (||U^dag U - I|| = {deviation:.3e})")
        object.__setattr__(self, 'u', u)

    @classmethod
    def identity(cls):
        return cls(IDENTITY)

    def __matmul__(self, other):
        if not isinstance(other, Unitary2):
            return NotImplemented
        return Unitary2(self.u @ other.u)

    def dagger(self):
        return Unitary2(self.u.conj().T)

    def close_to(self, other, atol=UNITARY_TOL):
        return bool(np.linalg.norm(self.u - other.u) <= atol)


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    def length(self):
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)


def rot_x(theta):
    """R(theta) = exp(i * theta/2 * sigma_x)."""
    _check_finite('theta', theta)
    return Unitary2(math.cos(theta / 2) * IDENTITY + 1j * math.sin(theta / 2) * SIGMA_X)


def rot_axis(theta, phase=0.0):
    """
    exp(i * theta/2 * (cos(phase) sigma_x - sin(phase) sigma_y)).

    The rotating-frame action of a drive with carrier phase ``phase``;
    rot_axis(theta, 0) == rot_x(theta) and rot_axis(theta, pi) == rot_x(-theta).
    """
    _check_finite('theta', theta)
    _check_finite('phase', phase)
    axis = math.cos(phase) * SIGMA_X - math.sin(phase) * SIGMA_Y
    return Unitary2(math.cos(theta / 2) * IDENTITY + 1j * math.sin(theta / 2) * axis)


def phase_z(tau, delta_omega):
    """T(tau, delta_omega) = exp(i * delta_omega * tau/2 * sigma_z)."""
    _check_finite('tau', tau)
    _check_finite('delta_omega', delta_omega)
    if tau < 0:
        raise InvalidArgument(f"tau must be >= 0, got {tau!r}")
    half = delta_omega * tau / 2
    return Unitary2(np.diag([cmath.exp(-1j * half), cmath.exp(1j * half)]))


def apply(u, s):
    return PureState.from_vector(u.u @ s.vector)


def apply_density(u, rho):
    return DensityMatrix(u.u @ rho.rho @ u.u.conj().T)


def fidelity(a, b):
    """|<a|b>|^2, clipped into [0, 1]."""
    overlap = abs(np.vdot(a.vector, b.vector)) ** 2
    return float(min(max(overlap, 0.0), 1.0))


def to_bloch(s: Union[PureState, DensityMatrix]):
    rho = DensityMatrix.from_pure(s).rho if isinstance(s, PureState) else s.rho
    x, y, z = (float(np.trace(rho @ pauli).real) for pauli in (SIGMA_X, SIGMA_Y, SIGMA_Z))
    return BlochVector(x, y, z)


def excited_population(s: Union[PureState, DensityMatrix]):
    """<(1 + sigma_z)/2>."""
    return float(s.p_excited)


def trace_distance(a: DensityMatrix, b: DensityMatrix):
    eigenvalues = np.linalg.eigvalsh(a.rho - b.rho)
    return float(0.5 * np.abs(eigenvalues).sum())


def haar_random_state(rng):
    """Haar-distributed pure state drawn from a numpy Generator."""
    vector = rng.normal(size=2) + 1j * rng.normal(size=2)
    return PureState.from_vector(vector, normalize=True)
