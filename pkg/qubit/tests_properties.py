"""
Randomized invariant checks over the gate families (1000 cases each).
"""
import math

import numpy as np
from django.test import SimpleTestCase

from .core import (
    IDENTITY, DensityMatrix, PureState, apply, apply_density, fidelity, haar_random_state,
    phase_z, rot_x, to_bloch,
)

CASES = 1000


class UnitarityPropertyTest(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_rot_x_is_unitary(self):
        for theta in self.rng.uniform(-100, 100, size=CASES):
            u = rot_x(theta).u
            self.assertLess(np.linalg.norm(u.conj().T @ u - IDENTITY), 1e-10)

    def test_phase_z_is_unitary(self):
        taus = self.rng.uniform(0, 1e-6, size=CASES)
        detunings = self.rng.uniform(-1e10, 1e10, size=CASES)
        for tau, delta_omega in zip(taus, detunings):
            u = phase_z(tau, delta_omega).u
            self.assertLess(np.linalg.norm(u.conj().T @ u - IDENTITY), 1e-10)

    def test_group_laws(self):
        for _ in range(CASES):
            a, b = self.rng.uniform(-20, 20, size=2)
            self.assertTrue((rot_x(a) @ rot_x(b)).close_to(rot_x(a + b)))
            tau1, tau2 = self.rng.uniform(0, 20e-9, size=2)
            delta_omega = self.rng.uniform(-2e9, 2e9)
            self.assertTrue(
                (phase_z(tau1, delta_omega) @ phase_z(tau2, delta_omega)).close_to(
                    phase_z(tau1 + tau2, delta_omega)
                )
            )


class NormPropertyTest(SimpleTestCase):

    def test_apply_preserves_norm(self):
        rng = np.random.default_rng(99)
        for _ in range(CASES):
            s = haar_random_state(rng)
            u = rot_x(rng.uniform(-7, 7)) @ phase_z(rng.uniform(0, 1e-8), rng.uniform(-1e9, 1e9))
            out = apply(u, s)
            self.assertAlmostEqual(np.linalg.norm(out.vector), 1.0, delta=1e-12)
            self.assertAlmostEqual(to_bloch(out).length(), 1.0, delta=1e-10)

    def test_density_trace_preserved(self):
        rng = np.random.default_rng(100)
        for _ in range(CASES):
            rho = DensityMatrix.from_pure(haar_random_state(rng))
            out = apply_density(rot_x(rng.uniform(-7, 7)), rho)
            self.assertAlmostEqual(np.trace(out.rho).real, 1.0, delta=1e-12)


class ExcitedEchoTest(SimpleTestCase):

    def test_half_pi_echo_returns_excited_state(self):
        # R(pi/2) T(pi/delta_omega, delta_omega) R(pi/2) maps |e> to |e>.
        delta_omega = 2 * math.pi * 90.9e6
        u = rot_x(math.pi / 2) @ phase_z(math.pi / delta_omega, delta_omega) @ rot_x(math.pi / 2)
        e = PureState.basis('e')
        self.assertGreater(fidelity(apply(u, e), e), 1 - 1e-10)
