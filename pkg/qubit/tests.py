"""
Unit tests for the gate families and state utilities.
"""
import math

import numpy as np
from django.test import SimpleTestCase

from .core import (
    BlochVector, DensityMatrix, PureState, Unitary2, apply, apply_density, fidelity,
    phase_z, rot_axis, rot_x, to_bloch, trace_distance,
)
from .exceptions import InvalidArgument

G = PureState.basis('g')
E = PureState.basis('e')
PLUS = PureState(1 / math.sqrt(2), 1 / math.sqrt(2))


class RotXTest(SimpleTestCase):

    def test_zero_angle_is_identity(self):
        self.assertTrue(rot_x(0).close_to(Unitary2.identity()))

    def test_pi_maps_ground_to_i_excited(self):
        result = apply(rot_x(math.pi), G)
        self.assertAlmostEqual(result.amp_g, 0, places=12)
        self.assertAlmostEqual(result.amp_e, 1j, places=12)

    def test_half_pi_from_ground(self):
        result = apply(rot_x(math.pi / 2), G)
        expected = PureState(1 / math.sqrt(2), 1j / math.sqrt(2))
        self.assertAlmostEqual(result.amp_g, expected.amp_g, places=12)
        self.assertAlmostEqual(result.amp_e, expected.amp_e, places=12)

    def test_determinant_has_unit_modulus(self):
        for theta in (0.3, 1.0, -2.5, 7.0):
            self.assertAlmostEqual(abs(np.linalg.det(rot_x(theta).u)), 1.0, places=12)

    def test_group_law(self):
        rng = np.random.default_rng(7)
        for theta1, theta2 in rng.uniform(-10, 10, size=(100, 2)):
            composed = rot_x(theta1) @ rot_x(theta2)
            self.assertTrue(composed.close_to(rot_x(theta1 + theta2)))

    def test_non_finite_angle_rejected(self):
        with self.assertRaises(InvalidArgument):
            rot_x(float('nan'))
        with self.assertRaises(InvalidArgument):
            rot_x(float('inf'))

    def test_rot_axis_phase_pi_is_negative_rotation(self):
        self.assertTrue(rot_axis(1.1, math.pi).close_to(rot_x(-1.1)))
        self.assertTrue(rot_axis(1.1, 0.0).close_to(rot_x(1.1)))


class PhaseZTest(SimpleTestCase):

    def test_zero_detuning_is_identity(self):
        for tau in (0.0, 1e-9, 3.7e-6):
            self.assertTrue(phase_z(tau, 0.0).close_to(Unitary2.identity()))

    def test_half_turn_eigenvalues(self):
        delta_omega = 2 * math.pi * 90.9e6
        u = phase_z(math.pi / delta_omega, delta_omega)
        on_e = apply(u, E)
        on_g = apply(u, G)
        self.assertAlmostEqual(on_e.amp_e, 1j, places=12)
        self.assertAlmostEqual(on_g.amp_g, -1j, places=12)
        self.assertAlmostEqual(u.u[0, 1], 0)
        self.assertAlmostEqual(u.u[1, 0], 0)

    def test_time_additivity(self):
        rng = np.random.default_rng(11)
        delta_omega = 2 * math.pi * 150e6
        for tau1, tau2 in rng.uniform(0, 50e-9, size=(100, 2)):
            composed = phase_z(tau1, delta_omega) @ phase_z(tau2, delta_omega)
            self.assertTrue(composed.close_to(phase_z(tau1 + tau2, delta_omega)))

    def test_negative_tau_rejected(self):
        with self.assertRaises(InvalidArgument):
            phase_z(-1e-9, 1.0)


class ApplyTest(SimpleTestCase):

    def test_identity_leaves_state(self):
        s = PureState.from_vector([0.6, 0.8j])
        self.assertAlmostEqual(fidelity(apply(Unitary2.identity(), s), s), 1.0, places=12)

    def test_composition_matches_precomposed_product(self):
        rng = np.random.default_rng(3)
        s = PureState.from_vector([1, 1j], normalize=True)
        for _ in range(20):
            gates = []
            for _ in range(6):
                if rng.random() < 0.5:
                    gates.append(rot_x(rng.uniform(-math.pi, math.pi)))
                else:
                    gates.append(phase_z(rng.uniform(0, 10e-9), rng.uniform(-1e9, 1e9)))
            stepwise = s
            for gate in gates:
                stepwise = apply(gate, stepwise)
            product = Unitary2.identity()
            for gate in gates:
                product = gate @ product
            at_once = apply(product, s)
            self.assertLess(np.linalg.norm(stepwise.vector - at_once.vector), 1e-12)


class FidelityTest(SimpleTestCase):

    def test_basis_states(self):
        self.assertEqual(fidelity(G, G), 1.0)
        self.assertAlmostEqual(fidelity(G, E), 0.0)

    def test_born_rule_overlap(self):
        self.assertAlmostEqual(fidelity(PLUS, E), 0.5, places=12)

    def test_global_phase_ignored(self):
        self.assertAlmostEqual(fidelity(E, PureState(0, 1j)), 1.0, places=12)


class BlochTest(SimpleTestCase):

    def test_excited_is_north_pole(self):
        self.assertEqual(to_bloch(E), BlochVector(0.0, 0.0, 1.0))

    def test_plus_state_on_x_axis(self):
        x, y, z = to_bloch(PLUS)
        self.assertAlmostEqual(x, 1.0, places=12)
        self.assertAlmostEqual(y, 0.0, places=12)
        self.assertAlmostEqual(z, 0.0, places=12)

    def test_maximally_mixed_is_origin(self):
        self.assertEqual(tuple(to_bloch(DensityMatrix.maximally_mixed())), (0.0, 0.0, 0.0))

    def test_rot_x_turns_by_minus_theta_about_x(self):
        # R(theta) = exp(+i theta sigma_x / 2) is a rotation by -theta.
        rng = np.random.default_rng(5)
        for _ in range(50):
            s = PureState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2), normalize=True)
            theta = rng.uniform(-math.pi, math.pi)
            x, y, z = to_bloch(s)
            rx, ry, rz = to_bloch(apply(rot_x(theta), s))
            alpha = -theta
            self.assertAlmostEqual(rx, x, places=10)
            self.assertAlmostEqual(ry, y * math.cos(alpha) - z * math.sin(alpha), places=10)
            self.assertAlmostEqual(rz, y * math.sin(alpha) + z * math.cos(alpha), places=10)

    def test_from_bloch_equator(self):
        x, y, z = to_bloch(PureState.from_bloch(math.pi / 2, math.pi / 2))
        self.assertAlmostEqual(y, 1.0, places=12)


class DensityMatrixTest(SimpleTestCase):

    def test_rejects_bad_trace(self):
        with self.assertRaises(InvalidArgument):
            DensityMatrix(np.diag([0.7, 0.7]))

    def test_rejects_non_hermitian(self):
        with self.assertRaises(InvalidArgument):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_unitary_conjugation_matches_pure_path(self):
        s = PureState.from_vector([0.6, 0.8])
        u = rot_x(0.7) @ phase_z(2e-9, 1e9)
        via_rho = apply_density(u, DensityMatrix.from_pure(s))
        via_state = DensityMatrix.from_pure(apply(u, s))
        self.assertLess(trace_distance(via_rho, via_state), 1e-12)

    def test_non_unitary_rejected(self):
        with self.assertRaises(InvalidArgument):
            Unitary2(np.array([[1, 1], [0, 1]]))
