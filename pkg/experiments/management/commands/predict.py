"""
Print the closed-form final states of the arbitrary-state preparation.
Usage: python manage.py predict --theta1 90deg --theta2 60deg --phi 45deg
"""
import math

from feedback.protocol import DetectedBranch, FeedbackSpec, predict_final
from feedback.schedule import DriveConvention
from qubit.core import to_bloch

from ._common import ExperimentCommand, flag_angle

AMPLITUDE_TOL = 1e-12


def _coefficient(amplitude):
    re, im = amplitude.real, amplitude.imag
    re = 0.0 if abs(re) < AMPLITUDE_TOL else re
    im = 0.0 if abs(im) < AMPLITUDE_TOL else im
    if im == 0.0:
        return {1.0: '', -1.0: '-'}.get(round(re, 12), f"{re:.6g}")
    if re == 0.0:
        return {1.0: 'i', -1.0: '-i'}.get(round(im, 12), f"{im:.6g}i")
    return f"({re:.6g}{im:+.6g}i)"


def format_ket(state):
    """``a|g> + b|e>`` with negligible terms dropped."""
    terms = []
    for amplitude, label in ((state.amp_g, 'g'), (state.amp_e, 'e')):
        if abs(amplitude) < AMPLITUDE_TOL:
            continue
        terms.append(f"{_coefficient(amplitude)}|{label}>")
    return ' + '.join(terms).replace('+ -', '- ')


def format_bloch(state):
    # + 0.0 turns -0.0 into 0.0
    return '(' + ', '.join(f"{round(c, 9) + 0.0:.6g}" for c in to_bloch(state)) + ')'


class Command(ExperimentCommand):
    help = 'Prints the final qubit state for each readout branch of the feedback preparation'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--theta1', required=True, help='Ground-branch rotation (e.g. 180deg, 3.1416)')
        parser.add_argument('--theta2', default='0', help='Excited-branch rotation')
        parser.add_argument('--phi', default='0', help='Excited-branch phase')
        parser.add_argument('--drive-convention', choices=DriveConvention.values,
                            default=None, help='Overrides the config file')

    def run(self, config, **options):
        theta1 = flag_angle('--theta1', options['theta1'])
        theta2 = flag_angle('--theta2', options['theta2'])
        phi = flag_angle('--phi', options['phi'])
        convention = options.get('drive_convention') or config.drive_convention
        spec = FeedbackSpec.for_device(theta1, theta2, phi, config.device, drive_convention=convention)

        self.stdout.write(
            f"theta1 = {math.degrees(theta1):.6g} deg, theta2 = {math.degrees(theta2):.6g} deg, "
            f"phi = {math.degrees(phi):.6g} deg ({DriveConvention(convention).label.lower()})"
        )
        summary = {}
        for branch in (DetectedBranch.GROUND_DETECTED, DetectedBranch.EXCITED_DETECTED):
            state = predict_final(branch, spec)
            self.stdout.write(f"{branch.label:>17}: {format_ket(state)}   Bloch {format_bloch(state)}")
            summary[branch.value] = {'ket': format_ket(state), 'bloch': list(to_bloch(state))}
        return '', summary
