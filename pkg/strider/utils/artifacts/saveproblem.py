import os
import numpy as np

from pydispatch import dispatcher
from strider import STRIDER_END_TICK_EVENT
from strider.ops import QcqpProblem, QuadraticConstraint


PROBLEM_HEADER = '# strider-qcqp v1'

MATRIX_SECTIONS = ('G', 'A_in', 'A_eq')
VECTOR_SECTIONS = ('g', 'b_in', 'b_eq')


def _row(values):
    return ' '.join('{:.17g}'.format(value) for value in values) + '\n'


def _write_matrix(f, label, matrix):
    f.write('{} {} {}\n'.format(label, *matrix.shape))

    for row in matrix:
        f.write(_row(row))


def _write_vector(f, label, vector):
    f.write('{} {}\n'.format(label, vector.shape[0]))

    if vector.shape[0]:
        f.write(_row(vector))


class SaveProblemDump:
    """
    Writes a QcqpProblem to a self-describing text file for offline inspection. After the version line, every
    section starts with a line holding its label and dimensions, followed by the values in row-major order, one
    matrix row per line:

    .. code-block:: text

        # strider-qcqp v1
        G r c
        g n
        V j r c     (for every quadratic constraint j)
        v j n
        sigma j
        A_in r c
        b_in n
        A_eq r c
        b_eq n

    """
    def __init__(self, artifacts_dir):
        self.artifacts_dir = artifacts_dir

        if not os.path.exists(self.artifacts_dir):
            raise ValueError('The artifacts directory passed as parameter to SaveProblemDump does not exist')

    def __call__(self, problem, filename='problem.txt'):
        path = os.path.join(self.artifacts_dir, filename)

        with open(path, 'w') as f:
            f.write(PROBLEM_HEADER + '\n')

            _write_matrix(f, 'G', problem.G)
            _write_vector(f, 'g', problem.g)

            for j, constraint in enumerate(problem.quad_constraints):
                _write_matrix(f, 'V {}'.format(j), constraint.V)
                _write_vector(f, 'v {}'.format(j), constraint.v)
                f.write('sigma {}\n'.format(j))
                f.write(_row([constraint.sigma]))

            _write_matrix(f, 'A_in', problem.A_in)
            _write_vector(f, 'b_in', problem.b_in)
            _write_matrix(f, 'A_eq', problem.A_eq)
            _write_vector(f, 'b_eq', problem.b_eq)

        return path


def load_problem_dump(path):
    """
    Reads a dump written by SaveProblemDump back into a QcqpProblem. Channel layout and objective offset are not
    part of the dump.

    :param path: path of the dump
    :type path: str
    :return: QcqpProblem
    """
    if not os.path.exists(path):
        raise FileNotFoundError('The problem dump {} does not exist'.format(path))

    with open(path) as f:
        lines = [line.strip() for line in f]

    if not lines or lines[0] != PROBLEM_HEADER:
        raise ValueError('Unsupported problem dump version: {}'.format(lines[0] if lines else ''))

    def values(line):
        return np.array([float(token) for token in line.split()])

    sections = {}
    quadratic = {}

    position = 1

    while position < len(lines):
        tokens = lines[position].split()
        position += 1

        if not tokens:
            continue

        label = tokens[0]

        if label in MATRIX_SECTIONS or label == 'V':
            rows, columns = int(tokens[-2]), int(tokens[-1])
            matrix = np.array([values(line) for line in lines[position:position + rows]]).reshape(rows, columns)
            position += rows

            if label == 'V':
                quadratic.setdefault(int(tokens[1]), {})['V'] = matrix
            else:
                sections[label] = matrix

        elif label in VECTOR_SECTIONS or label == 'v':
            length = int(tokens[-1])
            vector = values(lines[position]) if length else np.zeros(0)
            position += 1 if length else 0

            if label == 'v':
                quadratic.setdefault(int(tokens[1]), {})['v'] = vector
            else:
                sections[label] = vector

        elif label == 'sigma':
            quadratic.setdefault(int(tokens[1]), {})['sigma'] = float(lines[position])
            position += 1

        else:
            raise ValueError('Unknown section {} in problem dump {}'.format(label, path))

    constraints = [
        QuadraticConstraint.dense(quadratic[j]['V'], quadratic[j]['v'], quadratic[j]['sigma'])
        for j in sorted(quadratic)
    ]

    return QcqpProblem(
        sections['G'],
        sections['g'],
        constraints,
        sections['A_in'],
        sections['b_in'],
        sections['A_eq'],
        sections['b_eq'],
    )


class SaveProblemHook:
    """
    Dumps the QCQP of every tick of a workflow, or of every n-th tick, as problem_<tick>.txt under
    artifacts_dir/problems.

    .. code-block:: python

        from strider.utils.artifacts import SaveProblemHook

        saver = SaveProblemHook(episode.id, '/my/artifacts', every=20)

    """
    def __init__(self, workflow_id, artifacts_dir, every=1):
        dispatcher.connect(self.save_problem, signal=STRIDER_END_TICK_EVENT, sender=workflow_id)

        if not os.path.exists(artifacts_dir):
            raise ValueError('The directory specified to save artifacts does not exist!')

        if every < 1:
            raise ValueError('Problems can only be saved every n >= 1 ticks, got {}'.format(every))

        self.artifacts_dir = os.path.join(artifacts_dir, 'problems')

        if not os.path.exists(self.artifacts_dir):
            os.makedirs(self.artifacts_dir)

        self.every = every
        self.tick = 0

        self.saver = SaveProblemDump(self.artifacts_dir)

    def save_problem(self, message):
        if self.tick % self.every == 0:
            self.saver(message['problem'], 'problem_{:05d}.txt'.format(self.tick))

        self.tick += 1
