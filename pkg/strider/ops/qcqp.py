import numpy as np

from dataclasses import dataclass


class DimensionMismatch(ValueError):
    pass


def _as_vector(value, length, name):
    value = np.asarray(value, dtype=float).reshape(-1)

    if value.shape != (length,):
        raise DimensionMismatch('{} must have length {}, got {}'.format(name, length, value.shape[0]))

    return value


def _as_rows(matrix, vector, length, name):
    if matrix is None or len(matrix) == 0:
        return np.zeros((0, length)), np.zeros(0)

    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    vector = np.asarray(vector, dtype=float).reshape(-1)

    if matrix.shape[1] != length:
        raise DimensionMismatch('{} rows must have {} columns, got {}'.format(name, length, matrix.shape[1]))

    if vector.shape[0] != matrix.shape[0]:
        raise DimensionMismatch('{} has {} rows but {} right-hand sides'.format(name, matrix.shape[0], vector.shape[0]))

    return matrix, vector


class QuadraticConstraint:
    """
    One quadratic inequality X^T V X + v^T X + sigma <= 0.

    The constraint can be given densely (V, v, sigma) or in factored form as a sum of scaled products of affine
    forms plus an affine remainder:

        h(X) = sum_k scale_k (a0_k + a_k^T X)(b0_k + b_k^T X) + linear^T X + constant

    The factored form keeps the memory footprint of a constraint linear in the number of decision variables.
    The dense matrix V is only materialized on request and is always symmetric.

    .. code-block:: python

        from strider.ops import QuadraticConstraint

        # x^2 - 2x + 1 <= 0
        constraint = QuadraticConstraint.dense([[1.0]], [-2.0], 1.0)

        constraint.evaluate([1.0])  # 0.0

    """
    def __init__(self, size, products=(), linear=None, constant=0.0, matrix=None):
        """
        :param size: number of decision variables
        :type size: int
        :param products: list of (scale, a0, a, b0, b) tuples
        :type products: list
        :param linear: affine coefficient vector of the remainder
        :type linear: numpy.ndarray
        :param constant: constant of the remainder
        :type constant: float
        :param matrix: optional dense quadratic matrix, symmetrized on insertion
        :type matrix: numpy.ndarray
        """
        self.size = size

        self.products = []

        for scale, a0, a, b0, b in products:
            self.products.append((
                float(scale),
                float(a0),
                _as_vector(a, size, 'product factor'),
                float(b0),
                _as_vector(b, size, 'product factor'),
            ))

        self.linear = np.zeros(size) if linear is None else _as_vector(linear, size, 'linear coefficients')
        self.constant = float(constant)

        if matrix is not None:
            matrix = np.asarray(matrix, dtype=float)

            if matrix.shape != (size, size):
                raise DimensionMismatch('V must have shape ({0}, {0}), got {1}'.format(size, matrix.shape))

            matrix = 0.5 * (matrix + matrix.T)

        self.matrix = matrix

    @classmethod
    def dense(cls, V, v, sigma):
        v = np.asarray(v, dtype=float).reshape(-1)

        return cls(v.shape[0], linear=v, constant=sigma, matrix=V)

    @property
    def V(self):
        V = np.zeros((self.size, self.size)) if self.matrix is None else np.array(self.matrix)

        for scale, _, a, _, b in self.products:
            outer = np.outer(a, b)
            V += 0.5 * scale * (outer + outer.T)

        return V

    @property
    def v(self):
        v = np.array(self.linear)

        for scale, a0, a, b0, b in self.products:
            v += scale * (a0 * b + b0 * a)

        return v

    @property
    def sigma(self):
        return self.constant + sum(scale * a0 * b0 for scale, a0, _, b0, _ in self.products)

    def evaluate(self, X):
        X = np.asarray(X, dtype=float)

        value = self.linear @ X + self.constant

        if self.matrix is not None:
            value += X @ self.matrix @ X

        for scale, a0, a, b0, b in self.products:
            value += scale * (a0 + a @ X) * (b0 + b @ X)

        return float(value)

    def gradient(self, X):
        """
        Gradient 2 V X + v of the constraint function.
        """
        X = np.asarray(X, dtype=float)

        gradient = np.array(self.linear)

        if self.matrix is not None:
            gradient += 2.0 * self.matrix @ X

        for scale, a0, a, b0, b in self.products:
            gradient += scale * ((b0 + b @ X) * a + (a0 + a @ X) * b)

        return gradient


class QcqpProblem:
    """
    Quadratically constrained quadratic program

        minimize    X^T G X + g^T X
        subject to  X^T V_j X + v_j^T X + sigma_j <= 0
                    A_in X <= b_in
                    A_eq X  = b_eq

    The decision vector may be partitioned into named channels. Channel layout is used by the SQP termination
    rule, which takes the per-channel maximum increment. Channels listed as pinned are fully determined by
    equality rows and are left out of the termination rule.

    .. code-block:: python

        import numpy as np
        from strider.ops import QcqpProblem, QuadraticConstraint

        problem = QcqpProblem(
            G=np.eye(1),
            g=np.zeros(1),
            quad_constraints=[QuadraticConstraint.dense([[1.0]], [-2.0], 1.0)]
        )

    """
    def __init__(self, G, g, quad_constraints=(), A_in=None, b_in=None, A_eq=None, b_eq=None, channels=None,
                 pinned_channels=(), offset=0.0):
        """
        :param G: objective Hessian, symmetrized on insertion
        :type G: numpy.ndarray
        :param g: objective linear term
        :type g: numpy.ndarray
        :param quad_constraints: quadratic inequality constraints
        :type quad_constraints: list of QuadraticConstraint
        :param A_in: linear inequality rows
        :param b_in: linear inequality right-hand sides
        :param A_eq: linear equality rows
        :param b_eq: linear equality right-hand sides
        :param channels: list of (name, start, stop) partitioning the decision vector
        :type channels: list
        :param pinned_channels: channel names fully fixed by equality rows
        :type pinned_channels: list
        :param offset: constant added by objective() so that it matches the unexpanded cost
        :type offset: float
        """
        G = np.atleast_2d(np.asarray(G, dtype=float))

        if G.shape[0] != G.shape[1]:
            raise DimensionMismatch('G must be square, got {}'.format(G.shape))

        self.size = G.shape[0]

        self.G = 0.5 * (G + G.T)
        self.g = _as_vector(g, self.size, 'g')

        self.quad_constraints = list(quad_constraints)

        for constraint in self.quad_constraints:
            if constraint.size != self.size:
                raise DimensionMismatch(
                    'Quadratic constraint of size {} does not match problem size {}'.format(constraint.size, self.size)
                )

        self.A_in, self.b_in = _as_rows(A_in, b_in, self.size, 'A_in')
        self.A_eq, self.b_eq = _as_rows(A_eq, b_eq, self.size, 'A_eq')

        if channels is None:
            channels = [('x', 0, self.size)]

        covered = np.zeros(self.size, dtype=int)

        for _, start, stop in channels:
            covered[start:stop] += 1

        if not np.all(covered == 1):
            raise DimensionMismatch('Channels must partition the decision vector')

        self.channels = list(channels)
        self.pinned_channels = tuple(pinned_channels)

        self.offset = float(offset)

    def objective(self, X):
        X = np.asarray(X, dtype=float)

        return float(X @ self.G @ X + self.g @ X + self.offset)

    def objective_gradient(self, X):
        return 2.0 * self.G @ np.asarray(X, dtype=float) + self.g

    def constraint_values(self, X):
        return np.array([constraint.evaluate(X) for constraint in self.quad_constraints])

    def max_violation(self, X):
        """
        Largest violation over all constraints, zero when X is feasible.
        """
        X = np.asarray(X, dtype=float)

        violations = [0.0]

        if self.quad_constraints:
            violations.append(np.max(self.constraint_values(X)))

        if self.A_in.shape[0]:
            violations.append(np.max(self.A_in @ X - self.b_in))

        if self.A_eq.shape[0]:
            violations.append(np.max(np.abs(self.A_eq @ X - self.b_eq)))

        return float(max(violations))

    def channel_slices(self):
        return [(name, slice(start, stop)) for name, start, stop in self.channels]


@dataclass(frozen=True, eq=False)
class LinearizedQp:
    """
    Local QP in the increment Delta:

        minimize    1/2 Delta^T hessian Delta + gradient^T Delta
        subject to  A_in Delta <= b_in,  A_eq Delta = b_eq

    The first quadratic_rows rows of A_in come from linearized quadratic constraints.
    """
    hessian: np.ndarray
    gradient: np.ndarray
    A_in: np.ndarray
    b_in: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    quadratic_rows: int


def linearize(problem, X):
    """
    First-order expansion of a QcqpProblem around X. The objective is quadratic so its expansion is exact; each
    quadratic constraint j becomes (2 V_j X + v_j)^T Delta + h_j(X) <= 0 and linear rows are re-expressed in the
    increment.

    .. code-block:: python

        from strider.ops import linearize

        qp = linearize(problem, X)

    :param problem: the problem to expand
    :type problem: QcqpProblem
    :param X: expansion point
    :type X: numpy.ndarray
    :return: LinearizedQp
    """
    X = _as_vector(X, problem.size, 'X')

    rows = [constraint.gradient(X) for constraint in problem.quad_constraints]
    bounds = [-constraint.evaluate(X) for constraint in problem.quad_constraints]

    quad_rows = np.array(rows).reshape(-1, problem.size)
    quad_bounds = np.array(bounds)

    A_in = np.vstack([quad_rows, problem.A_in])
    b_in = np.concatenate([quad_bounds, problem.b_in - problem.A_in @ X])

    return LinearizedQp(
        hessian=2.0 * problem.G,
        gradient=problem.objective_gradient(X),
        A_in=A_in,
        b_in=b_in,
        A_eq=np.array(problem.A_eq),
        b_eq=problem.b_eq - problem.A_eq @ X,
        quadratic_rows=len(problem.quad_constraints),
    )
