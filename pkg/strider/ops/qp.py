import logging
import numpy as np

from dataclasses import dataclass
from scipy.linalg import cho_factor, solve_triangular, LinAlgError

from strider.ops.qcqp import DimensionMismatch, _as_rows, _as_vector


# a candidate row is linearly dependent on the active rows when the part of J^T n outside the active span is
# this small relative to the whole
DEPENDENCE = 1e-10


class Infeasible(RuntimeError):
    pass


class IterationLimit(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class QpSolution:
    """
    Result of a QP solve. Multipliers follow the convention hessian x + gradient + A_in^T mu + A_eq^T nu = 0 with
    mu >= 0.
    """
    x: np.ndarray
    objective: float
    active: tuple
    multipliers_in: np.ndarray
    multipliers_eq: np.ndarray
    iterations: int
    backend: str


class _ActiveFactors:
    """
    Factors of the active set. With H = L L^T, J = L^-T Q for an orthogonal Q such that J^T N_A = [R; 0], R
    upper triangular over the first rank columns of J. The remaining columns of J span the null space of the
    active rows in the H metric.
    """
    def __init__(self, inverse):
        self.J = np.array(inverse)
        self.R = np.zeros_like(self.J)
        self.rank = 0

    def directions(self, normal):
        """
        :return: d = J^T n, the primal direction z and the dual direction r of row n
        """
        d = self.J.T @ normal

        z = self.J[:, self.rank:] @ d[self.rank:]

        if self.rank:
            r = solve_triangular(self.R[:self.rank, :self.rank], d[:self.rank])
        else:
            r = np.zeros(0)

        return d, z, r

    def add(self, d):
        q = self.rank
        free = d[q:]

        norm = np.linalg.norm(free)
        sigma = -norm if free[0] > 0 else norm

        # Householder reflection of the free columns taking J_2^T n onto sigma e_1
        v = np.array(free)
        v[0] -= sigma

        vv = v @ v

        if vv > 0:
            tail = self.J[:, q:]
            self.J[:, q:] = tail - np.outer(tail @ v, v) * (2.0 / vv)

        self.R[:q, q] = d[:q]
        self.R[q, q] = sigma
        self.rank = q + 1

    def drop(self, k):
        q = self.rank

        self.R[:, k:q - 1] = self.R[:, k + 1:q]
        self.R[:, q - 1] = 0.0

        # Givens rotations restore the triangle, the same rotations act on the columns of J
        for i in range(k, q - 1):
            a, b = self.R[i, i], self.R[i + 1, i]
            h = np.hypot(a, b)

            if h == 0:
                continue

            cos, sin = a / h, b / h

            upper, lower = np.array(self.R[i, i:q - 1]), np.array(self.R[i + 1, i:q - 1])
            self.R[i, i:q - 1] = cos * upper + sin * lower
            self.R[i + 1, i:q - 1] = cos * lower - sin * upper
            self.R[i + 1, i] = 0.0

            first, second = np.array(self.J[:, i]), np.array(self.J[:, i + 1])
            self.J[:, i] = cos * first + sin * second
            self.J[:, i + 1] = cos * second - sin * first

        self.R[q - 1, :] = 0.0
        self.rank = q - 1


def _blocking(active, u, r, n_eq):
    """
    Largest dual step keeping the active inequality multipliers nonnegative, with the position of the row that
    reaches zero first. Ties go to the row of smallest index.
    """
    t1, blocking = np.inf, None

    for j, index in enumerate(active):
        if index < n_eq or r[j] <= 1e-12:
            continue

        ratio = max(u[j], 0.0) / r[j]

        if blocking is None or ratio < t1 * (1.0 - 1e-12):
            t1, blocking = ratio, j
        elif ratio <= t1 * (1.0 + 1e-12) and index < active[blocking]:
            blocking = j

    return t1, blocking


class ActiveSetQP:
    """
    Dense dual active-set solver (Goldfarb-Idnani) for strictly convex QPs

        minimize    1/2 x^T H x + q^T x
        subject to  A_in x <= b_in,  A_eq x = b_eq

    The solver starts from the unconstrained minimizer, enforces the equality rows one by one and then adds the
    most violated inequality at every iteration, dropping active rows whose multipliers would become negative.
    Steps are computed from the factors J and R of the active set, which are updated by one Householder
    reflection per added row and by Givens rotations per dropped row.

    An instance owns its workspace: the Cholesky factor of the last Hessian and its inverse are kept and reused
    when the next solve receives the same Hessian, which is the situation of every SQP iteration within one
    control tick. Instances must therefore not be shared between threads.

    .. code-block:: python

        from strider.ops import ActiveSetQP

        solver = ActiveSetQP(max_iterations=500)

        # minimize x^2 subject to x >= 1
        solution = solver.solve([[2.0]], [0.0], A_in=[[-1.0]], b_in=[-1.0])

        solution.x  # array([1.])

    """
    def __init__(self, max_iterations=1000, tolerance=1e-9):
        """
        :param max_iterations: cap on active-set changes
        :type max_iterations: int
        :param tolerance: primal feasibility tolerance on normalized constraint rows
        :type tolerance: float
        """
        if max_iterations < 1:
            raise ValueError('The active-set iteration cap must be at least 1, got {}'.format(max_iterations))

        self.max_iterations = max_iterations
        self.tolerance = tolerance

        self._hessian = None
        self._factor = None
        self._inverse = None

    def factorize(self, hessian):
        """
        Cholesky factor of the Hessian, regularized with lambda I, lambda = 1e-10 trace(H) / n, when the
        smallest pivot falls below 1e-12.
        """
        if self._hessian is not None and self._hessian.shape == hessian.shape \
                and np.array_equal(self._hessian, hessian):
            return self._factor

        factor = None

        try:
            factor = cho_factor(hessian)
            if np.min(np.diag(factor[0])) ** 2 < 1e-12:
                factor = None
        except LinAlgError:
            factor = None

        if factor is None:
            regularization = 1e-10 * np.trace(hessian) / hessian.shape[0]

            if not regularization > 0:
                regularization = 1e-10

            logging.debug('DEBUG: Regularizing QP Hessian with lambda = {}'.format(regularization))

            try:
                factor = cho_factor(hessian + regularization * np.eye(hessian.shape[0]))
            except LinAlgError:
                raise Infeasible('The QP Hessian is not positive semidefinite')

        # H = U^T U with U upper triangular, J starts as U^-1
        upper = np.triu(factor[0]) if not factor[1] else np.tril(factor[0]).T

        self._hessian = np.array(hessian)
        self._factor = factor
        self._inverse = solve_triangular(upper, np.eye(hessian.shape[0]))

        return factor

    def solve(self, hessian, gradient, A_in=None, b_in=None, A_eq=None, b_eq=None):
        """
        :param hessian: symmetric positive (semi)definite matrix H
        :type hessian: numpy.ndarray
        :param gradient: linear term q
        :type gradient: numpy.ndarray
        :param A_in: inequality rows
        :param b_in: inequality right-hand sides
        :param A_eq: equality rows
        :param b_eq: equality right-hand sides
        :return: QpSolution
        """
        hessian = np.atleast_2d(np.asarray(hessian, dtype=float))
        size = hessian.shape[0]

        if hessian.shape != (size, size):
            raise DimensionMismatch('The Hessian must be square, got {}'.format(hessian.shape))

        gradient = _as_vector(gradient, size, 'gradient')

        A_in, b_in = _as_rows(A_in, b_in, size, 'A_in')
        A_eq, b_eq = _as_rows(A_eq, b_eq, size, 'A_eq')

        n_eq = A_eq.shape[0]
        n_in = A_in.shape[0]

        # every row is stored as n^T x >= c (equalities as n^T x = c), normalized to unit length
        N = np.vstack([A_eq, -A_in])
        c = np.concatenate([b_eq, -b_in])

        norms = np.linalg.norm(N, axis=1)
        scale = np.where(norms > 0, norms, 1.0)

        N = N / scale[:, None]
        c = c / scale

        self.factorize(hessian)

        factors = _ActiveFactors(self._inverse)

        x = -factors.J @ (factors.J.T @ gradient)

        active = []
        u = np.zeros(0)

        for p in range(n_eq):
            d, z, r = factors.directions(N[p])
            free = d[factors.rank:]

            s_p = N[p] @ x - c[p]

            if np.linalg.norm(free) <= DEPENDENCE * np.linalg.norm(d):
                if abs(s_p) > 1e3 * self.tolerance:
                    raise Infeasible('The equality constraints are inconsistent (residual {})'.format(abs(s_p)))

                continue

            # signed full step onto the equality
            t = -s_p / (free @ free)

            x = x + t * z
            u = np.append(u - t * r, t)

            active.append(p)
            factors.add(d)

        iterations = 0

        while n_in:
            slack = N[n_eq:] @ x - c[n_eq:]
            slack[np.array([index - n_eq for index in active if index >= n_eq], dtype=int)] = np.inf

            if np.min(slack) >= -self.tolerance:
                break

            p = n_eq + int(np.argmin(slack))
            u_p = 0.0

            while True:
                iterations += 1

                if iterations > self.max_iterations:
                    raise IterationLimit('The active-set QP exceeded {} iterations'.format(self.max_iterations))

                d, z, r = factors.directions(N[p])
                free = d[factors.rank:]

                t1, blocking = _blocking(active, u, r, n_eq)

                if np.linalg.norm(free) <= DEPENDENCE * np.linalg.norm(d):
                    # row p depends on the active rows: dual step only
                    if blocking is None:
                        raise Infeasible('Constraint {} cannot be satisfied together with the active set'.format(
                            p - n_eq
                        ))

                    u = u - t1 * r
                    u_p += t1

                    del active[blocking]
                    u = np.delete(u, blocking)
                    factors.drop(blocking)

                    continue

                t2 = max(-(N[p] @ x - c[p]) / (free @ free), 0.0)

                if t2 <= t1:
                    x = x + t2 * z
                    u = np.append(u - t2 * r, u_p + t2)

                    active.append(p)
                    factors.add(d)

                    break

                x = x + t1 * z
                u = u - t1 * r
                u_p += t1

                del active[blocking]
                u = np.delete(u, blocking)
                factors.drop(blocking)

        multipliers = np.zeros(N.shape[0])

        for index, value in zip(active, u):
            multipliers[index] = value

        # back to the caller's row scaling and sign convention
        multipliers = multipliers / scale

        return QpSolution(
            x=x,
            objective=float(0.5 * x @ hessian @ x + gradient @ x),
            active=tuple(sorted(index - n_eq for index in active if index >= n_eq)),
            multipliers_in=multipliers[n_eq:],
            multipliers_eq=-multipliers[:n_eq],
            iterations=iterations,
            backend='active-set',
        )


def _solve_with_qpsolvers(hessian, gradient, A_in, b_in, A_eq, b_eq):
    try:
        from qpsolvers import solve_qp as qpsolvers_solve_qp
    except ImportError:
        raise ImportError('The quadprog backend requires the qpsolvers package (pip install qpsolvers[quadprog])')

    size = hessian.shape[0]

    A_in, b_in = _as_rows(A_in, b_in, size, 'A_in')
    A_eq, b_eq = _as_rows(A_eq, b_eq, size, 'A_eq')

    x = qpsolvers_solve_qp(
        hessian,
        gradient,
        G=A_in if A_in.shape[0] else None,
        h=b_in if A_in.shape[0] else None,
        A=A_eq if A_eq.shape[0] else None,
        b=b_eq if A_eq.shape[0] else None,
        solver='quadprog',
    )

    if x is None:
        raise Infeasible('quadprog did not return a solution')

    active = tuple(int(i) for i in np.flatnonzero(np.abs(A_in @ x - b_in) < 1e-8))

    return QpSolution(
        x=np.asarray(x, dtype=float),
        objective=float(0.5 * x @ hessian @ x + gradient @ x),
        active=active,
        multipliers_in=np.zeros(A_in.shape[0]),
        multipliers_eq=np.zeros(A_eq.shape[0]),
        iterations=0,
        backend='quadprog',
    )


def solve_qp(hessian, gradient, A_in=None, b_in=None, A_eq=None, b_eq=None, backend='active-set', solver=None):
    """
    Solves minimize 1/2 x^T H x + q^T x subject to A_in x <= b_in and A_eq x = b_eq.

    .. code-block:: python

        from strider.ops import solve_qp

        # minimize (x1 - 1)^2 + (x2 - 2)^2 subject to x1 + x2 = 1
        solution = solve_qp(2 * np.eye(2), [-2.0, -4.0], A_eq=[[1.0, 1.0]], b_eq=[1.0])

        solution.x  # array([0., 1.])

    :param hessian: H
    :param gradient: q
    :param A_in: inequality rows
    :param b_in: inequality right-hand sides
    :param A_eq: equality rows
    :param b_eq: equality right-hand sides
    :param backend: 'active-set' (built-in dual active-set method) or 'quadprog' (through qpsolvers)
    :type backend: str
    :param solver: ActiveSetQP instance whose workspace is reused, a fresh one is created when omitted
    :type solver: ActiveSetQP
    :return: QpSolution
    """
    hessian = np.atleast_2d(np.asarray(hessian, dtype=float))
    gradient = np.asarray(gradient, dtype=float).reshape(-1)

    if backend == 'active-set':
        solver = solver if solver is not None else ActiveSetQP()

        return solver.solve(hessian, gradient, A_in, b_in, A_eq, b_eq)

    if backend == 'quadprog':
        return _solve_with_qpsolvers(hessian, gradient, A_in, b_in, A_eq, b_eq)

    raise ValueError('Unknown QP backend {}'.format(backend))
