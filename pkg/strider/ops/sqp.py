import logging
import time
import numpy as np

from dataclasses import dataclass

from strider.ops.qcqp import linearize, _as_vector
from strider.ops.qp import ActiveSetQP, Infeasible, solve_qp


# largest per-channel increment treated as no change
HELD_INCREMENT = 1e-12


@dataclass(frozen=True)
class SqpSettings:
    """
    :param epsilon: increment threshold of the termination rule
    :param max_iterations: maximal number of SQP iterations N_s
    :param qp_max_iterations: active-set iteration cap of the inner QP
    :param backend: inner QP backend, 'active-set' or 'quadprog'
    :param relax_on_infeasible: when the inner QP is infeasible, re-solve it once with slack on the quadratic rows
    :param relaxation_weight: L1 penalty on the slack variables
    """
    epsilon: float = 5e-8
    max_iterations: int = 3
    qp_max_iterations: int = 2000
    backend: str = 'active-set'
    relax_on_infeasible: bool = False
    relaxation_weight: float = 1e6

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError('The SQP threshold epsilon must be positive, got {}'.format(self.epsilon))

        if self.max_iterations < 1:
            raise ValueError('The SQP needs at least one iteration, got {}'.format(self.max_iterations))

        if self.qp_max_iterations < 1:
            raise ValueError('The QP iteration cap must be at least 1, got {}'.format(self.qp_max_iterations))

        if self.backend not in ('active-set', 'quadprog'):
            raise ValueError('Unknown QP backend {}'.format(self.backend))


@dataclass(frozen=True, eq=False)
class SqpReport:
    """
    Diagnostics of one SQP solve.

    increments holds, per iteration, the vector of per-channel maxima of |Delta|. termination holds, per
    iteration, the value compared against epsilon: the minimum of that vector over the channels that are not
    pinned by equality rows and did move (see termination_value).
    """
    iterations: int
    increments: tuple
    termination: tuple
    converged: bool
    qp_status: tuple
    qp_iterations: tuple
    violations: tuple
    relaxed: bool
    solve_time: float

    @property
    def final_termination(self):
        return self.termination[-1]


def channel_maxima(problem, delta):
    return np.array([np.max(np.abs(delta[part])) if part.stop > part.start else 0.0
                     for _, part in problem.channel_slices()])


def termination_value(problem, maxima):
    """
    Smallest per-channel increment over the channels that moved: channels pinned by equality rows and channels
    whose increment is numerically zero (at most HELD_INCREMENT, e.g. held against a bound or not excited) are
    left out. When no channel moved the value is 0.
    """
    moving = [value for (name, _, _), value in zip(problem.channels, maxima)
              if name not in problem.pinned_channels and value > HELD_INCREMENT]

    if not moving:
        return 0.0

    return float(np.min(moving))


def _solve_relaxed(qp, settings, solver):
    """
    Re-solves a linearized QP with a nonnegative slack on every row coming from a quadratic constraint. The slack
    carries an L1 penalty plus a unit quadratic term that keeps the Hessian positive definite.
    """
    size = qp.hessian.shape[0]
    slacks = qp.quadratic_rows

    hessian = np.zeros((size + slacks, size + slacks))
    hessian[:size, :size] = qp.hessian
    hessian[size:, size:] = np.eye(slacks)

    gradient = np.concatenate([qp.gradient, settings.relaxation_weight * np.ones(slacks)])

    A_in = np.zeros((qp.A_in.shape[0] + slacks, size + slacks))
    A_in[:qp.A_in.shape[0], :size] = qp.A_in
    A_in[:slacks, size:] = -np.eye(slacks)
    A_in[qp.A_in.shape[0]:, size:] = -np.eye(slacks)

    b_in = np.concatenate([qp.b_in, np.zeros(slacks)])

    A_eq = np.zeros((qp.A_eq.shape[0], size + slacks))
    A_eq[:, :size] = qp.A_eq

    solution = solve_qp(hessian, gradient, A_in, b_in, A_eq, qp.b_eq, backend=settings.backend, solver=solver)

    return solution.x[:size], solution


def solve_sqp(problem, X0, settings=None, solver=None):
    """
    Sequential quadratic programming on a QcqpProblem. Every iteration linearizes the quadratic constraints at
    the current iterate, solves the local QP for the increment Delta and takes the full step X <- X + Delta.
    Iterations stop when the smallest per-channel maximum of |Delta| drops to epsilon or after max_iterations.

    .. code-block:: python

        from strider.ops import solve_sqp, SqpSettings

        X, report = solve_sqp(problem, X0, SqpSettings(epsilon=5e-8, max_iterations=3))

    :param problem: problem to solve
    :type problem: QcqpProblem
    :param X0: warm start
    :type X0: numpy.ndarray
    :param settings: SQP settings, defaults when omitted
    :type settings: SqpSettings
    :param solver: active-set workspace reused across inner QPs
    :type solver: ActiveSetQP
    :return: tuple (X, SqpReport)
    """
    settings = settings if settings is not None else SqpSettings()
    solver = solver if solver is not None else ActiveSetQP(max_iterations=settings.qp_max_iterations)

    X = np.array(_as_vector(X0, problem.size, 'X0'))

    increments = []
    termination = []
    qp_status = []
    qp_iterations = []
    violations = []

    relaxed = False
    converged = False

    start = time.perf_counter()

    for iteration in range(settings.max_iterations):
        qp = linearize(problem, X)

        try:
            solution = solve_qp(qp.hessian, qp.gradient, qp.A_in, qp.b_in, qp.A_eq, qp.b_eq,
                                backend=settings.backend, solver=solver)
            delta = solution.x
            qp_status.append('optimal')
        except Infeasible:
            if not settings.relax_on_infeasible:
                raise

            logging.warning('WARNING: Infeasible SQP subproblem at iteration {}, relaxing quadratic rows'.format(
                iteration + 1
            ))

            delta, solution = _solve_relaxed(qp, settings, solver)
            qp_status.append('relaxed')
            relaxed = True

        qp_iterations.append(solution.iterations)

        X = X + delta

        maxima = channel_maxima(problem, delta)

        increments.append(maxima)
        termination.append(termination_value(problem, maxima))
        violations.append(problem.max_violation(X))

        if termination[-1] <= settings.epsilon:
            converged = True
            break

    solve_time = time.perf_counter() - start

    logging.debug('DEBUG: SQP finished after {} iterations, min(F) = {}, violation = {}'.format(
        len(increments), termination[-1], violations[-1]
    ))

    return X, SqpReport(
        iterations=len(increments),
        increments=tuple(increments),
        termination=tuple(termination),
        converged=converged,
        qp_status=tuple(qp_status),
        qp_iterations=tuple(qp_iterations),
        violations=tuple(violations),
        relaxed=relaxed,
        solve_time=solve_time,
    )


def shift_warm_start(X, horizon, future_steps, shift=1, rollover=False, step_fill=None):
    """
    Receding-horizon warm start. Each of the five jerk blocks is shifted forward by shift samples with its last
    sample duplicated. Step blocks are carried over unchanged, except at a cycle rollover where the first future
    step has become the support foot: the blocks are then shifted by one step and the freed slot takes step_fill.

    :param X: previous decision vector
    :type X: numpy.ndarray
    :param horizon: number of horizon samples N_h
    :type horizon: int
    :param future_steps: number of future steps N_f
    :type future_steps: int
    :param shift: number of horizon samples elapsed since the previous solve
    :type shift: int
    :param rollover: whether a cycle rollover happened since the previous solve
    :type rollover: bool
    :param step_fill: value for the freed last slot of each step block (x, y, z), defaults to the last value
    :type step_fill: array of shape (3,)
    :return: the warm start
    """
    X = _as_vector(X, 5 * horizon + 3 * future_steps, 'X')

    jerks = X[:5 * horizon].reshape(5, horizon)
    steps = X[5 * horizon:].reshape(3, future_steps)

    shift = int(min(max(shift, 0), horizon))

    if shift:
        jerks = np.hstack([jerks[:, shift:], np.repeat(jerks[:, -1:], shift, axis=1)])

    if rollover:
        fill = steps[:, -1] if step_fill is None else np.asarray(step_fill, dtype=float)
        steps = np.hstack([steps[:, 1:], fill[:, None]])

    return np.concatenate([jerks.reshape(-1), steps.reshape(-1)])
