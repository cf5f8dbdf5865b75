import numpy as np

from dataclasses import dataclass

from strider.nmpc.constraints import assemble_linear_constraints, assemble_tick_zmp_constraints, \
    assemble_zmp_constraints, pinned_channels
from strider.nmpc.layout import DecisionLayout
from strider.nmpc.objective import assemble_objective, objective_offset
from strider.ops.qcqp import QcqpProblem
from strider.ops.sqp import solve_sqp


def build_problem(state, plan, references, mapping, weights, bounds, toggles, prediction, params,
                  previous_next_step=None, dt_ctrl=0.005, tick_zmp=False):
    """
    Builds the QCQP of one control tick: the expanded tracking objective, 4 N_h quadratic ZMP constraints and
    the linear rows of the step, height, angle, torque and strategy constraints. The decision vector holds the
    five jerk blocks followed by the three step blocks. With tick_zmp, four more quadratic constraints bound the
    ZMP one control tick ahead around the current support foot.

    .. code-block:: python

        from strider.nmpc import build_problem

        problem = build_problem(state, plan, references, mapping, Weights(), Bounds(), strategy(3), prediction,
                                ModelParams())

        problem.size  # 161 for N_h = 31 and N_f = 2

    :param state: current pendulum state
    :type state: PendulumState
    :param plan: footstep plan of the tick
    :type plan: FootstepPlan
    :param references: references of the tick
    :type references: ReferenceBundle
    :param mapping: horizon mapping of the tick
    :type mapping: HorizonMapping
    :param weights: cost weights
    :type weights: Weights
    :param bounds: feasibility bounds
    :type bounds: Bounds
    :param toggles: enabled balance strategies
    :type toggles: StrategyToggles
    :param prediction: prediction matrices of the horizon
    :type prediction: PredictionMatrices
    :param params: model parameters
    :type params: ModelParams
    :param previous_next_step: next step location solved at the previous tick of the same cycle
    :type previous_next_step: array of shape (3,)
    :param dt_ctrl: control tick in s
    :type dt_ctrl: float
    :param tick_zmp: whether to add the ZMP constraints of the next control tick
    :type tick_zmp: bool
    :return: QcqpProblem
    """
    layout = DecisionLayout(prediction.horizon, mapping.future_steps)

    G, g = assemble_objective(state, references, mapping, weights, prediction)

    quadratic = assemble_zmp_constraints(state, mapping, plan, bounds, prediction, params)

    if tick_zmp:
        quadratic += assemble_tick_zmp_constraints(state, plan, layout, bounds, params, dt_ctrl)

    rows = assemble_linear_constraints(state, plan, mapping, bounds, prediction, toggles, params, references,
                                       previous_next_step=previous_next_step, dt_ctrl=dt_ctrl)

    return QcqpProblem(
        G=G,
        g=g,
        quad_constraints=quadratic,
        A_in=rows.A_in,
        b_in=rows.b_in,
        A_eq=rows.A_eq,
        b_eq=rows.b_eq,
        channels=layout.channels(),
        pinned_channels=pinned_channels(toggles),
        offset=objective_offset(state, references, weights, prediction),
    )


@dataclass(frozen=True, eq=False)
class NmpcSolution:
    """
    Solved decision vector of one tick split into jerks (5, N_h) and future steps (3, N_f), plus the SQP report.
    """
    X: np.ndarray
    jerks: np.ndarray
    steps: np.ndarray
    report: object

    @property
    def next_step(self):
        return np.array(self.steps[:, 0])

    @property
    def first_jerks(self):
        return np.array(self.jerks[:, 0])


def nominal_warm_start(layout, references):
    """
    Zero jerks with every future step on its reference.
    """
    return layout.compose(np.zeros((5, layout.horizon)), references.steps)


def solve_problem(problem, layout, X0, settings=None, solver=None):
    """
    Runs the SQP on a tick problem and splits the result along the decision layout.

    :return: NmpcSolution
    """
    X, report = solve_sqp(problem, X0, settings=settings, solver=solver)

    return NmpcSolution(X=X, jerks=layout.jerks(X), steps=layout.steps(X), report=report)
