import numpy as np
import uuid

from strider.gait import TIME_TOLERANCE, build_mapping, build_references
from strider.models import ModelParams, build_prediction
from strider.nmpc import Bounds, DecisionLayout, Weights, build_problem, nominal_warm_start, solve_problem, strategy
from strider.ops import ActiveSetQP, SqpSettings


TRAJECTORY_COLUMNS = (
    'time_s', 'cycle', 'support_side',
    'c_x', 'c_y', 'c_z', 'dc_x', 'dc_y', 'dc_z', 'ddc_x', 'ddc_y', 'ddc_z',
    'theta_r', 'theta_p', 'dtheta_r', 'dtheta_p', 'ddtheta_r', 'ddtheta_p',
    'jerk_c_x', 'jerk_c_y', 'jerk_c_z', 'jerk_theta_r', 'jerk_theta_p',
    'zmp_x', 'zmp_y', 'zmp_z',
    'support_x', 'support_y', 'support_z',
    'next_step_x', 'next_step_y', 'next_step_z',
    'swing_x', 'swing_y', 'swing_z',
    'torque_roll', 'torque_pitch',
    'force_x', 'force_y',
    'vertical_load',
    'sqp_iterations', 'termination', 'solve_time_s', 'relaxed', 'qcqp_violation', 'zmp_violation_m',
    'step_event',
)


class TrajectoryLog:
    """
    One record per control tick, stored as rows of floats in the order of columns. Support sides are stored as
    +1 (left) and -1 (right), flags as 0 and 1.

    .. code-block:: python

        from strider.utils.workflows import TrajectoryLog

        log = TrajectoryLog()

        log.column('c_z')  # CoM height of every tick

    """
    def __init__(self, columns=TRAJECTORY_COLUMNS):
        self.columns = tuple(columns)
        self.rows = []

    def __len__(self):
        return len(self.rows)

    def append(self, record):
        missing = [column for column in self.columns if column not in record]

        if missing:
            raise ValueError('Trajectory record misses the columns {}'.format(missing))

        if self.rows and float(record['time_s']) <= self.rows[-1][0]:
            raise ValueError('Trajectory records must have increasing timestamps')

        self.rows.append([float(record[column]) for column in self.columns])

    def column(self, name):
        index = self.columns.index(name)

        return np.array([row[index] for row in self.rows])

    def as_array(self):
        return np.array(self.rows, dtype=float).reshape(-1, len(self.columns))


class EpisodeDataAggregator:
    """
    Collects the tick records of one episode into a TrajectoryLog and summarizes them when the episode ends.

    .. code-block:: python

        with EpisodeDataAggregator(workflow.id) as ea:
            for record in records:
                ea(record)

        ea.episode_data['max_zmp_violation_m']

    """
    def __init__(self, workflow_id):
        self.workflow_id = workflow_id

    def __enter__(self):
        self.log = TrajectoryLog()
        self.episode_data = {}

        return self

    def __call__(self, record):
        self.log.append(record)

    def __exit__(self, *args, **kwargs):
        if any([isinstance(x, Exception) for x in args]):
            return

        self.episode_data['log'] = self.log
        self.episode_data['ticks'] = len(self.log)

        if len(self.log) == 0:
            self.episode_data.update({
                'duration_s': 0.0,
                'max_zmp_violation_m': 0.0,
                'max_qcqp_violation': 0.0,
                'mean_sqp_iterations': 0.0,
                'mean_solve_time_s': 0.0,
                'relaxed_ticks': 0,
                'steps': 0,
                'min_vertical_load': None,
            })

            return

        self.episode_data.update({
            'duration_s': float(self.log.column('time_s')[-1]),
            'max_zmp_violation_m': float(np.max(self.log.column('zmp_violation_m'))),
            'max_qcqp_violation': float(np.max(self.log.column('qcqp_violation'))),
            'mean_sqp_iterations': float(np.mean(self.log.column('sqp_iterations'))),
            'mean_solve_time_s': float(np.mean(self.log.column('solve_time_s'))),
            'relaxed_ticks': int(np.sum(self.log.column('relaxed'))),
            'steps': int(np.sum(self.log.column('step_event'))),
            'min_vertical_load': float(np.min(self.log.column('vertical_load'))),
        })


class GenericWorkflow:
    """
    The generic workflow is the receding-horizon controller: called on the current state and footstep plan it
    builds the references and the QCQP of the tick and solves it by SQP. It serves as base class of the episode
    workflow, which closes the loop around a simulated plant.
    """
    def __init__(self, params=None, weights=None, bounds=None, toggles=None, settings=None, dt_mpc=0.05, horizon=31,
                 future_steps=2, dt_ctrl=0.005, overrides=None):
        """
        .. code-block:: python

            from strider.utils.workflows import GenericWorkflow

            workflow = GenericWorkflow(ModelParams(), toggles=strategy(3))

            solution, problem, references = workflow(state, plan, time=0.0)

        :param params: model parameters
        :type params: ModelParams
        :param weights: cost weights
        :type weights: Weights
        :param bounds: feasibility bounds
        :type bounds: Bounds
        :param toggles: enabled balance strategies, strategy 3 when omitted
        :type toggles: StrategyToggles
        :param settings: SQP settings
        :type settings: SqpSettings
        :param dt_mpc: horizon sample spacing in s
        :type dt_mpc: float
        :param horizon: number of horizon samples N_h
        :type horizon: int
        :param future_steps: number of optimized future steps N_f
        :type future_steps: int
        :param dt_ctrl: control tick in s
        :type dt_ctrl: float
        :param overrides: reference profiles over absolute time
        :type overrides: ReferenceOverrides
        """
        self.params = params if params is not None else ModelParams()
        self.weights = weights if weights is not None else Weights()
        self.bounds = bounds if bounds is not None else Bounds()
        self.toggles = toggles if toggles is not None else strategy(3)
        self.settings = settings if settings is not None else SqpSettings()

        self.dt_mpc = dt_mpc
        self.dt_ctrl = dt_ctrl
        self.overrides = overrides

        self.prediction = build_prediction(dt_mpc, horizon)
        self.layout = DecisionLayout(horizon, future_steps)

        self.solver = ActiveSetQP(max_iterations=self.settings.qp_max_iterations)

        self.id = uuid.uuid4()

    def __call__(self, state, plan, time=0.0, previous_next_step=None, warm_start=None):
        """
        Solves the NMPC problem of one tick.

        :param state: current pendulum state
        :type state: PendulumState
        :param plan: current footstep plan
        :type plan: FootstepPlan
        :param time: absolute time of the tick in s
        :type time: float
        :param previous_next_step: next step solved at the previous tick of the cycle, the reference when omitted
        :type previous_next_step: array of shape (3,)
        :param warm_start: initial decision vector, zero jerks and reference steps when omitted
        :type warm_start: numpy.ndarray

        :return: tuple containing the NmpcSolution, the QcqpProblem and the ReferenceBundle
        """
        mapping = build_mapping(plan, self.dt_mpc, self.layout.horizon, self.layout.future_steps)

        references = build_references(plan, mapping, self.params.height_ref, self.overrides, time)

        problem = build_problem(state, plan, references, mapping, self.weights, self.bounds, self.toggles,
                                self.prediction, self.params, previous_next_step=previous_next_step,
                                dt_ctrl=self.dt_ctrl, tick_zmp=self.tick_zmp(plan))

        if warm_start is None:
            warm_start = nominal_warm_start(self.layout, references)

        solution = solve_problem(problem, self.layout, warm_start, self.settings, self.solver)

        return solution, problem, references

    def tick_zmp(self, plan):
        """
        Whether the ZMP reached one control tick ahead is bounded around the current support foot. This holds when
        the control tick is shorter than the horizon spacing and the tick ends outside the transfer windows, i.e.
        more than dt_mpc after the last rollover and more than dt_mpc before the next one.

        :param plan: current footstep plan
        :type plan: FootstepPlan
        :return: bool
        """
        if self.dt_ctrl >= self.dt_mpc - TIME_TOLERANCE:
            return False

        if plan.cycle > 0 and plan.elapsed + self.dt_ctrl <= self.dt_mpc + TIME_TOLERANCE:
            return False

        return plan.remaining - self.dt_ctrl > self.dt_mpc + TIME_TOLERANCE
