import logging
import numpy as np

from dataclasses import dataclass, asdict
from scipy.optimize import minimize_scalar

from strider import STRIDER_END_EPISODE_EVENT, STRIDER_END_TICK_EVENT, STRIDER_STEP_EVENT
from strider.gait import (
    FootstepPlan,
    HorizonOverrun,
    TIME_TOLERANCE,
    advance,
    other_side,
    side_sign,
    swing_foot_trajectory,
)
from strider.models import DegenerateDynamics, PendulumState, zmp
from strider.ops import Infeasible, IterationLimit, shift_warm_start
from strider.utils import merge_two_dicts
from strider.utils.workflows.workflows import GenericWorkflow, EpisodeDataAggregator

from pydispatch import dispatcher


STEP_RATE_MEMORIES = ('reference', 'carry')

COMPLETED = 'completed'
FALLEN = 'fallen'
SOLVER_FAILED = 'solver_failed'


@dataclass(frozen=True)
class Disturbance:
    """
    External force applied at the pelvis, i.e. at the CoM, over [start, start + duration).

    :param start: start time in s
    :param duration: duration in s
    :param force_x: forward force in N
    :param force_y: lateral force in N
    """
    start: float
    duration: float
    force_x: float = 0.0
    force_y: float = 0.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError('The disturbance duration must be positive, got {}'.format(self.duration))

    def active(self, time):
        return self.start - TIME_TOLERANCE <= time < self.start + self.duration - TIME_TOLERANCE

    @property
    def force(self):
        return np.array([self.force_x, self.force_y])

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SimConfig:
    """
    Closed-loop simulation settings.

    :param dt_ctrl: control tick, the NMPC is re-solved every tick, in s
    :param dt_mpc: horizon sample spacing in s
    :param horizon: number of horizon samples N_h
    :param future_steps: number of optimized future steps N_f
    :param total_time: simulated time in s
    :param zmp_margin: tolerated distance of the realized ZMP outside the foot box in m
    :param violation_ticks: consecutive ticks beyond the margin after which the robot has fallen
    :param divergence_bound: largest horizontal CoM to support distance in m
    :param swing_apex: swing foot clearance in m
    :param step_rate_memory: previous next step of the step rate rows after a rollover, 'carry' (the step solved
        before the rollover) or 'reference' (the new reference step); either is clipped into the step range
        around the new support foot
    """
    dt_ctrl: float = 0.005
    dt_mpc: float = 0.05
    horizon: int = 31
    future_steps: int = 2
    total_time: float = 4.0
    zmp_margin: float = 0.005
    violation_ticks: int = 3
    divergence_bound: float = 0.5
    swing_apex: float = 0.05
    step_rate_memory: str = 'carry'

    def __post_init__(self):
        if not self.dt_ctrl > 0 or not self.dt_mpc > 0:
            raise ValueError('Time steps must be positive, got dt_ctrl {} and dt_mpc {}'.format(
                self.dt_ctrl, self.dt_mpc
            ))

        if self.dt_ctrl > self.dt_mpc + TIME_TOLERANCE:
            raise ValueError('The control tick ({}) must not exceed the horizon spacing ({})'.format(
                self.dt_ctrl, self.dt_mpc
            ))

        if self.horizon < 1 or self.future_steps < 1:
            raise ValueError('The horizon and the future step count must be positive')

        if not self.total_time > 0:
            raise ValueError('The simulated time must be positive, got {}'.format(self.total_time))

        if self.zmp_margin < 0 or self.violation_ticks < 1 or not self.divergence_bound > 0:
            raise ValueError('Invalid failure thresholds')

        if self.step_rate_memory not in STEP_RATE_MEMORIES:
            raise ValueError('The step rate memory must be one of {}, got {}'.format(
                STEP_RATE_MEMORIES, self.step_rate_memory
            ))

    @property
    def ticks(self):
        return int(round(self.total_time / self.dt_ctrl))

    @property
    def shift(self):
        """
        Whole horizon samples elapsed per control tick, used to shift the warm start.
        """
        return int(np.floor(self.dt_ctrl / self.dt_mpc + TIME_TOLERANCE))

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EpisodeOutcome:
    """
    Completed, Fallen(t) or SolverFailed(t).
    """
    kind: str
    time: float = None
    reason: str = ''

    def __str__(self):
        if self.kind == COMPLETED:
            return 'Completed'

        name = 'Fallen' if self.kind == FALLEN else 'SolverFailed'

        return '{}({:.3f})'.format(name, self.time)

    @property
    def completed(self):
        return self.kind == COMPLETED

    def as_dict(self):
        return {'kind': self.kind, 'label': str(self), 'time_s': self.time, 'reason': self.reason}


def apply_disturbances(state, disturbances, time, dt, mass):
    """
    Adds the effect of the forces active at time over one tick to the CoM: F dt / m to the horizontal velocity
    and F dt^2 / (2 m) to the horizontal position. The stored accelerations are those commanded by the
    controller and are left untouched.

    :return: tuple of the pushed PendulumState and the applied force (F_x, F_y)
    """
    force = np.zeros(2)

    for disturbance in disturbances:
        if disturbance.active(time):
            force += disturbance.force

    if not np.any(force):
        return state, force

    acceleration = force / mass

    data = np.array(state.data)
    data[0:2, 0] += 0.5 * acceleration * dt ** 2
    data[0:2, 1] += acceleration * dt

    return PendulumState(data), force


def box_violation(point, support, bounds):
    """
    Distance by which a ZMP lies outside the foot box around support, 0 inside.
    """
    relative = np.asarray(point[:2], dtype=float) - np.asarray(support[:2], dtype=float)

    lows = np.array([bounds.zmp_x[0], bounds.zmp_y[0]])
    highs = np.array([bounds.zmp_x[1], bounds.zmp_y[1]])

    return float(np.max(np.maximum(np.maximum(lows - relative, relative - highs), 0.0)))


def transfer_violation(point, first, second, bounds):
    """
    Distance by which a ZMP lies outside the convex hull of the foot boxes around two support locations. The hull
    is the union of the boxes around first + s (second - first), s in [0, 1], so the distance is minimized over s.
    """
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)

    def violation(s):
        return box_violation(point, first + s * (second - first), bounds)

    result = minimize_scalar(violation, bounds=(0.0, 1.0), method='bounded', options={'xatol': 1e-10})

    return float(min(violation(0.0), violation(1.0), violation(result.x)))


def initial_swing_foot(plan):
    """
    The non-supporting foot at start, placed next to the initial support foot at the width of the first step.
    """
    return plan.origin + np.array([0.0, -side_sign(plan.origin_side) * plan.spec(1).width, 0.0])


class Episode(GenericWorkflow):
    """
    The episode workflow simulates one closed-loop walking episode at pendulum level. Every control tick the NMPC
    is solved, the first jerk of every channel drives the plant over the tick, the active pushes are added and
    the footstep plan moves forward, the solved next step becoming the support foot at a cycle rollover. The
    plant is the triple integrator of the prediction model.

    PyDispatch events are emitted at the end of every tick (STRIDER_END_TICK_EVENT), at every step
    (STRIDER_STEP_EVENT) and at the end of the episode (STRIDER_END_EPISODE_EVENT), so that logs and exports are
    produced by hooks.
    """
    def __init__(self, scenario, weights=None, bounds=None, toggles=None, settings=None):
        """
        .. code-block:: python

            from strider.utils.workflows import Episode

            episode = Episode(scenario, toggles=strategy(1))

            log, outcome = episode.run()

        :param scenario: the scenario to simulate
        :type scenario: ScenarioFile
        :param weights: cost weights replacing those of the scenario
        :type weights: Weights
        :param bounds: bounds replacing those of the scenario
        :type bounds: Bounds
        :param toggles: strategy toggles replacing those of the scenario
        :type toggles: StrategyToggles
        :param settings: SQP settings replacing those of the scenario
        :type settings: SqpSettings
        """
        sim = scenario.sim

        super(Episode, self).__init__(
            params=scenario.model,
            weights=weights if weights is not None else scenario.weights,
            bounds=bounds if bounds is not None else scenario.bounds,
            toggles=toggles if toggles is not None else scenario.toggles,
            settings=settings if settings is not None else scenario.sqp,
            dt_mpc=sim.dt_mpc,
            horizon=sim.horizon,
            future_steps=sim.future_steps,
            dt_ctrl=sim.dt_ctrl,
            overrides=scenario.overrides,
        )

        self.scenario = scenario
        self.sim = sim

        self.summary = None

        self.episode_aggregator = EpisodeDataAggregator(self.id)

    def window_violation(self, point, plan, previous_support, next_step):
        """
        ZMP violation with the transfer window: within dt_mpc after a rollover the hull of the previous and the
        current foot boxes is admissible, within dt_mpc before a rollover the hull of the current and the next.
        """
        if previous_support is not None and plan.elapsed <= self.sim.dt_mpc + TIME_TOLERANCE:
            return transfer_violation(point, previous_support, plan.support, self.bounds)

        if plan.remaining <= self.sim.dt_mpc + TIME_TOLERANCE:
            return transfer_violation(point, plan.support, next_step, self.bounds)

        return box_violation(point, plan.support, self.bounds)

    def run(self):
        """
        Runs the episode until the scenario time is over or a failure is detected.

        :return: tuple containing the TrajectoryLog and the EpisodeOutcome
        """
        scenario, sim = self.scenario, self.sim

        logging.info('INFO: Running episode {} with strategy {}'.format(scenario.name, self.toggles.number))

        plan = FootstepPlan.create(scenario.steps, scenario.origin, scenario.origin_side)
        state = PendulumState.at_rest(scenario.initial_com)

        swing_origin = initial_swing_foot(plan)

        previous_solution = None
        previous_next_step = None
        previous_support = None
        rollover = False

        consecutive_violations = 0

        outcome = EpisodeOutcome(COMPLETED)

        with self.episode_aggregator as ea:
            for tick in range(sim.ticks):
                time = tick * sim.dt_ctrl

                warm_start = None

                if previous_solution is not None:
                    warm_start = shift_warm_start(
                        previous_solution.X,
                        sim.horizon,
                        sim.future_steps,
                        shift=sim.shift,
                        rollover=rollover,
                        step_fill=plan.reference(plan.cycle + sim.future_steps),
                    )

                try:
                    solution, problem, references = self(state, plan, time, previous_next_step, warm_start)
                except (Infeasible, IterationLimit, HorizonOverrun, np.linalg.LinAlgError) as error:
                    logging.warning('WARNING: Solver failure at {:.3f} s: {}'.format(time, error))

                    outcome = EpisodeOutcome(SOLVER_FAILED, time, str(error))
                    break

                logging.debug('DEBUG: Episode {}, tick {}, SQP iterations {}'.format(
                    scenario.name, tick, solution.report.iterations
                ))

                state = state.integrate(solution.first_jerks, sim.dt_ctrl)
                state, force = apply_disturbances(state, scenario.disturbances, time, sim.dt_ctrl,
                                                  self.params.mass)

                next_step = solution.next_step

                swing = swing_foot_trajectory(swing_origin, next_step, plan.duration(plan.cycle), sim.swing_apex,
                                              plan.elapsed + sim.dt_ctrl)

                support_before = plan.support
                cycle_before = plan.cycle

                plan = advance(plan, sim.dt_ctrl, next_step)

                rollover = plan.cycle != cycle_before

                if rollover:
                    previous_support = support_before
                    swing_origin = support_before

                    if sim.step_rate_memory == 'carry' and sim.future_steps > 1:
                        previous_next_step = np.array(solution.steps[:, 1])
                    else:
                        previous_next_step = None

                    dispatcher.send(
                        message={'time': time + sim.dt_ctrl, 'cycle': plan.cycle, 'location': next_step,
                                 'side': other_side(plan.side)},
                        signal=STRIDER_STEP_EVENT,
                        sender=self.id
                    )
                else:
                    previous_next_step = next_step

                previous_solution = solution

                try:
                    point = zmp(state, plan.support[2], self.params)
                except DegenerateDynamics as error:
                    logging.warning('WARNING: Free fall at {:.3f} s'.format(time + sim.dt_ctrl))

                    outcome = EpisodeOutcome(FALLEN, time + sim.dt_ctrl, str(error))
                    break

                violation = self.window_violation(point, plan, previous_support, next_step)

                consecutive_violations = consecutive_violations + 1 if violation > sim.zmp_margin else 0

                record = self.record(time + sim.dt_ctrl, plan, state, solution, problem, point, swing, force,
                                     violation, rollover)

                ea(record)

                dispatcher.send(
                    message=merge_two_dicts(record, {'problem': problem, 'solution': solution,
                                                     'references': references}),
                    signal=STRIDER_END_TICK_EVENT,
                    sender=self.id
                )

                if consecutive_violations >= sim.violation_ticks:
                    logging.info('INFO: ZMP outside the foot box for {} ticks at {:.3f} s'.format(
                        consecutive_violations, time + sim.dt_ctrl
                    ))

                    outcome = EpisodeOutcome(FALLEN, time + sim.dt_ctrl, 'ZMP outside the support region')
                    break

                distance = float(np.linalg.norm(state.position[:2] - plan.support[:2]))

                if distance > sim.divergence_bound:
                    logging.info('INFO: CoM diverged from the support foot at {:.3f} s'.format(time + sim.dt_ctrl))

                    outcome = EpisodeOutcome(FALLEN, time + sim.dt_ctrl, 'CoM diverged from the support foot')
                    break

        self.summary = merge_two_dicts(ea.episode_data, {
            'name': scenario.name,
            'strategy': self.toggles.number,
            'toggles': self.toggles.as_dict(),
            'outcome': outcome.as_dict(),
            'failure_criterion': {
                'zmp_margin_m': sim.zmp_margin,
                'violation_ticks': sim.violation_ticks,
                'divergence_bound_m': sim.divergence_bound,
            },
        })

        logging.info('INFO: Episode {} finished: {}'.format(scenario.name, outcome))

        dispatcher.send(
            message=self.summary,
            signal=STRIDER_END_EPISODE_EVENT,
            sender=self.id
        )

        return ea.log, outcome

    def record(self, time, plan, state, solution, problem, point, swing, force, violation, rollover):
        data = state.data
        report = solution.report

        record = {
            'time_s': time,
            'cycle': plan.cycle,
            'support_side': side_sign(plan.side),
            'jerk_c_x': solution.first_jerks[0],
            'jerk_c_y': solution.first_jerks[1],
            'jerk_c_z': solution.first_jerks[2],
            'jerk_theta_r': solution.first_jerks[3],
            'jerk_theta_p': solution.first_jerks[4],
            'torque_roll': self.params.inertia_x * data[3, 2],
            'torque_pitch': self.params.inertia_y * data[4, 2],
            'force_x': force[0],
            'force_y': force[1],
            'vertical_load': self.params.gravity + data[2, 2],
            'sqp_iterations': report.iterations,
            'termination': report.final_termination,
            'solve_time_s': report.solve_time,
            'relaxed': float(report.relaxed),
            'qcqp_violation': problem.max_violation(solution.X),
            'zmp_violation_m': violation,
            'step_event': float(rollover),
        }

        for k, axis in enumerate(['x', 'y', 'z']):
            record['c_' + axis] = data[k, 0]
            record['dc_' + axis] = data[k, 1]
            record['ddc_' + axis] = data[k, 2]
            record['zmp_' + axis] = point[k]
            record['support_' + axis] = plan.support[k]
            record['next_step_' + axis] = solution.next_step[k]
            record['swing_' + axis] = swing[k]

        for k, angle in [(3, 'theta_r'), (4, 'theta_p')]:
            record[angle] = data[k, 0]
            record['d' + angle] = data[k, 1]
            record['dd' + angle] = data[k, 2]

        return record


def run_episode(scenario, weights=None, bounds=None, toggles=None, settings=None):
    """
    Runs one closed-loop episode.

    .. code-block:: python

        from strider.datasets import scenario_catalog
        from strider.utils.workflows import run_episode

        log, outcome = run_episode(scenario_catalog()['step-in-place-push'], toggles=strategy(1))

    :return: tuple containing the TrajectoryLog and the EpisodeOutcome
    """
    return Episode(scenario, weights, bounds, toggles, settings).run()
