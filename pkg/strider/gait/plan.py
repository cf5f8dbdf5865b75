import numpy as np

from dataclasses import dataclass, replace


LEFT = 'left'
RIGHT = 'right'

TIME_TOLERANCE = 1e-9


class HorizonOverrun(ValueError):
    """
    Raised when the future steps of the decision vector cannot cover the whole prediction horizon.
    """
    pass


def side_sign(side):
    """
    +1 for a left support foot, -1 for a right one. The next foot is placed on the opposite side.
    """
    if side == LEFT:
        return 1.0

    if side == RIGHT:
        return -1.0

    raise ValueError('A support side must be {} or {}, got {}'.format(LEFT, RIGHT, side))


def other_side(side):
    return RIGHT if side == LEFT else LEFT


@dataclass(frozen=True)
class StepSpec:
    """
    Relative parameters of one step.

    :param length: forward displacement with respect to the previous foot in m
    :param width: lateral distance between the two feet in m
    :param height: vertical displacement with respect to the previous foot in m
    :param duration: duration of the walking cycle in which this step is swung, in s
    """
    length: float
    width: float
    height: float = 0.0
    duration: float = 0.8

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError('The step duration must be positive, got {}'.format(self.duration))

        if self.width < 0:
            raise ValueError('The step width must not be negative, got {}'.format(self.width))


@dataclass(frozen=True, eq=False)
class FootstepPlan:
    """
    Footstep schedule plus the bookkeeping of the current support foot.

    Cycle 0 is spent on the initial support foot (origin). The step into cycle c >= 1 is described by
    specs[c - 1]; beyond the end of the list the last spec repeats. Reference locations are absolute and fixed
    once the plan is created: d_ref[c] = d_ref[c - 1] + (length, -sign(side[c - 1]) width, height), the support
    side alternating every cycle. The duration of cycle c is the duration of the step swung during it,
    specs[c].

    .. code-block:: python

        from strider.gait import FootstepPlan, StepSpec

        plan = FootstepPlan.create([StepSpec(0.15, 0.145, 0.0, 0.8)], origin=[0.0, 0.0725, 0.0], side='left')

        plan.reference(1)  # array([ 0.15  , -0.0725,  0.    ])

    """
    specs: tuple
    origin: np.ndarray
    origin_side: str = LEFT
    cycle: int = 0
    elapsed: float = 0.0
    support: np.ndarray = None

    def __post_init__(self):
        if len(self.specs) == 0:
            raise ValueError('A footstep plan needs at least one step specification')

        side_sign(self.origin_side)

        origin = np.array(self.origin, dtype=float)

        if origin.shape != (3,):
            raise ValueError('The initial support location must be a 3D point, got shape {}'.format(origin.shape))

        origin.setflags(write=False)

        support = origin if self.support is None else np.array(self.support, dtype=float)
        support.setflags(write=False)

        object.__setattr__(self, 'specs', tuple(self.specs))
        object.__setattr__(self, 'origin', origin)
        object.__setattr__(self, 'support', support)

    @classmethod
    def create(cls, specs, origin=(0.0, 0.0, 0.0), side=LEFT):
        return cls(specs=tuple(specs), origin=origin, origin_side=side)

    def spec(self, cycle):
        """
        Specification of the step that lands at the start of the given cycle (cycle >= 1).
        """
        if cycle < 1:
            raise ValueError('Cycle 0 is the initial stance and has no incoming step')

        return self.specs[min(cycle - 1, len(self.specs) - 1)]

    def side_of(self, cycle):
        return self.origin_side if cycle % 2 == 0 else other_side(self.origin_side)

    def reference(self, cycle):
        location = np.array(self.origin)

        for c in range(1, cycle + 1):
            spec = self.spec(c)
            location = location + np.array([
                spec.length,
                -side_sign(self.side_of(c - 1)) * spec.width,
                spec.height,
            ])

        return location

    def references(self, first, count):
        """
        Reference locations of cycles first, ..., first + count - 1 as an array of shape (count, 3).
        """
        return np.array([self.reference(first + i) for i in range(count)]).reshape(count, 3)

    def duration(self, cycle):
        return self.spec(cycle + 1).duration

    @property
    def side(self):
        return self.side_of(self.cycle)

    @property
    def remaining(self):
        return self.duration(self.cycle) - self.elapsed

    def cycle_start(self, cycle):
        """
        Absolute start time of a cycle, in s.
        """
        return float(sum(self.duration(c) for c in range(cycle)))


def advance(plan, dt_tick, realized_next_step):
    """
    Moves the plan forward by one control tick. At a cycle rollover the realized next step becomes the support
    foot and the support side alternates (through the cycle index).

    :param plan: current plan
    :type plan: FootstepPlan
    :param dt_tick: control tick in s
    :type dt_tick: float
    :param realized_next_step: location of the next step as last solved
    :type realized_next_step: array of shape (3,)
    :return: the advanced FootstepPlan
    """
    elapsed = plan.elapsed + dt_tick
    duration = plan.duration(plan.cycle)

    if elapsed < duration - TIME_TOLERANCE:
        return replace(plan, elapsed=elapsed)

    return replace(
        plan,
        cycle=plan.cycle + 1,
        elapsed=max(elapsed - duration, 0.0),
        support=np.array(realized_next_step, dtype=float),
    )


@dataclass(frozen=True, eq=False)
class HorizonMapping:
    """
    Assignment of every horizon sample to its support foot. current[i] = 1 when sample i + 1 lies in the current
    cycle, future[i, j] = 1 when it lies in the cycle of future step j + 1. The per-sample support location is
    current * d_hat + future @ D.
    """
    current: np.ndarray
    future: np.ndarray
    cycles: np.ndarray
    times: np.ndarray
    dt: float

    @property
    def horizon(self):
        return self.current.shape[0]

    @property
    def future_steps(self):
        return self.future.shape[1]

    def step_index(self):
        """
        Per sample, -1 for the current support foot, else the index of the future step.
        """
        index = np.full(self.horizon, -1, dtype=int)

        rows, columns = np.nonzero(self.future)
        index[rows] = columns

        return index

    def support_sequence(self, support, steps):
        """
        :param support: current support coordinate (one axis)
        :param steps: future step coordinates (one axis), length future_steps
        :return: per-sample support coordinate
        """
        return self.current * support + self.future @ np.asarray(steps, dtype=float)


def build_mapping(plan, dt, horizon, future_steps):
    """
    Builds the selection of the support foot of every horizon sample. Sample i, at time i dt from now, belongs to
    the current cycle while i dt does not exceed the remaining cycle time; otherwise it belongs to the future step
    whose cycle contains it, cycle boundaries following the per-cycle durations.

    .. code-block:: python

        from strider.gait import build_mapping

        mapping = build_mapping(plan, 0.05, 31, 2)

    :param plan: footstep plan
    :type plan: FootstepPlan
    :param dt: horizon sample spacing in s
    :type dt: float
    :param horizon: number of samples N_h
    :type horizon: int
    :param future_steps: number of future steps N_f
    :type future_steps: int
    :return: HorizonMapping
    """
    if not dt > 0:
        raise ValueError('The horizon sample spacing must be positive, got {}'.format(dt))

    times = dt * np.arange(1, horizon + 1)

    boundaries = [plan.remaining]

    while boundaries[-1] < times[-1] + TIME_TOLERANCE and len(boundaries) <= future_steps:
        boundaries.append(boundaries[-1] + plan.duration(plan.cycle + len(boundaries)))

    current = np.zeros(horizon)
    future = np.zeros((horizon, future_steps))
    cycles = np.zeros(horizon, dtype=int)

    for i, t in enumerate(times):
        step = int(np.sum(t > np.array(boundaries) + TIME_TOLERANCE))

        if step > future_steps:
            raise HorizonOverrun(
                'Sample {} at {:.4f} s needs future step {} but only {} future steps are optimized'.format(
                    i + 1, t, step, future_steps
                )
            )

        if step == 0:
            current[i] = 1.0
        else:
            future[i, step - 1] = 1.0

        cycles[i] = plan.cycle + step

    return HorizonMapping(current=current, future=future, cycles=cycles, times=times, dt=dt)
