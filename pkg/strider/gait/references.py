import numpy as np

from dataclasses import dataclass


def _profile(points, name):
    if points is None:
        return None

    points = np.array(points, dtype=float)

    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 1:
        raise ValueError('The {} profile must be a list of [time, value] pairs'.format(name))

    if np.any(np.diff(points[:, 0]) < 0):
        raise ValueError('The {} profile times must be non-decreasing'.format(name))

    points.setflags(write=False)

    return points


@dataclass(frozen=True, eq=False)
class ReferenceOverrides:
    """
    Piecewise-linear reference profiles over absolute time, given as [[t, value], ...]. Before the first and
    after the last point the profile holds its end value. height replaces the default pendulum height h_ref,
    pitch and roll replace the zero angle references.

    .. code-block:: python

        from strider.gait import ReferenceOverrides

        # lower the pendulum by 5 cm while pitching the body forward between 2 s and 3 s
        overrides = ReferenceOverrides(
            height=[[2.0, 0.467], [3.0, 0.417]],
            pitch=[[2.0, 0.0], [3.0, 0.1]],
        )

    """
    height: np.ndarray = None
    pitch: np.ndarray = None
    roll: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, 'height', _profile(self.height, 'height'))
        object.__setattr__(self, 'pitch', _profile(self.pitch, 'pitch'))
        object.__setattr__(self, 'roll', _profile(self.roll, 'roll'))

    @staticmethod
    def sample(profile, times, default):
        times = np.asarray(times, dtype=float)

        if profile is None:
            return np.full(times.shape, float(default))

        return np.interp(times, profile[:, 0], profile[:, 1])

    def as_dict(self):
        return {
            name: None if getattr(self, name) is None else getattr(self, name).tolist()
            for name in ['height', 'pitch', 'roll']
        }


@dataclass(frozen=True, eq=False)
class ReferenceBundle:
    """
    Per-sample references over the horizon (arrays of length N_h) and per-future-step references (arrays of
    length N_f). support_z holds the support height of every sample.
    """
    com_x: np.ndarray
    com_y: np.ndarray
    com_z: np.ndarray
    roll: np.ndarray
    pitch: np.ndarray
    step_x: np.ndarray
    step_y: np.ndarray
    step_z: np.ndarray
    support_z: np.ndarray

    @property
    def motion(self):
        """
        References of the five motion channels stacked as an array of shape (5, N_h).
        """
        return np.vstack([self.com_x, self.com_y, self.com_z, self.roll, self.pitch])

    @property
    def steps(self):
        """
        References of the three step channels stacked as an array of shape (3, N_f).
        """
        return np.vstack([self.step_x, self.step_y, self.step_z])


def build_references(plan, mapping, height_ref, overrides=None, time=0.0):
    """
    Builds the references of one control tick.

    The horizontal CoM reference of a sample is the midpoint between the support foot of its cycle and the step
    that follows it: the current support foot and the next reference step for samples of the current cycle, two
    consecutive reference steps for samples of future cycles. The CoM height reference is the pendulum height
    plus the support height of the sample. Angle references are zero unless overridden.

    .. code-block:: python

        from strider.gait import build_mapping, build_references

        mapping = build_mapping(plan, 0.05, 31, 2)
        references = build_references(plan, mapping, height_ref=0.467)

    :param plan: footstep plan
    :type plan: FootstepPlan
    :param mapping: horizon mapping of the same tick
    :type mapping: HorizonMapping
    :param height_ref: default pendulum height in m
    :type height_ref: float
    :param overrides: optional time-varying profiles
    :type overrides: ReferenceOverrides
    :param time: absolute time of the tick in s
    :type time: float
    :return: ReferenceBundle
    """
    overrides = overrides if overrides is not None else ReferenceOverrides()

    cycle = plan.cycle
    future_steps = mapping.future_steps

    # reference steps of cycles c + 1 ... c + N_f + 1
    upcoming = plan.references(cycle + 1, future_steps + 1)

    step_index = mapping.step_index()

    support = np.zeros((mapping.horizon, 3))
    following = np.zeros((mapping.horizon, 3))

    for i, j in enumerate(step_index):
        if j < 0:
            support[i] = plan.support
            following[i] = upcoming[0]
        else:
            support[i] = upcoming[j]
            following[i] = upcoming[j + 1]

    midpoint = 0.5 * (support + following)

    absolute = time + mapping.times

    height = ReferenceOverrides.sample(overrides.height, absolute, height_ref)

    return ReferenceBundle(
        com_x=midpoint[:, 0],
        com_y=midpoint[:, 1],
        com_z=height + support[:, 2],
        roll=ReferenceOverrides.sample(overrides.roll, absolute, 0.0),
        pitch=ReferenceOverrides.sample(overrides.pitch, absolute, 0.0),
        step_x=upcoming[:future_steps, 0],
        step_y=upcoming[:future_steps, 1],
        step_z=upcoming[:future_steps, 2],
        support_z=support[:, 2],
    )
