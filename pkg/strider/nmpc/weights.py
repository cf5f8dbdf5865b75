from dataclasses import dataclass, asdict, fields


MOTION_CHANNELS = ('c_x', 'c_y', 'c_z', 'theta_r', 'theta_p')
STEP_CHANNELS = ('d_x', 'd_y', 'd_z')

EQUALITY_SCOPES = ('horizon', 'next')


def _floats(values, count, name):
    values = tuple(float(value) for value in values)

    if len(values) != count:
        raise ValueError('{} needs {} entries, got {}'.format(name, count, len(values)))

    if any(value < 0 for value in values):
        raise ValueError('{} weights must not be negative, got {}'.format(name, values))

    return values


@dataclass(frozen=True)
class Weights:
    """
    Cost weights. alpha (velocity), beta (position tracking) and gamma (jerk) hold one entry per motion channel
    (c_x, c_y, c_z, theta_r, theta_p); delta (step tracking) holds one entry per step channel (d_x, d_y, d_z).
    Defaults are the reference profile: step tracking dominant, stiff height and angle tracking and jerk as a
    regularizer.
    """
    alpha: tuple = (1.0, 1.0, 1.0, 1.0, 1.0)
    beta: tuple = (50.0, 50.0, 200.0, 200.0, 200.0)
    gamma: tuple = (1e-3, 1e-3, 1e-3, 1e-3, 1e-3)
    delta: tuple = (1000.0, 1000.0, 1000.0)

    def __post_init__(self):
        object.__setattr__(self, 'alpha', _floats(self.alpha, len(MOTION_CHANNELS), 'alpha'))
        object.__setattr__(self, 'beta', _floats(self.beta, len(MOTION_CHANNELS), 'beta'))
        object.__setattr__(self, 'gamma', _floats(self.gamma, len(MOTION_CHANNELS), 'gamma'))
        object.__setattr__(self, 'delta', _floats(self.delta, len(STEP_CHANNELS), 'delta'))

        for channel, beta, gamma in zip(MOTION_CHANNELS, self.beta, self.gamma):
            if beta == 0 and gamma == 0:
                raise ValueError('Channel {} needs a positive beta or gamma weight'.format(channel))

    def scaled(self, factor):
        if not factor > 0:
            raise ValueError('Weights can only be scaled by a positive factor, got {}'.format(factor))

        return Weights(
            alpha=[factor * value for value in self.alpha],
            beta=[factor * value for value in self.beta],
            gamma=[factor * value for value in self.gamma],
            delta=[factor * value for value in self.delta],
        )

    def as_dict(self):
        return {key: list(value) for key, value in asdict(self).items()}


def _interval(value, name):
    low, high = (float(v) for v in value)

    if not low < high:
        raise ValueError('The {} bounds must satisfy min < max, got [{}, {}]'.format(name, low, high))

    return low, high


@dataclass(frozen=True)
class Bounds:
    """
    Feasibility bounds as (min, max) pairs. ZMP bounds are relative to the support foot, step bounds relative to
    the preceding foot (lateral bounds on the step width), rates in m/s, the height band on c_z - d_z - h_ref,
    angles absolute in rad and hip torques in N m.
    """
    zmp_x: tuple = (-0.03, 0.07)
    zmp_y: tuple = (-0.05, 0.05)
    step_x: tuple = (-0.1, 0.3)
    step_y: tuple = (0.11, 0.2)
    step_rate_x: tuple = (-1.0, 3.0)
    step_rate_y: tuple = (-1.0, 1.0)
    height: tuple = (-0.15, 0.1)
    roll: tuple = (-0.087, 0.175)
    pitch: tuple = (-0.175, 0.175)
    torque_roll: tuple = (-80.0, 80.0)
    torque_pitch: tuple = (-80.0, 80.0)

    def __post_init__(self):
        for field in fields(self):
            object.__setattr__(self, field.name, _interval(getattr(self, field.name), field.name))

    def as_dict(self):
        return {key: list(value) for key, value in asdict(self).items()}


@dataclass(frozen=True)
class StrategyToggles:
    """
    Balance strategies enabled on top of the ankle strategy. A disabled strategy pins its channels to their
    references through equality rows. equality_scope selects whether angle and height equalities bind over the
    whole horizon or at the next sample only.
    """
    allow_step_adjust: bool = True
    allow_body_rotation: bool = True
    allow_height_variation: bool = True
    equality_scope: str = 'horizon'

    def __post_init__(self):
        if self.equality_scope not in EQUALITY_SCOPES:
            raise ValueError('The equality scope must be one of {}, got {}'.format(EQUALITY_SCOPES, self.equality_scope))

    @property
    def number(self):
        """
        Index of the matching strategy combination, None for other combinations.
        """
        flags = (self.allow_step_adjust, self.allow_body_rotation, self.allow_height_variation)

        for number, combination in STRATEGIES.items():
            if combination == flags:
                return number

        return None

    def as_dict(self):
        return asdict(self)


STRATEGIES = {
    1: (True, False, False),
    2: (True, True, False),
    3: (True, True, True),
    4: (False, True, True),
}


def strategy(number, equality_scope='horizon'):
    """
    Toggles of one of the four strategy combinations: 1 stepping, 2 stepping and body rotation, 3 stepping,
    body rotation and height variation, 4 body rotation and height variation.

    :param number: strategy index 1 to 4
    :type number: int
    :param equality_scope: 'horizon' or 'next'
    :type equality_scope: str
    :return: StrategyToggles
    """
    if number not in STRATEGIES:
        raise ValueError('Unknown strategy {}, expected one of {}'.format(number, sorted(STRATEGIES)))

    step, rotation, height = STRATEGIES[number]

    return StrategyToggles(
        allow_step_adjust=step,
        allow_body_rotation=rotation,
        allow_height_variation=height,
        equality_scope=equality_scope,
    )
