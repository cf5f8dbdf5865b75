import numpy as np

from dataclasses import dataclass

from strider import GRAVITY


CHANNELS = ('c_x', 'c_y', 'c_z', 'theta_r', 'theta_p')


class DegenerateDynamics(ValueError):
    """
    Raised when the pendulum is in free fall (g + vertical acceleration <= 0) and the ZMP is undefined.
    """
    pass


def _readonly(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)

    return array


@dataclass(frozen=True)
class ModelParams:
    """
    Physical parameters of the nonlinear inverted pendulum plus flywheel model. Defaults describe the COMAN
    humanoid used in the pendulum-level experiments.

    .. code-block:: python

        from strider.models import ModelParams

        params = ModelParams(mass=31.0, height_ref=0.467)

    :param mass: total mass in kg
    :param gravity: gravitational acceleration in m/s^2
    :param inertia_x: flywheel moment of inertia about the x (roll) axis in kg m^2
    :param inertia_y: flywheel moment of inertia about the y (pitch) axis in kg m^2
    :param height_ref: default inverted pendulum height in m
    """
    mass: float = 31.0
    gravity: float = GRAVITY
    inertia_x: float = 1.0
    inertia_y: float = 1.0
    height_ref: float = 0.467

    def __post_init__(self):
        for name in ['mass', 'gravity', 'inertia_x', 'inertia_y', 'height_ref']:
            if not getattr(self, name) > 0:
                raise ValueError('The model parameter {} must be positive, got {}'.format(name, getattr(self, name)))


@dataclass(frozen=True, eq=False)
class PendulumState:
    """
    Fully observed state of the pendulum. The state is stored as a 5x3 array whose rows are the motion channels
    (c_x, c_y, c_z, theta_r, theta_p) and whose columns are position, velocity and acceleration.

    .. code-block:: python

        from strider.models import PendulumState

        state = PendulumState.at_rest([0.0, 0.0725, 0.467])

        state.position      # array([0.    , 0.0725, 0.467 ])
        state.channel('c_z')  # array([0.467, 0.   , 0.   ])

    """
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float)

        if data.shape != (len(CHANNELS), 3):
            raise ValueError('A pendulum state must have shape (5, 3), got {}'.format(data.shape))

        if not np.all(np.isfinite(data)):
            raise ValueError('A pendulum state must contain only finite entries')

        data.setflags(write=False)

        object.__setattr__(self, 'data', data)

    @classmethod
    def at_rest(cls, com, angles=(0.0, 0.0)):
        data = np.zeros((len(CHANNELS), 3))
        data[0:3, 0] = com
        data[3:5, 0] = angles

        return cls(data)

    def channel(self, name):
        return self.data[CHANNELS.index(name)]

    @property
    def position(self):
        return self.data[0:3, 0]

    @property
    def velocity(self):
        return self.data[0:3, 1]

    @property
    def acceleration(self):
        return self.data[0:3, 2]

    @property
    def angles(self):
        return self.data[3:5, 0]

    @property
    def angular_velocity(self):
        return self.data[3:5, 1]

    @property
    def angular_acceleration(self):
        return self.data[3:5, 2]

    def integrate(self, jerks, dt):
        """
        Applies one constant-jerk interval to every channel.

        :param jerks: jerk of each of the five channels
        :type jerks: array of shape (5,)
        :param dt: duration of the interval in s
        :type dt: float
        :return: the state at the end of the interval
        :rtype: PendulumState
        """
        return PendulumState(step_state(self.data, np.asarray(jerks, dtype=float), dt))


def transition_matrices(dt):
    """
    Constant-jerk Euler integration matrices for a (position, velocity, acceleration) triple.

    :param dt: sampling interval in s
    :type dt: float
    :return: tuple (A, B) with A of shape (3, 3) and B of shape (3,)
    """
    if not dt > 0:
        raise ValueError('The sampling interval must be positive, got {}'.format(dt))

    A = np.array([
        [1.0, dt, dt ** 2 / 2.0],
        [0.0, 1.0, dt],
        [0.0, 0.0, 1.0],
    ])

    B = np.array([dt ** 3 / 6.0, dt ** 2 / 2.0, dt])

    return A, B


def step_state(state, jerk, dt):
    """
    Propagates one or several (x, dx, ddx) triples over an interval of constant jerk.

    .. code-block:: python

        from strider.models import step_state

        step_state([0.0, 1.0, 0.0], 0.0, 0.1)  # array([0.1, 1. , 0. ])

    :param state: a triple of shape (3,) or a stack of triples of shape (k, 3)
    :type state: array
    :param jerk: jerk applied to each triple, scalar or shape (k,)
    :type jerk: float or array
    :param dt: duration of the interval in s
    :type dt: float
    :return: propagated triple(s), same shape as state
    """
    A, B = transition_matrices(dt)

    state = np.asarray(state, dtype=float)

    return state @ A.T + np.multiply.outer(jerk, B)


def zmp(state, support_z, params):
    """
    Zero moment point of the pendulum plus flywheel model. The pitch flywheel momentum enters p_x with a negative
    sign and the roll flywheel momentum enters p_y with a positive sign.

    .. code-block:: python

        from strider.models import zmp, PendulumState, ModelParams

        zmp(PendulumState.at_rest([0.1, 0.0, 0.467]), 0.0, ModelParams())  # array([0.1, 0. , 0. ])

    :param state: current pendulum state
    :type state: PendulumState
    :param support_z: height of the supporting foot in m
    :type support_z: float
    :param params: model parameters
    :type params: ModelParams
    :return: ZMP position (p_x, p_y, p_z)
    :rtype: numpy.ndarray
    """
    c_x, c_y, c_z = state.position
    a_x, a_y, a_z = state.acceleration
    a_r, a_p = state.angular_acceleration

    denominator = params.gravity + a_z

    if denominator <= 0:
        raise DegenerateDynamics('The pendulum is in free fall (g + vertical acceleration = {})'.format(denominator))

    p_x = c_x - (c_z - support_z) * a_x / denominator - params.inertia_y * a_p / (params.mass * denominator)
    p_y = c_y - (c_z - support_z) * a_y / denominator + params.inertia_x * a_r / (params.mass * denominator)

    return np.array([p_x, p_y, support_z])


@dataclass(frozen=True, eq=False)
class PredictionMatrices:
    """
    Recursion matrices mapping the current (x, dx, ddx) triple of a channel and its jerk sequence over the horizon
    to the predicted position, velocity and acceleration sequences:

        X = pps x + ppu jerks,   dX = pvs x + pvu jerks,   ddX = pas x + pau jerks

    Instances are immutable and built once per (dt, horizon) pair with build_prediction.
    """
    dt: float
    horizon: int
    pps: np.ndarray
    pvs: np.ndarray
    pas: np.ndarray
    ppu: np.ndarray
    pvu: np.ndarray
    pau: np.ndarray

    def predict(self, triple, jerks):
        """
        :param triple: current (x, dx, ddx) of one channel
        :type triple: array of shape (3,)
        :param jerks: jerk sequence over the horizon
        :type jerks: array of shape (horizon,)
        :return: tuple of predicted positions, velocities and accelerations
        """
        triple = np.asarray(triple, dtype=float)
        jerks = np.asarray(jerks, dtype=float)

        return (
            self.pps @ triple + self.ppu @ jerks,
            self.pvs @ triple + self.pvu @ jerks,
            self.pas @ triple + self.pau @ jerks,
        )


def build_prediction(dt, horizon):
    """
    Builds the prediction matrices by applying the constant-jerk recursion horizon times.

    .. code-block:: python

        from strider.models import build_prediction

        prediction = build_prediction(0.05, 31)

    :param dt: horizon sample spacing in s
    :type dt: float
    :param horizon: number of predicted samples
    :type horizon: int
    :return: PredictionMatrices
    """
    if horizon < 1:
        raise ValueError('The horizon must contain at least one sample, got {}'.format(horizon))

    A, B = transition_matrices(dt)

    state_response = np.zeros((horizon, 3, 3))

    power = np.eye(3)

    for i in range(horizon):
        power = A @ power
        state_response[i] = power

    # responses[n] = A^n B, the effect of a unit jerk applied n samples earlier
    responses = np.zeros((horizon, 3))
    response = B

    for n in range(horizon):
        responses[n] = response
        response = A @ response

    input_response = np.zeros((horizon, horizon, 3))

    for i in range(horizon):
        for j in range(i + 1):
            input_response[i, j] = responses[i - j]

    return PredictionMatrices(
        dt=dt,
        horizon=horizon,
        pps=_readonly(state_response[:, 0, :]),
        pvs=_readonly(state_response[:, 1, :]),
        pas=_readonly(state_response[:, 2, :]),
        ppu=_readonly(input_response[:, :, 0]),
        pvu=_readonly(input_response[:, :, 1]),
        pau=_readonly(input_response[:, :, 2]),
    )
