import numpy as np

from dataclasses import dataclass

from strider.gait.plan import side_sign
from strider.models.pendulum import CHANNELS
from strider.nmpc.layout import DecisionLayout, check_dimensions
from strider.ops.qcqp import QuadraticConstraint


ZMP_SIDES = ('x_upper', 'x_lower', 'y_upper', 'y_lower')


class _Forms:
    """
    Affine forms (a0, a), value a0 + a^T X, of predicted quantities at one horizon sample.
    """
    def __init__(self, layout, prediction, state):
        self.layout = layout
        self.prediction = prediction
        self.state = state

    def _form(self, channel, j, state_rows, input_rows):
        a = np.zeros(self.layout.size)
        a[self.layout.motion(channel)] = input_rows[j]

        return float(state_rows[j] @ self.state.data[CHANNELS.index(channel)]), a

    def position(self, channel, j):
        return self._form(channel, j, self.prediction.pps, self.prediction.ppu)

    def acceleration(self, channel, j):
        return self._form(channel, j, self.prediction.pas, self.prediction.pau)

    def support(self, axis, j, mapping, support):
        """
        Support coordinate e_c d_hat + E_c D of sample j along axis ('d_x' or 'd_y').
        """
        a = np.zeros(self.layout.size)
        a[self.layout.step(axis)] = mapping.future[j]

        return float(mapping.current[j] * support), a


def _shift(form, constant=0.0, sign=1.0):
    return sign * (form[0] + constant), sign * form[1]


def _difference(first, second, constant=0.0):
    return first[0] - second[0] - constant, first[1] - second[1]


def support_heights(plan, mapping):
    """
    Support height of every horizon sample. Step heights are fixed to their references, so these are constants.
    """
    step_z = plan.references(plan.cycle + 1, mapping.future_steps)[:, 2]

    return mapping.support_sequence(plan.support[2], step_z)


def _zmp_constraints(size, position, acceleration, foot, support_z, bounds, params):
    """
    The four ZMP constraints of one instant in the order of ZMP_SIDES. position and acceleration map a channel
    to its affine form, foot maps an axis ('x' or 'y') to the affine form of the support coordinate.
    """
    mass, gravity = params.mass, params.gravity

    vertical_load = _shift(acceleration('c_z'), gravity)
    lever = _shift(position('c_z'), -support_z)

    constraints = []

    for axis, momentum, sign in [('x', ('theta_p', params.inertia_y), -1.0),
                                 ('y', ('theta_r', params.inertia_x), 1.0)]:
        com = position('c_' + axis)
        com_dd = acceleration('c_' + axis)

        angular = acceleration(momentum[0])

        low, high = getattr(bounds, 'zmp_' + axis)

        for bound, orientation in [(high, 1.0), (low, -1.0)]:
            offset = _difference(com, foot(axis), bound)

            # orientation * [m (c - d - p)(g + c_z'') - m (c_z - d_z) c'' + sign I theta'']
            constraints.append(QuadraticConstraint(
                size,
                products=[
                    (orientation * mass, offset[0], offset[1], vertical_load[0], vertical_load[1]),
                    (-orientation * mass, lever[0], lever[1], com_dd[0], com_dd[1]),
                ],
                linear=orientation * sign * momentum[1] * angular[1],
                constant=orientation * sign * momentum[1] * angular[0],
            ))

    return constraints


def assemble_zmp_constraints(state, mapping, plan, bounds, prediction, params):
    """
    Quadratic ZMP constraints. For every horizon sample and each of x-upper, x-lower, y-upper and y-lower, the
    bound on the foot-relative ZMP is multiplied through by m (g + c_z'') > 0, giving for instance

        m (c_x - d_x - p_x_max)(g + c_z'') - m (c_z - d_z) c_x'' - I_y theta_p'' <= 0

    in which c, c'' and theta'' are affine in the jerks and d_x is affine in the future steps. Each constraint
    is stored as two products of affine forms plus an affine remainder. The entries are ordered by sample, four
    per sample in the order of ZMP_SIDES.

    .. code-block:: python

        from strider.nmpc import assemble_zmp_constraints

        constraints = assemble_zmp_constraints(state, mapping, plan, Bounds(), prediction, ModelParams())

    :return: list of 4 N_h QuadraticConstraint
    """
    layout = DecisionLayout(prediction.horizon, mapping.future_steps)

    check_dimensions(layout, prediction, mapping)

    forms = _Forms(layout, prediction, state)

    heights = support_heights(plan, mapping)

    constraints = []

    for j in range(layout.horizon):
        constraints += _zmp_constraints(
            layout.size,
            lambda channel: forms.position(channel, j),
            lambda channel: forms.acceleration(channel, j),
            lambda axis: forms.support('d_' + axis, j, mapping, plan.support[0 if axis == 'x' else 1]),
            heights[j],
            bounds,
            params,
        )

    return constraints


def assemble_tick_zmp_constraints(state, plan, layout, bounds, params, dt_ctrl):
    """
    ZMP constraints on the state one control tick ahead, reached by applying the first jerks of the horizon
    during dt_ctrl, with the ZMP bounded around the current support foot. The horizon samples are dt_mpc apart,
    these rows keep the ZMP of the tick actually executed within the support polygon as well.

    .. code-block:: python

        from strider.nmpc import assemble_tick_zmp_constraints

        constraints = assemble_tick_zmp_constraints(state, plan, DecisionLayout(31, 2), Bounds(), ModelParams(),
                                                    0.005)

    :param state: current pendulum state
    :type state: PendulumState
    :param plan: footstep plan of the tick
    :type plan: FootstepPlan
    :param layout: decision layout
    :type layout: DecisionLayout
    :param bounds: feasibility bounds
    :type bounds: Bounds
    :param params: model parameters
    :type params: ModelParams
    :param dt_ctrl: control tick in s
    :type dt_ctrl: float
    :return: list of 4 QuadraticConstraint in the order of ZMP_SIDES
    """
    if not dt_ctrl > 0:
        raise ValueError('The control tick must be positive, got {}'.format(dt_ctrl))

    def form(channel, constant, coefficient):
        a = np.zeros(layout.size)
        a[layout.motion(channel).start] = coefficient

        return float(constant), a

    def position(channel):
        x, v, a = state.data[CHANNELS.index(channel)]

        return form(channel, x + dt_ctrl * v + 0.5 * dt_ctrl ** 2 * a, dt_ctrl ** 3 / 6.0)

    def acceleration(channel):
        return form(channel, state.data[CHANNELS.index(channel), 2], dt_ctrl)

    def foot(axis):
        return float(plan.support[0 if axis == 'x' else 1]), np.zeros(layout.size)

    return _zmp_constraints(layout.size, position, acceleration, foot, plan.support[2], bounds, params)


@dataclass(frozen=True, eq=False)
class LinearRows:
    """
    Linear rows A_in X <= b_in and A_eq X = b_eq with one label per row naming the constraint family.
    """
    A_in: np.ndarray
    b_in: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    labels_in: tuple
    labels_eq: tuple

    def count(self, label):
        return sum(1 for value in self.labels_in + self.labels_eq if value == label)


class _RowBuilder:
    def __init__(self, size):
        self.size = size

        self.A_in, self.b_in, self.labels_in = [], [], []
        self.A_eq, self.b_eq, self.labels_eq = [], [], []

    def upper(self, form, bound, label):
        """
        a0 + a^T X <= bound
        """
        self.A_in.append(form[1])
        self.b_in.append(bound - form[0])
        self.labels_in.append(label)

    def box(self, form, low, high, label):
        self.upper(form, high, label)
        self.upper((-form[0], -form[1]), -low, label)

    def equal(self, form, value, label):
        self.A_eq.append(form[1])
        self.b_eq.append(value - form[0])
        self.labels_eq.append(label)

    def rows(self):
        return LinearRows(
            A_in=np.array(self.A_in).reshape(-1, self.size),
            b_in=np.array(self.b_in, dtype=float),
            A_eq=np.array(self.A_eq).reshape(-1, self.size),
            b_eq=np.array(self.b_eq, dtype=float),
            labels_in=tuple(self.labels_in),
            labels_eq=tuple(self.labels_eq),
        )


def _step_form(layout, axis, i, scale=1.0):
    a = np.zeros(layout.size)
    a[layout.step(axis).start + i] = scale

    return 0.0, a


def step_rate_anchor(plan, bounds, references, previous_next_step=None):
    """
    Location the next step may move away from by at most rate dt_ctrl: the next step of the previous solve,
    or its reference when omitted, clipped into the step range around the current support foot so that the
    step range and step rate rows always intersect.

    :param plan: footstep plan of the tick
    :type plan: FootstepPlan
    :param bounds: feasibility bounds
    :type bounds: Bounds
    :param references: references of the tick
    :type references: ReferenceBundle
    :param previous_next_step: next step location of the previous solve
    :type previous_next_step: array of shape (3,)
    :return: array of shape (3,)
    """
    if previous_next_step is None:
        anchor = np.array(references.steps[:, 0], dtype=float)
    else:
        anchor = np.array(previous_next_step, dtype=float)

    support = plan.support

    anchor[0] = np.clip(anchor[0], support[0] + bounds.step_x[0], support[0] + bounds.step_x[1])

    sign = -side_sign(plan.side_of(plan.cycle))
    width = np.clip(sign * (anchor[1] - support[1]), bounds.step_y[0], bounds.step_y[1])

    anchor[1] = support[1] + sign * width

    return anchor


def assemble_linear_constraints(state, plan, mapping, bounds, prediction, toggles, params, references,
                                previous_next_step=None, dt_ctrl=0.005):
    """
    Linear rows of one control tick:

    - step range: d_1 - d_hat and d_i - d_(i-1) within the step bounds; laterally the signed width, positive
      towards the side of the swing foot, lies within the width bounds
    - step rate: the next step moves by at most rate dt_ctrl from previous_next_step, along x and y, the
      anchor clipped into the step range (see step_rate_anchor)
    - step height: D_z equals its references
    - height band: c_z - d_z - h_ref within the height bounds, h_ref the nominal pendulum height of the model
      whatever the height reference profile
    - vertical acceleration: c_z'' >= -g
    - body angles within their boxes and hip torques I theta'' within the torque bounds
    - equalities of the disabled strategies: step locations on their references, angles on their references,
      c_z on its reference, over the horizon or at the next sample depending on toggles.equality_scope

    .. code-block:: python

        from strider.nmpc import assemble_linear_constraints

        rows = assemble_linear_constraints(state, plan, mapping, Bounds(), prediction, strategy(1), ModelParams(),
                                           references)

        rows.count('angle_reference')  # 2 N_h

    :param previous_next_step: next step location of the previous solve of the same cycle, the reference step
        when omitted
    :type previous_next_step: array of shape (3,)
    :param dt_ctrl: control tick in s
    :type dt_ctrl: float
    :return: LinearRows
    """
    layout = DecisionLayout(prediction.horizon, mapping.future_steps)

    check_dimensions(layout, prediction, mapping, references)

    forms = _Forms(layout, prediction, state)
    builder = _RowBuilder(layout.size)

    # step range, chained from the current support foot
    for i in range(layout.future_steps):
        for axis, k in [('d_x', 0), ('d_y', 1)]:
            if i == 0:
                relative = _step_form(layout, axis, 0)
                relative = (relative[0] - plan.support[k], relative[1])
            else:
                relative = _difference(_step_form(layout, axis, i), _step_form(layout, axis, i - 1))

            if axis == 'd_x':
                builder.box(relative, bounds.step_x[0], bounds.step_x[1], 'step_range')
            else:
                # the foot after a left support lands to the right, towards -y
                sign = -side_sign(plan.side_of(plan.cycle + i))
                builder.box(_shift(relative, sign=sign), bounds.step_y[0], bounds.step_y[1], 'step_range')

    # step rate on the next step
    previous = step_rate_anchor(plan, bounds, references, previous_next_step)

    for axis, k, rate in [('d_x', 0, bounds.step_rate_x), ('d_y', 1, bounds.step_rate_y)]:
        change = _step_form(layout, axis, 0)
        change = (change[0] - previous[k], change[1])

        builder.box(change, rate[0] * dt_ctrl, rate[1] * dt_ctrl, 'step_rate')

    # step height
    for i in range(layout.future_steps):
        builder.equal(_step_form(layout, 'd_z', i), references.step_z[i], 'step_height')

    for j in range(layout.horizon):
        foot_z = forms.support('d_z', j, mapping, plan.support[2])
        band = _difference(forms.position('c_z', j), foot_z, params.height_ref)

        builder.box(band, bounds.height[0], bounds.height[1], 'height_band')

        # -c_z'' <= g
        builder.upper(_shift(forms.acceleration('c_z', j), sign=-1.0), params.gravity, 'vertical_acceleration')

        builder.box(forms.position('theta_r', j), bounds.roll[0], bounds.roll[1], 'angle')
        builder.box(forms.position('theta_p', j), bounds.pitch[0], bounds.pitch[1], 'angle')

        roll_torque = forms.acceleration('theta_r', j)
        pitch_torque = forms.acceleration('theta_p', j)

        builder.box(_shift(roll_torque, sign=params.inertia_x), bounds.torque_roll[0], bounds.torque_roll[1],
                    'torque')
        builder.box(_shift(pitch_torque, sign=params.inertia_y), bounds.torque_pitch[0], bounds.torque_pitch[1],
                    'torque')

    if not toggles.allow_step_adjust:
        for i in range(layout.future_steps):
            builder.equal(_step_form(layout, 'd_x', i), references.step_x[i], 'step_reference')
            builder.equal(_step_form(layout, 'd_y', i), references.step_y[i], 'step_reference')

    samples = range(layout.horizon) if toggles.equality_scope == 'horizon' else range(1)

    if not toggles.allow_body_rotation:
        for j in samples:
            builder.equal(forms.position('theta_r', j), references.roll[j], 'angle_reference')
            builder.equal(forms.position('theta_p', j), references.pitch[j], 'angle_reference')

    if not toggles.allow_height_variation:
        for j in samples:
            builder.equal(forms.position('c_z', j), references.com_z[j], 'height_reference')

    return builder.rows()


def pinned_channels(toggles):
    """
    Channels fully determined by equality rows under the given toggles.
    """
    pinned = ['d_z']

    if not toggles.allow_step_adjust:
        pinned += ['d_x', 'd_y']

    if toggles.equality_scope == 'horizon':
        if not toggles.allow_body_rotation:
            pinned += ['theta_r', 'theta_p']

        if not toggles.allow_height_variation:
            pinned += ['c_z']

    return tuple(pinned)
