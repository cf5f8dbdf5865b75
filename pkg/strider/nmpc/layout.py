import numpy as np

from strider.ops.qcqp import DimensionMismatch
from strider.nmpc.weights import MOTION_CHANNELS, STEP_CHANNELS


class DecisionLayout:
    """
    Layout of the decision vector: five jerk blocks of N_h samples (c_x, c_y, c_z, theta_r, theta_p) followed by
    three step blocks of N_f future steps (d_x, d_y, d_z), N_t = 5 N_h + 3 N_f entries in total.
    """
    def __init__(self, horizon, future_steps):
        if horizon < 1 or future_steps < 1:
            raise DimensionMismatch('The horizon and the future step count must be positive, got {} and {}'.format(
                horizon, future_steps
            ))

        self.horizon = horizon
        self.future_steps = future_steps

        self.size = len(MOTION_CHANNELS) * horizon + len(STEP_CHANNELS) * future_steps

    def motion(self, channel):
        k = MOTION_CHANNELS.index(channel) if isinstance(channel, str) else channel

        return slice(k * self.horizon, (k + 1) * self.horizon)

    def step(self, channel):
        k = STEP_CHANNELS.index(channel) if isinstance(channel, str) else channel
        start = len(MOTION_CHANNELS) * self.horizon + k * self.future_steps

        return slice(start, start + self.future_steps)

    def channels(self):
        return [(name, self.motion(name).start, self.motion(name).stop) for name in MOTION_CHANNELS] + \
            [(name, self.step(name).start, self.step(name).stop) for name in STEP_CHANNELS]

    def jerks(self, X):
        """
        Jerk sequences as an array of shape (5, N_h).
        """
        return np.asarray(X, dtype=float)[:len(MOTION_CHANNELS) * self.horizon].reshape(len(MOTION_CHANNELS), -1)

    def steps(self, X):
        """
        Future step locations as an array of shape (3, N_f).
        """
        return np.asarray(X, dtype=float)[len(MOTION_CHANNELS) * self.horizon:].reshape(len(STEP_CHANNELS), -1)

    def compose(self, jerks, steps):
        return np.concatenate([np.asarray(jerks, dtype=float).reshape(-1), np.asarray(steps, dtype=float).reshape(-1)])


def check_dimensions(layout, prediction, mapping=None, references=None):
    if prediction.horizon != layout.horizon:
        raise DimensionMismatch('Prediction matrices cover {} samples, the layout {}'.format(
            prediction.horizon, layout.horizon
        ))

    if mapping is not None and (mapping.horizon != layout.horizon or mapping.future_steps != layout.future_steps):
        raise DimensionMismatch('Horizon mapping of shape ({}, {}) does not match the layout ({}, {})'.format(
            mapping.horizon, mapping.future_steps, layout.horizon, layout.future_steps
        ))

    if references is not None and (references.com_x.shape[0] != layout.horizon
                                   or references.step_x.shape[0] != layout.future_steps):
        raise DimensionMismatch('References do not match the decision layout')
