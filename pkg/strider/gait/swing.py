import numpy as np


def quintic(tau):
    """
    Rest-to-rest quintic blend 10 tau^3 - 15 tau^4 + 6 tau^5 on [0, 1], zero velocity and acceleration at both ends.
    """
    tau = np.clip(tau, 0.0, 1.0)

    return tau ** 3 * (10.0 - 15.0 * tau + 6.0 * tau ** 2)


def swing_foot_trajectory(start, end, duration, apex, t):
    """
    Swing foot position at time t of a swing from start to end. The horizontal motion is a single quintic blend.
    The vertical motion chains two quintics through the apex height max(start_z, end_z) + apex reached at half
    time.

    .. code-block:: python

        from strider.gait import swing_foot_trajectory

        swing_foot_trajectory([0.0, 0.1, 0.0], [0.3, 0.1, 0.0], 0.8, 0.05, 0.4)  # array([0.15, 0.1 , 0.05])

    :param start: lift-off location
    :type start: array of shape (3,)
    :param end: touch-down location
    :type end: array of shape (3,)
    :param duration: swing duration in s
    :type duration: float
    :param apex: clearance above the higher of the two footholds in m
    :type apex: float
    :param t: time since lift-off in s, clipped to [0, duration]
    :type t: float
    :return: foot location
    :rtype: numpy.ndarray
    """
    if not duration > 0:
        raise ValueError('The swing duration must be positive, got {}'.format(duration))

    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)

    tau = float(np.clip(t / duration, 0.0, 1.0))

    position = start + quintic(tau) * (end - start)

    peak = max(start[2], end[2]) + apex

    if tau <= 0.5:
        position[2] = start[2] + quintic(2.0 * tau) * (peak - start[2])
    else:
        position[2] = peak + quintic(2.0 * tau - 1.0) * (end[2] - peak)

    return position
