import numpy as np

from strider.models.pendulum import CHANNELS
from strider.nmpc.layout import DecisionLayout, check_dimensions
from strider.nmpc.weights import MOTION_CHANNELS, STEP_CHANNELS


def assemble_objective(state, references, mapping, weights, prediction):
    """
    Expands the tracking cost

        sum over motion channels   alpha/2 |dX|^2 + beta/2 |X - X_ref|^2 + gamma/2 |jerks|^2
        + sum over step channels   delta/2 |U - U_ref|^2

    into f = X^T G X + g^T X. G is block diagonal with blocks gamma/2 I + alpha/2 Pvu^T Pvu + beta/2 Ppu^T Ppu
    for the jerk blocks and delta/2 I for the step blocks; the linear term of a jerk block is
    (alpha Pvu^T Pvs + beta Ppu^T Pps) x_hat - beta Ppu^T X_ref and that of a step block is -delta U_ref.

    .. code-block:: python

        from strider.nmpc import assemble_objective

        G, g = assemble_objective(state, references, mapping, Weights(), prediction)

    :param state: current pendulum state
    :type state: PendulumState
    :param references: references of the tick
    :type references: ReferenceBundle
    :param mapping: horizon mapping of the tick
    :type mapping: HorizonMapping
    :param weights: cost weights
    :type weights: Weights
    :param prediction: prediction matrices of the horizon
    :type prediction: PredictionMatrices
    :return: tuple (G, g)
    """
    layout = DecisionLayout(prediction.horizon, mapping.future_steps)

    check_dimensions(layout, prediction, mapping, references)

    G = np.zeros((layout.size, layout.size))
    g = np.zeros(layout.size)

    velocity_gram = prediction.pvu.T @ prediction.pvu
    position_gram = prediction.ppu.T @ prediction.ppu

    motion_references = references.motion

    for k, channel in enumerate(MOTION_CHANNELS):
        block = layout.motion(channel)

        alpha, beta, gamma = weights.alpha[k], weights.beta[k], weights.gamma[k]

        G[block, block] = 0.5 * gamma * np.eye(layout.horizon) + 0.5 * alpha * velocity_gram \
            + 0.5 * beta * position_gram

        triple = state.data[CHANNELS.index(channel)]

        g[block] = alpha * prediction.pvu.T @ (prediction.pvs @ triple) \
            + beta * prediction.ppu.T @ (prediction.pps @ triple) \
            - beta * prediction.ppu.T @ motion_references[k]

    step_references = references.steps

    for k, channel in enumerate(STEP_CHANNELS):
        block = layout.step(channel)

        G[block, block] = 0.5 * weights.delta[k] * np.eye(layout.future_steps)
        g[block] = -weights.delta[k] * step_references[k]

    return G, g


def objective_offset(state, references, weights, prediction):
    """
    Constant dropped by the expansion, X^T G X + g^T X + offset equals the unexpanded cost.
    """
    offset = 0.0

    motion_references = references.motion

    for k, channel in enumerate(MOTION_CHANNELS):
        triple = state.data[CHANNELS.index(channel)]

        free_velocity = prediction.pvs @ triple
        free_error = prediction.pps @ triple - motion_references[k]

        offset += 0.5 * weights.alpha[k] * free_velocity @ free_velocity
        offset += 0.5 * weights.beta[k] * free_error @ free_error

    step_references = references.steps

    for k in range(len(STEP_CHANNELS)):
        offset += 0.5 * weights.delta[k] * step_references[k] @ step_references[k]

    return float(offset)


def tracking_cost(X, state, references, weights, prediction):
    """
    Direct evaluation of the tracking cost from predicted trajectories, without the quadratic expansion.
    """
    layout = DecisionLayout(prediction.horizon, references.step_x.shape[0])

    jerks = layout.jerks(X)
    steps = layout.steps(X)

    cost = 0.0

    motion_references = references.motion

    for k, channel in enumerate(MOTION_CHANNELS):
        positions, velocities, _ = prediction.predict(state.data[CHANNELS.index(channel)], jerks[k])

        cost += 0.5 * weights.alpha[k] * velocities @ velocities
        cost += 0.5 * weights.beta[k] * (positions - motion_references[k]) @ (positions - motion_references[k])
        cost += 0.5 * weights.gamma[k] * jerks[k] @ jerks[k]

    step_references = references.steps

    for k in range(len(STEP_CHANNELS)):
        error = steps[k] - step_references[k]
        cost += 0.5 * weights.delta[k] * error @ error

    return float(cost)
