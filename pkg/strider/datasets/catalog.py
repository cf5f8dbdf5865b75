from collections import OrderedDict

from strider.gait import ReferenceOverrides, StepSpec
from strider.nmpc import strategy
from strider.utils.workflows.episode import Disturbance, SimConfig
from strider.datasets.json import ScenarioFile


STAIRS_LENGTHS = [0.15, 0.15, 0.15, 0.15, 0.15, 0.3, 0.25, 0.15, 0.05, 0.15]
STAIRS_WIDTHS = [0.145, 0.145, 0.145, 0.145, 0.2, 0.14, 0.14, 0.2, 0.145, 0.145]
STAIRS_HEIGHTS = [0.0, 0.1, 0.1, 0.1, 0.0, 0.0, -0.1, -0.1, 0.0, 0.0]

STEP_DURATION = 0.8

WALKING_WIDTH = 0.145

ORIGIN = (0.0, 0.5 * WALKING_WIDTH, 0.0)


def stairs_3d():
    """
    Ten cycles over three stairs up and two down with changing step lengths and widths, walked without step
    adjustment.
    """
    steps = [
        StepSpec(length, width, height, STEP_DURATION)
        for length, width, height in zip(STAIRS_LENGTHS, STAIRS_WIDTHS, STAIRS_HEIGHTS)
    ]

    return ScenarioFile(
        name='stairs-3d',
        description='3D walking over stairs with varying step lengths and widths',
        steps=steps,
        toggles=strategy(4),
        origin=ORIGIN,
        sim=SimConfig(total_time=(len(steps) + 1) * STEP_DURATION),
    )


def step_in_place_push():
    return ScenarioFile(
        name='step-in-place-push',
        description='Stepping in place, forward push of 125 N during 0.1 s at 2 s',
        steps=[StepSpec(0.0, WALKING_WIDTH, 0.0, STEP_DURATION)],
        origin=ORIGIN,
        disturbances=[Disturbance(start=2.0, duration=0.1, force_x=125.0)],
        sim=SimConfig(total_time=4.0),
    )


def walk_forward_push():
    return ScenarioFile(
        name='walk-forward-push',
        description='Walking forward, push of 125 N forward and 75 N lateral during 0.1 s at 2 s',
        steps=[StepSpec(0.15, WALKING_WIDTH, 0.0, STEP_DURATION)],
        origin=ORIGIN,
        disturbances=[Disturbance(start=2.0, duration=0.1, force_x=125.0, force_y=75.0)],
        sim=SimConfig(total_time=4.0),
    )


def narrow_passage():
    """
    Walking forward while lowering the pendulum by 5 cm and pitching the upper body by 0.1 rad, then recovering.
    """
    height, lowered = 0.467, 0.417

    return ScenarioFile(
        name='narrow-passage',
        description='Walking through a low passage with height and pitch reference profiles',
        steps=[StepSpec(0.1, WALKING_WIDTH, 0.0, STEP_DURATION)],
        origin=ORIGIN,
        overrides=ReferenceOverrides(
            height=[[1.6, height], [2.4, lowered], [4.0, lowered], [4.8, height]],
            pitch=[[1.6, 0.0], [2.4, 0.1], [4.0, 0.1], [4.8, 0.0]],
        ),
        sim=SimConfig(total_time=6.4),
    )


def timing_gait():
    """
    Short-horizon gait of the SQP timing study: 0.1 s sampling over a 1 s horizon, re-solved every sample.
    """
    return ScenarioFile(
        name='timing-gait',
        description='Gait of the SQP iteration and timing study',
        steps=[StepSpec(0.1, WALKING_WIDTH, 0.0, STEP_DURATION)],
        origin=ORIGIN,
        sim=SimConfig(dt_ctrl=0.1, dt_mpc=0.1, horizon=10, future_steps=2, total_time=4.0),
    )


def scenario_catalog():
    """
    The built-in scenarios by name.

    .. code-block:: python

        from strider.datasets import scenario_catalog

        scenario = scenario_catalog()['stairs-3d']

    :return: OrderedDict of ScenarioFile
    """
    scenarios = [stairs_3d(), step_in_place_push(), walk_forward_push(), narrow_passage(), timing_gait()]

    return OrderedDict((scenario.name, scenario) for scenario in scenarios)
