import logging
import numpy as np

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from strider.nmpc import strategy
from strider.utils import worker_count
from strider.utils.workflows.episode import Disturbance, run_episode

from prettytable import PrettyTable


AXES = ('x', 'y')


def with_push(scenario, force_x=0.0, force_y=0.0):
    """
    Copy of the scenario whose disturbances are replaced by a single push (force_x, force_y) in N. The timing of
    the push is taken from the first disturbance of the scenario, 0.1 s at 2 s when it has none.
    """
    template = scenario.disturbances[0] if scenario.disturbances else Disturbance(start=2.0, duration=0.1)

    push = replace(template, force_x=float(force_x), force_y=float(force_y))

    return replace(scenario, disturbances=(push,))


def push_scenario(scenario, axis, force):
    if axis not in AXES:
        raise ValueError('The push axis must be one of {}, got {}'.format(AXES, axis))

    if axis == 'x':
        return with_push(scenario, force_x=force)

    return with_push(scenario, force_y=force)


def max_push_search(scenario, axis='x', toggles=None, weights=None, bounds=None, resolution=1.0, initial=50.0,
                    limit=1000.0):
    """
    Largest push the robot rejects. The force is doubled from initial until an episode fails, then the interval
    between the last completed and the first failed force is bisected down to resolution.

    .. code-block:: python

        from strider.utils.workflows import max_push_search

        force = max_push_search(scenario, axis='x', toggles=strategy(3))

    :param scenario: scenario template, its first disturbance gives the push timing
    :type scenario: ScenarioFile
    :param axis: 'x' (forward) or 'y' (lateral)
    :type axis: str
    :param toggles: strategy toggles, those of the scenario when omitted
    :type toggles: StrategyToggles
    :param resolution: bisection resolution in N
    :type resolution: float
    :param initial: first force tried in N
    :type initial: float
    :param limit: largest force tried in N
    :type limit: float
    :return: the largest force in N for which the episode completed
    """
    if not resolution > 0 or not initial > 0:
        raise ValueError('The search resolution and the initial force must be positive')

    def completes(force):
        _, outcome = run_episode(push_scenario(scenario, axis, force), weights, bounds, toggles)

        logging.info('INFO: Push of {:.2f} N along {}: {}'.format(force, axis, outcome))

        return outcome.completed

    if not completes(0.0):
        logging.warning('WARNING: Scenario {} does not complete without pushes'.format(scenario.name))

        return 0.0

    low, high = 0.0, None

    force = initial

    while force <= limit:
        if not completes(force):
            high = force
            break

        low = force
        force *= 2.0

    if high is None:
        logging.warning('WARNING: Every push up to {:.0f} N was rejected'.format(limit))

        return float(low)

    while high - low > resolution:
        middle = 0.5 * (low + high)

        if completes(middle):
            low = middle
        else:
            high = middle

    return float(low)


def _search_strategy(arguments):
    scenario, axis, number, equality_scope, kwargs = arguments

    return number, max_push_search(scenario, axis, strategy(number, equality_scope), **kwargs)


def strategy_sweep(scenario, axis='x', strategies=(1, 2, 3, 4), equality_scope='horizon', **kwargs):
    """
    Runs max_push_search for several strategies in a process pool capped by NMPC_THREADS.

    :return: dictionary mapping strategy numbers to maximal forces in N
    """
    tasks = [(scenario, axis, number, equality_scope, kwargs) for number in strategies]

    workers = worker_count(len(tasks))

    logging.info('INFO: Push search over strategies {} with {} workers'.format(list(strategies), workers))

    if workers == 1:
        return dict(_search_strategy(task) for task in tasks)

    with ProcessPoolExecutor(max_workers=workers) as executor:
        return dict(executor.map(_search_strategy, tasks))


def push_table(name, axis, results):
    """
    Maximal forces of several strategies as one table row.

    :param name: scenario name
    :type name: str
    :param axis: push axis
    :type axis: str
    :param results: strategy number to force
    :type results: dict
    :return: PrettyTable
    """
    table = PrettyTable()

    numbers = sorted(results)

    table.field_names = ['Scenario', 'Axis'] + ['Strategy {}'.format(number) for number in numbers]

    table.add_row([name, 'forward' if axis == 'x' else 'lateral'] +
                  ['{:.0f} N'.format(np.floor(results[number])) for number in numbers])

    return table
