import logging
import numpy as np

from dataclasses import replace

from strider.utils.workflows.episode import Episode

from prettytable import PrettyTable


def timing_study(scenario, iterations=(1, 2, 3, 4, 5, 6), toggles=None):
    """
    Runs the scenario once per SQP iteration count N_s with the threshold set to the smallest positive float, so
    that every solve performs N_s iterations unless no channel moves any more, and reports per N_s the smallest
    positive termination value reached over all ticks, the number of ticks whose last increment was zero and
    the mean wall-clock solve time.

    .. code-block:: python

        from strider.datasets import scenario_catalog
        from strider.utils.workflows import timing_study, timing_table

        rows = timing_study(scenario_catalog()['timing-gait'])

        print(timing_table(rows))

    :param scenario: the gait to run
    :type scenario: ScenarioFile
    :param iterations: SQP iteration counts
    :type iterations: list of int
    :param toggles: strategy toggles, those of the scenario when omitted
    :type toggles: StrategyToggles
    :return: list of dictionaries with keys max_iterations, min_termination, exact_ticks, mean_solve_time_s, ticks,
        outcome
    """
    rows = []

    for count in iterations:
        settings = replace(scenario.sqp, epsilon=np.finfo(float).tiny, max_iterations=int(count))

        episode = Episode(scenario, toggles=toggles, settings=settings)

        log, outcome = episode.run()

        if len(log) == 0:
            raise RuntimeError('The timing scenario {} failed at its first tick: {}'.format(scenario.name, outcome))

        termination = log.column('termination')
        moving = termination[termination > 0]

        rows.append({
            'max_iterations': int(count),
            'min_termination': float(np.min(moving)) if moving.size else 0.0,
            'exact_ticks': int(np.sum(termination <= 0)),
            'mean_solve_time_s': float(np.mean(log.column('solve_time_s'))),
            'ticks': len(log),
            'outcome': str(outcome),
        })

        logging.info('INFO: N_s = {}: min(F) = {:.3e}, mean solve time {:.2f} ms'.format(
            count, rows[-1]['min_termination'], 1e3 * rows[-1]['mean_solve_time_s']
        ))

    return rows


def timing_table(rows):
    table = PrettyTable()

    table.field_names = ['N_s', 'min(F) at termination', 'exact ticks', 'mean solve time (ms)', 'ticks', 'outcome']

    for row in rows:
        table.add_row([
            row['max_iterations'],
            '{:.2e}'.format(row['min_termination']),
            row['exact_ticks'],
            '{:.2f}'.format(1e3 * row['mean_solve_time_s']),
            row['ticks'],
            row['outcome'],
        ])

    return table
