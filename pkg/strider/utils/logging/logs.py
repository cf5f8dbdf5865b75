from strider import (
    STRIDER_END_EPISODE_EVENT,
)

from pydispatch import dispatcher
from prettytable import PrettyTable


class LoggingHook:
    """
    Logging object printing on the console the result of every episode of a workflow. This logger uses an event
    based system: the episode workflow emits STRIDER_END_EPISODE_EVENT with the episode summary, which is picked up
    by this object and added as a row of a table.

    .. code-block:: python

            from strider.utils.logging import LoggingHook

            episode = # Eg. An instance of the Episode workflow

            logger = LoggingHook(episode.id, 'Strategy 3', '/artifacts/dir')

    """
    def __init__(self, workflow_id, phase, artifacts_dir=None):
        """
        :param workflow_id: the workflow id of the workflow being monitored (workflow_instance.id)
        :type workflow_id: UUID
        :param phase: name shown in the first column of the table (strategy, protocol, ...)
        :type phase: str
        :param artifacts_dir: The path of the directory where the artifacts of the workflow are stored
        :type artifacts_dir: str
        """
        dispatcher.connect(self.end_episode, signal=STRIDER_END_EPISODE_EVENT, sender=workflow_id)

        self.table = PrettyTable()
        self.table.field_names = [
            'Phase', 'Outcome', 'Time (s)', 'Ticks', 'Max ZMP violation (mm)', 'Mean SQP iterations',
            'Mean solve time (ms)'
        ]

        self.phase = phase
        self.workflow_id = workflow_id
        self.artifacts_dir = artifacts_dir

    def end_episode(self, message):
        self.table.add_row([
            '{} - {}'.format(self.phase, message['name']),
            message['outcome']['label'],
            '{:.3f}'.format(message['duration_s']),
            message['ticks'],
            '{:.2f}'.format(1e3 * message['max_zmp_violation_m']),
            '{:.2f}'.format(message['mean_sqp_iterations']),
            '{:.2f}'.format(1e3 * message['mean_solve_time_s']),
        ])

        print(self.table)
