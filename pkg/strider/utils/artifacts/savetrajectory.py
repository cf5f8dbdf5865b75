import os
import json
import numpy as np

from pydispatch import dispatcher
from strider import STRIDER_END_EPISODE_EVENT
from strider.utils.workflows import TrajectoryLog


TRAJECTORY_HEADER = '# strider-trajectory v1'


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()

    if isinstance(value, np.generic):
        return value.item()

    raise TypeError('Object of type {} is not JSON serializable'.format(type(value).__name__))


class SaveTrajectoryCSV:
    """
    Writes a TrajectoryLog as CSV: the first line is the schema version, the second the comma separated column
    names and every following line one control tick.

    .. code-block:: python

        from strider.utils.artifacts import SaveTrajectoryCSV

        saver = SaveTrajectoryCSV('/my/artifacts')

        saver(log)

    """
    def __init__(self, artifacts_dir):
        """
        :param artifacts_dir: The path of the directory where the trajectory shall be stored
        :type artifacts_dir: str
        """
        self.artifacts_dir = artifacts_dir

        if not os.path.exists(self.artifacts_dir):
            raise ValueError('The artifacts directory passed as parameter to SaveTrajectoryCSV does not exist')

    def __call__(self, log, filename='trajectory.csv'):
        """
        :param log: the trajectory of an episode
        :type log: TrajectoryLog
        :param filename: The filename that shall be used to save the trajectory
        :type filename: str
        :return: path of the written file
        """
        path = os.path.join(self.artifacts_dir, filename)

        np.savetxt(
            path,
            log.as_array(),
            delimiter=',',
            fmt='%.12g',
            header='{}\n{}'.format(TRAJECTORY_HEADER, ','.join(log.columns)),
            comments='',
        )

        return path


def load_trajectory_csv(path):
    """
    Reads back a trajectory written by SaveTrajectoryCSV.

    :param path: path of the CSV file
    :type path: str
    :return: TrajectoryLog
    """
    if not os.path.exists(path):
        raise FileNotFoundError('The trajectory file {} does not exist'.format(path))

    with open(path) as f:
        version = f.readline().strip()
        columns = f.readline().strip().split(',')

    if version != TRAJECTORY_HEADER:
        raise ValueError('Unsupported trajectory file version: {}'.format(version))

    log = TrajectoryLog(columns)

    log.rows = np.loadtxt(path, delimiter=',', skiprows=2, ndmin=2).reshape(-1, len(columns)).tolist()

    return log


class SaveEpisodeSummary:
    """
    Writes the summary of an episode (outcome, maximal violations, solver statistics) as JSON.

    .. code-block:: python

        from strider.utils.artifacts import SaveEpisodeSummary

        saver = SaveEpisodeSummary('/my/artifacts')

        saver(episode.summary)

    """
    def __init__(self, artifacts_dir):
        self.artifacts_dir = artifacts_dir

        if not os.path.exists(self.artifacts_dir):
            raise ValueError('The artifacts directory passed as parameter to SaveEpisodeSummary does not exist')

    def __call__(self, summary, filename='summary.json'):
        path = os.path.join(self.artifacts_dir, filename)

        # the trajectory goes to the CSV file
        summary = {key: value for key, value in summary.items() if key != 'log'}

        with open(path, 'w') as f:
            json.dump(summary, f, indent=4, default=_plain)

        return path


class SaveTrajectoryHook:
    """
    Saves the trajectory CSV and the JSON summary of every episode emitted by a workflow.

    .. code-block:: python

        from strider.utils.artifacts import SaveTrajectoryHook

        episode = # Eg. An instance of the Episode workflow

        saver = SaveTrajectoryHook(episode.id, 'stairs-3d', '/my/artifacts')

    """
    def __init__(self, workflow_id, phase, artifacts_dir):
        """
        :param workflow_id: the ID of the workflow that should be tracked by this hook
        :type workflow_id: UUID
        :param phase: prefix of the file names, empty for plain trajectory.csv and summary.json
        :type phase: str
        :param artifacts_dir: the path of the artifacts where the results of this hook should be stored
        :type artifacts_dir: str
        """
        dispatcher.connect(self.save_episode, signal=STRIDER_END_EPISODE_EVENT, sender=workflow_id)

        if not os.path.exists(artifacts_dir):
            raise ValueError('The directory specified to save artifacts does not exist!')

        self.artifacts_dir = artifacts_dir
        self.prefix = '{}_'.format(phase) if phase else ''

        self.trajectory_saver = SaveTrajectoryCSV(self.artifacts_dir)
        self.summary_saver = SaveEpisodeSummary(self.artifacts_dir)

    def save_episode(self, message):
        self.trajectory_saver(message['log'], '{}trajectory.csv'.format(self.prefix))
        self.summary_saver(message, '{}summary.json'.format(self.prefix))
