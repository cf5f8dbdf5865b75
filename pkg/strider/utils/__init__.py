import os
import json


def merge_two_dicts(x, y):
    z = x.copy()
    z.update(y)
    return z


def read_json_from_file(json_file):
    if not os.path.exists(json_file):
        raise FileNotFoundError('The JSON file {} cannot be read'.format(json_file))

    with open(json_file) as json_file:
        dictionary = json.load(json_file)

    return dictionary


def worker_count(tasks=None):
    """
    Size of the worker pool of parallel sweeps: NMPC_THREADS when set, the number of CPUs otherwise, never more
    than the number of tasks.
    """
    value = os.environ.get('NMPC_THREADS', '').strip()

    if value:
        try:
            workers = int(value)
        except ValueError:
            raise ValueError('NMPC_THREADS must be a positive integer, got {}'.format(value))

        if workers < 1:
            raise ValueError('NMPC_THREADS must be a positive integer, got {}'.format(value))
    else:
        workers = os.cpu_count() or 1

    if tasks is not None:
        workers = min(workers, max(int(tasks), 1))

    return workers
