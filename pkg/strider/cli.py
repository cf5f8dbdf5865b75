import os
import re
import sys
import argparse
import logging

from strider import __version__
from strider.datasets import ScenarioInvalid, read_scenario, scenario_catalog, write_scenario
from strider.nmpc import strategy
from strider.utils.artifacts import SaveProblemHook, SaveTrajectoryHook
from strider.utils.logging import LoggingHook
from strider.utils.workflows import (
    COMPLETED,
    FALLEN,
    Episode,
    push_table,
    max_push_search,
    strategy_sweep,
    timing_study,
    timing_table,
    with_push,
)

from prettytable import PrettyTable


EXIT_COMPLETED = 0
EXIT_CONFIG_ERROR = 1
EXIT_FALLEN = 2
EXIT_SOLVER_FAILED = 3


class ConfigError(ValueError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """
    Command line errors are configuration errors and exit with 1, 2 is the exit code of a fallen robot.
    """
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG_ERROR, '{}: error: {}\n'.format(self.prog, message))


def exit_code(outcome):
    if outcome.kind == COMPLETED:
        return EXIT_COMPLETED

    if outcome.kind == FALLEN:
        return EXIT_FALLEN

    return EXIT_SOLVER_FAILED


def _normalized(name):
    return re.sub(r'[^a-z0-9]', '', name.lower())


def load_scenario(reference):
    """
    A scenario given as a path to a JSON file or as the name of a built-in scenario. Names match by prefix,
    ignoring case, punctuation and leading directories, so that scenarios/stairs3d selects stairs-3d.
    """
    if os.path.isfile(reference):
        return read_scenario(reference)

    catalog = scenario_catalog()

    key = _normalized(os.path.basename(reference.rstrip('/\\')))

    if key.endswith('json'):
        key = key[:-len('json')]

    matches = [name for name in catalog if key and _normalized(name).startswith(key)]

    if len(matches) != 1:
        raise ConfigError('No scenario file or unique built-in scenario matches {} (built-in: {})'.format(
            reference, ', '.join(catalog)
        ))

    return catalog[matches[0]]


def parse_push(value):
    try:
        force_x, force_y = (float(token) for token in value.split(','))
    except ValueError:
        raise ConfigError('A push is given as FX,FY in N, got {}'.format(value))

    return force_x, force_y


def parse_iterations(value):
    """
    SQP iteration counts given as a range 1..6 or as a list 1,2,3.
    """
    try:
        if '..' in value:
            first, last = (int(token) for token in value.split('..'))
            counts = list(range(first, last + 1))
        else:
            counts = [int(token) for token in value.split(',')]
    except ValueError:
        raise ConfigError('Iteration counts are given as 1..6 or 1,2,3, got {}'.format(value))

    if not counts or min(counts) < 1:
        raise ConfigError('Iteration counts must be positive, got {}'.format(value))

    return counts


def _toggles(scenario, number):
    if number is None:
        return scenario.toggles

    return strategy(number, scenario.toggles.equality_scope)


def cmd_run(args):
    scenario = load_scenario(args.scenario)

    if args.push is not None:
        scenario = with_push(scenario, *parse_push(args.push))

    toggles = _toggles(scenario, args.strategy)

    episode = Episode(scenario, toggles=toggles)

    # the dispatcher holds weak references, hooks stay alive until the episode ends
    hooks = [LoggingHook(episode.id, 'Strategy {}'.format(toggles.number))]

    if args.out is not None:
        if not os.path.exists(args.out):
            os.makedirs(args.out)

        hooks.append(SaveTrajectoryHook(episode.id, '', args.out))

        if args.dump_problems:
            hooks.append(SaveProblemHook(episode.id, args.out, every=args.dump_problems))

    _, outcome = episode.run()

    return exit_code(outcome)


def cmd_maxpush(args):
    scenario = load_scenario(args.scenario)

    search = {'resolution': args.resolution, 'initial': args.initial, 'limit': args.limit}

    if args.strategy == 'all':
        results = strategy_sweep(scenario, args.axis, equality_scope=scenario.toggles.equality_scope, **search)
    else:
        try:
            number = int(args.strategy)
            toggles = strategy(number, scenario.toggles.equality_scope)
        except ValueError:
            raise ConfigError('The strategy must be 1, 2, 3, 4 or all, got {}'.format(args.strategy))

        results = {number: max_push_search(scenario, args.axis, toggles, **search)}

    print(push_table(scenario.name, args.axis, results))

    return EXIT_COMPLETED


def cmd_timing(args):
    scenario = load_scenario(args.scenario)

    rows = timing_study(scenario, parse_iterations(args.ns), _toggles(scenario, args.strategy))

    print(timing_table(rows))

    return EXIT_COMPLETED


def cmd_catalog(args):
    catalog = scenario_catalog()

    if args.out is None:
        table = PrettyTable()
        table.field_names = ['Name', 'Strategy', 'Description']

        for name, scenario in catalog.items():
            table.add_row([name, scenario.toggles.number, scenario.description])

        print(table)

        return EXIT_COMPLETED

    if not os.path.exists(args.out):
        os.makedirs(args.out)

    for name, scenario in catalog.items():
        path = write_scenario(scenario, os.path.join(args.out, '{}.json'.format(name)))

        logging.info('INFO: Wrote scenario {} to {}'.format(name, path))

    return EXIT_COMPLETED


def build_parser():
    parser = ArgumentParser(prog='strider', description='Robust walking pattern generation by NMPC')

    parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
    parser.add_argument('--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    commands = parser.add_subparsers(dest='command', parser_class=ArgumentParser)
    commands.required = True

    run = commands.add_parser('run', help='run one closed-loop episode')
    run.add_argument('scenario', help='scenario JSON file or built-in scenario name')
    run.add_argument('--strategy', type=int, choices=[1, 2, 3, 4], help='strategy replacing the scenario toggles')
    run.add_argument('--push', help='single push FX,FY in N replacing the scenario disturbances')
    run.add_argument('--out', help='directory receiving trajectory.csv and summary.json')
    run.add_argument('--dump-problems', type=int, default=0, metavar='N',
                     help='with --out, dump the QCQP of every N-th tick')
    run.set_defaults(handler=cmd_run)

    maxpush = commands.add_parser('maxpush', help='search the maximal push the robot rejects')
    maxpush.add_argument('scenario', help='scenario JSON file or built-in scenario name')
    maxpush.add_argument('--axis', choices=['x', 'y'], default='x')
    maxpush.add_argument('--strategy', default='all', help='1, 2, 3, 4 or all')
    maxpush.add_argument('--resolution', type=float, default=1.0, help='bisection resolution in N')
    maxpush.add_argument('--initial', type=float, default=50.0, help='first force in N')
    maxpush.add_argument('--limit', type=float, default=1000.0, help='largest force in N')
    maxpush.set_defaults(handler=cmd_maxpush)

    timing = commands.add_parser('timing', help='SQP iteration count against accuracy and solve time')
    timing.add_argument('scenario', nargs='?', default='timing-gait')
    timing.add_argument('--ns', default='1..6', help='SQP iteration counts, 1..6 or 1,2,3')
    timing.add_argument('--strategy', type=int, choices=[1, 2, 3, 4])
    timing.set_defaults(handler=cmd_timing)

    catalog = commands.add_parser('catalog', help='list or export the built-in scenarios')
    catalog.add_argument('--out', help='directory receiving one JSON file per scenario')
    catalog.set_defaults(handler=cmd_catalog)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    logging.basicConfig(level=getattr(logging, args.log_level))

    try:
        return args.handler(args)
    except (ScenarioInvalid, ConfigError, FileNotFoundError) as error:
        logging.error('ERROR: {}'.format(error))

        return EXIT_CONFIG_ERROR


if __name__ == '__main__':
    sys.exit(main())
