import argparse
import logging
import sys

from . import command_registry
from . import config as run_config
from . import errors

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_DATA = 4


def _add_common_arguments(parser):
    parser.add_argument("--config", help="JSON file of parameter values")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--threads", type=int, help="maximum worker processes (falls back to ANYONRNG_THREADS)")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--format", choices=run_config.FORMATS, help="output format")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")


def build_parser():
    parser = argparse.ArgumentParser(prog="anyonrng",
                                     description="Majorana-braiding randomness generation: simulate, bound, certify, extract.")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    for name in command_registry.CommandRegistry.names():
        command_class = command_registry.CommandRegistry.get_command_class(name)
        subparser = subparsers.add_parser(name, help=command_class.HELP, description=command_class.HELP)

        _add_common_arguments(subparser)
        command_class.add_arguments(subparser)

    return parser


def _log_level(arguments):

    if arguments.quiet:
        return logging.ERROR

    return {0: logging.WARNING, 1: logging.INFO}.get(arguments.verbose, logging.DEBUG)


def main(argv=None):
    '''
    Parse ``argv``, run the chosen command and return its exit code: 0 on
    success, 2 for usage, configuration and I/O errors, 3 for solver failures
    and 4 for data-integrity errors.
    '''

    parser = build_parser()

    try:
        arguments = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code

    logging.basicConfig(level=_log_level(arguments), format="%(levelname)s %(name)s: %(message)s")

    overrides = {key: value for key, value in vars(arguments).items() if key in run_config.RunConfig.DEFAULTS}

    try:
        config = run_config.RunConfig.load(arguments.command, arguments.config, overrides)
        command = command_registry.CommandRegistry.get_command_class(arguments.command)(config)
        command.validate()

        return command.run()

    except errors.InvalidArgumentError as error:
        LOG.error("{}".format(error))
        return EXIT_USAGE

    except OSError as error:
        LOG.error("I/O error: {}".format(error))
        return EXIT_USAGE

    except errors.SolverError as error:
        LOG.error("Solver failure: {}".format(error))
        return EXIT_SOLVER

    except (errors.DataIntegrityError, errors.ProtocolError) as error:
        LOG.error("Data integrity error: {}".format(error))
        return EXIT_DATA

    except errors.AnyonRngError as error:
        LOG.error("{}".format(error))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
