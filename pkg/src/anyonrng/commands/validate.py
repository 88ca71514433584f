import logging

from .. import errors
from .. import outputs
from .. import validation
from . import command

LOG = logging.getLogger(__name__)


class ValidateCommand(command.Command):

    COMMANDS = ["validate"]
    HELP = "run the physics acceptance checks (braids, CNOT branches, GHZ)"
    DEFAULT_OUTPUT = "validation.json"

    def run(self):

        results = validation.run_acceptance_suite(self.config.seed)

        for result in results:
            print("{:<32} {:<4} deviation {:.3g}".format(result.name, "ok" if result.passed else "FAIL", result.deviation))

        if self.config.out:
            outputs.write_json(self.config.out, {"checks": [result.to_dict() for result in results]}, self.config)

        failed = [result.name for result in results if not result.passed]
        if failed:
            raise errors.DataIntegrityError("{} acceptance check(s) failed: {}".format(len(failed), ", ".join(failed)))

        return 0
