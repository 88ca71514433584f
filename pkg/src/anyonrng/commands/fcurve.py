import logging

from .. import bound_solver
from .. import outputs
from . import command

LOG = logging.getLogger(__name__)


class FCurveCommand(command.Command):

    COMMANDS = ["fcurve"]
    HELP = "tabulate the min-entropy rate f(L) with the moment-matrix SDP"
    DEFAULT_OUTPUT = "fcurve.json"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--level", choices=bound_solver.LEVELS, help="moment-matrix hierarchy level")
        parser.add_argument("--grid", type=int, help="number of equally spaced L values in [2, 4]")
        parser.add_argument("--tolerance", type=float, help="SDP stopping tolerance")
        parser.add_argument("--deduplicate", action="store_true", default=None,
                            help="solve one triple per symmetry orbit")

    def run(self):

        config = self.config
        table = bound_solver.build_fcurve(config.grid, config.level, config.tolerance,
                                          workers=config.threads, deduplicate=config.deduplicate)

        path = self.output_path()

        if config.format == "csv":
            outputs.write_csv(path, bound_solver.FCurveTable.CSV_HEADER, table.rows(), config, metadata=table.metadata)

        else:
            outputs.write_json(path, {"fcurve": table.to_dict()}, config)

        print("f(2) = {:.6f}, f(4) = {:.6f}".format(table.values[0], table.values[-1]))

        return 0
