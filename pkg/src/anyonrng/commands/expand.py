import logging
import math

import numpy as np

from .. import certifier
from .. import outputs
from . import command

LOG = logging.getLogger(__name__)


class ExpandCommand(command.Command):
    '''
    Net randomness of the biased settings family over a logarithmic k grid.
    '''

    COMMANDS = ["expand"]
    HELP = "tabulate net randomness against the number of trials"
    DEFAULT_OUTPUT = "expansion.csv"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--fcurve", help="f-curve file written by 'fcurve'")
        parser.add_argument("--alpha", type=float, help="bias strength of the biased distribution")
        parser.add_argument("--delta", type=float, help="failure probability delta")
        parser.add_argument("--epsilon-prime", type=float, help="closeness parameter epsilon'")
        parser.add_argument("--threshold", type=float, help="violation threshold L_m")
        parser.add_argument("--k-min", type=float, help="smallest k of the grid")
        parser.add_argument("--k-max", type=float, help="largest k of the grid")
        parser.add_argument("--k-points", type=int, help="number of grid points")

    def k_grid(self):
        config = self.config
        grid = np.logspace(math.log10(config.k_min), math.log10(config.k_max), config.k_points)
        return [int(k) for k in np.unique(np.round(grid))]

    def run(self):

        config = self.config
        fcurve = self.load_fcurve()

        curve = certifier.net_randomness_curve(self.k_grid(), config.alpha, fcurve, config.threshold,
                                               config.delta, config.epsilon_prime)

        path = self.output_path()

        if config.format == "csv":
            outputs.write_csv(path, certifier.EXPANSION_CSV_HEADER, curve.csv_rows(), config,
                              metadata={"alpha": curve.alpha, "threshold": curve.threshold, "crossing_k": curve.crossing_k})

        else:
            outputs.write_json(path, {"expansion": curve.to_dict()}, config)

        if curve.crossing_k is None:
            print("Net randomness does not turn positive on this grid")

        else:
            print("Net randomness turns positive at k = {:.4g}".format(curve.crossing_k))

        return 0
