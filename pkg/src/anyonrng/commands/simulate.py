import logging
import os

from .. import mabk_stats
from .. import outputs
from .. import trial_engine
from . import command

LOG = logging.getLogger(__name__)


class SimulateCommand(command.Command):
    '''
    Run k protocol rounds, write the records as CSV and the violation estimate
    as JSON next to them.
    '''

    COMMANDS = ["simulate"]
    HELP = "run protocol rounds and estimate the MABK violation"
    DEFAULT_OUTPUT = "records.csv"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--trials", type=int, help="number of protocol rounds k")
        parser.add_argument("--distribution", choices=("uniform", "biased"), help="settings distribution")
        parser.add_argument("--alpha", type=float, help="bias strength of the biased distribution")
        parser.add_argument("--noise-kind", choices=trial_engine.NOISE_KINDS, help="noise model")
        parser.add_argument("--noise-p", type=float, help="per-qubit noise probability")

    @staticmethod
    def estimate_path(records_path):
        return "{}.estimate.json".format(os.path.splitext(records_path)[0])

    def run(self):

        config = self.config
        dist = self.settings_distribution(config.trials)
        noise = self.noise_spec()

        records = trial_engine.run_trials(config.trials, dist, noise, config.seed, workers=config.threads)
        estimate = mabk_stats.estimate(records, dist)

        records_path = self.output_path("csv")
        trial_engine.records_to_csv(records_path, records, config)
        outputs.write_json(self.estimate_path(records_path),
                           {"estimate": estimate.to_dict(),
                            "distribution": dist.to_dict(),
                            "noise": {"kind": noise.kind, "p": noise.p}},
                           config)

        print("L-hat = {!r} over {} trials".format(estimate.l_hat, estimate.k))

        return 0
