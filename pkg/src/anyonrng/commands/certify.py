import logging

from .. import certifier
from .. import mabk_stats
from .. import outputs
from .. import trial_engine
from . import command

LOG = logging.getLogger(__name__)


class CertifyCommand(command.Command):
    '''
    Certify the min-entropy of a simulated record set (--records) or of an
    observed violation given directly (--l-hat with --trials).
    '''

    COMMANDS = ["certify"]
    HELP = "turn an observed violation into a certified min-entropy bound"
    DEFAULT_OUTPUT = "certificate.json"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--records", help="records CSV written by 'simulate'")
        parser.add_argument("--l-hat", type=float, help="observed violation, instead of --records")
        parser.add_argument("--trials", type=int, help="number of trials behind --l-hat")
        parser.add_argument("--fcurve", help="f-curve file written by 'fcurve'")
        parser.add_argument("--distribution", choices=("uniform", "biased"), help="settings distribution used")
        parser.add_argument("--alpha", type=float, help="bias strength of the biased distribution")
        parser.add_argument("--delta", type=float, help="failure probability delta")
        parser.add_argument("--epsilon-prime", type=float, help="closeness parameter epsilon'")
        parser.add_argument("--threshold-count", type=int, help="number of violation thresholds on [2, 4]")

    def estimate(self):

        config = self.config

        if config.records:
            records = trial_engine.records_from_csv(config.records)
            dist = self.settings_distribution(len(records))
            return mabk_stats.estimate(records, dist), dist

        l_hat = self.require("l_hat")
        return mabk_stats.ViolationEstimate(float(l_hat), config.trials, {}), self.settings_distribution(config.trials)

    def run(self):

        config = self.config
        fcurve = self.load_fcurve()
        estimate, dist = self.estimate()

        params = certifier.CertificationParams.for_distribution(estimate.k, dist, config.delta, config.epsilon_prime,
                                                                certifier.default_thresholds(config.threshold_count))
        certificate = certifier.certify(estimate, params, fcurve)

        outputs.write_json(self.output_path("json"),
                           {"certificate": certificate.to_dict(),
                            "estimate": estimate.to_dict(),
                            "distribution": dist.to_dict()},
                           config)

        print("Certified min-entropy: {:.3f} bits (net {:.3f})".format(certificate.bound_bits, certificate.net_bits))

        return 0
