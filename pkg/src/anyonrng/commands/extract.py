import logging

import numpy as np

from .. import certifier
from .. import errors
from .. import extractor
from .. import outputs
from .. import trial_engine
from . import command

LOG = logging.getLogger(__name__)


class ExtractCommand(command.Command):
    '''
    Hash the raw outcome bits of a record set down to the certified number of
    near-uniform bits.
    '''

    COMMANDS = ["extract"]
    HELP = "extract near-uniform bits with a seeded Toeplitz hash"
    DEFAULT_OUTPUT = "extracted.json"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--records", help="records CSV written by 'simulate'")
        parser.add_argument("--certificate", help="certificate JSON written by 'certify'")
        parser.add_argument("--seed-file", help="hex-encoded Toeplitz seed; drawn from --seed when absent")
        parser.add_argument("--extractor-epsilon", type=float, help="distance of the output from uniform")
        parser.add_argument("--binary", help="also write the extracted bits, packed, to this file")

    def toeplitz_seed(self, n, m):

        if self.config.seed_file:
            with open(self.config.seed_file) as handle:
                return extractor.ToeplitzSeed.from_hex(handle.read(), n, m)

        return extractor.ToeplitzSeed.random(n, m, np.random.default_rng(self.config.seed))

    def run(self):

        config = self.config
        records = trial_engine.records_from_csv(self.require("records"))
        certificate = certifier.EntropyCertificate.from_dict(outputs.read_json(self.require("certificate"))["certificate"])

        if certificate.k != len(records):
            raise errors.DataIntegrityError("The certificate covers {} trials but the records hold {}".format(certificate.k, len(records)))

        raw = extractor.raw_bits_from_records(records)
        m = extractor.output_length(certificate.bound_bits, config.extractor_epsilon)

        if m == 0:
            LOG.warning("The certified min-entropy of {:.3f} bits leaves nothing to extract".format(certificate.bound_bits))

        seed = self.toeplitz_seed(len(raw), m)
        bits = extractor.extract(raw, seed, m)

        outputs.write_json(self.output_path("json"),
                           {"n": len(raw),
                            "m": m,
                            "min_entropy_bits": certificate.bound_bits,
                            "raw_hex": extractor.bits_to_hex(raw),
                            "seed_hex": seed.to_hex(),
                            "output_hex": extractor.bits_to_hex(bits)},
                           config)

        if config.binary:
            outputs.write_bits(config.binary, bits)

        print("Extracted {} bits from {} raw bits".format(m, len(raw)))

        return 0
