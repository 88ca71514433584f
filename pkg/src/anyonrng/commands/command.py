import logging
import os

from .. import bound_solver
from .. import errors
from .. import outputs
from .. import trial_engine

LOG = logging.getLogger(__name__)


class Command(object):
    '''
    Base class for sub-commands. Child classes list the names they answer to
    in ``COMMANDS``, add their flags in add_arguments() and do their work in
    run(), which returns the process exit code.
    '''

    COMMANDS = []
    HELP = ""
    DEFAULT_OUTPUT = None

    def __init__(self, config):
        self.config = config

    @classmethod
    def add_arguments(cls, parser):
        pass

    def validate(self):
        return self.config.validate()

    def run(self):
        raise NotImplementedError

    def output_path(self, extension=None):
        '''
        The requested output path, or the command's default with the extension
        of the chosen format.
        '''

        if self.config.out:
            return self.config.out

        stem = os.path.splitext(self.DEFAULT_OUTPUT)[0]
        return "{}.{}".format(stem, extension or self.config.format)

    def settings_distribution(self, k):

        if self.config.distribution == "biased":
            return trial_engine.biased_distribution(k, self.config.alpha)

        return trial_engine.uniform_distribution()

    def noise_spec(self):
        return trial_engine.NoiseSpec(self.config.noise_kind, float(self.config.noise_p))

    def require(self, key):
        value = getattr(self.config, key)

        if value is None:
            raise errors.ConfigError("The '{}' command needs --{}".format(self.COMMANDS[0], key.replace("_", "-")))

        return value

    def load_fcurve(self):
        '''
        Read the f-curve named by --fcurve, written by the ``fcurve`` command in
        either format.
        '''

        path = self.require("fcurve")

        if path.lower().endswith(".json"):
            return bound_solver.FCurveTable.from_dict(outputs.read_json(path)["fcurve"])

        return bound_solver.FCurveTable.from_rows(outputs.read_csv(path))
