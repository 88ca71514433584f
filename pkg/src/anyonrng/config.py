import json
import logging
import os

from . import errors

LOG = logging.getLogger(__name__)

ENV_PREFIX = "ANYONRNG_"

DISTRIBUTIONS = ("uniform", "biased")
FORMATS = ("json", "csv")


class RunConfig(object):
    '''
    Every parameter of one command invocation.

    Values are layered: built-in defaults, then ``ANYONRNG_<NAME>`` environment
    variables, then a JSON config file, then explicit command-line flags.
    The whole configuration is embedded in every output file.
    '''

    DEFAULTS = {"trials": 10000,
                "distribution": "uniform",
                "alpha": 10.0,
                "delta": 0.001,
                "epsilon_prime": 0.01,
                "noise_kind": "logical_depolarizing",
                "noise_p": 0.0,
                "seed": 0,
                "level": "2",
                "grid": 21,
                "tolerance": 1e-7,
                "deduplicate": False,
                "threads": 1,
                "out": None,
                "format": "json",
                "records": None,
                "fcurve": None,
                "certificate": None,
                "l_hat": None,
                "threshold": 3.9,
                "threshold_count": 21,
                "k_min": 1000,
                "k_max": 10000000,
                "k_points": 41,
                "extractor_epsilon": 2.0 ** -64,
                "seed_file": None,
                "binary": None}

    PATH_KEYS = ("out", "records", "fcurve", "certificate", "seed_file", "binary")

    def __init__(self, command, **values):

        self.command = command

        for key, value in self.DEFAULTS.items():
            setattr(self, key, value)

        self.update(values)

    def update(self, values):

        for key, value in values.items():
            if key not in self.DEFAULTS:
                raise errors.ConfigError("Unknown configuration key '{}'".format(key))

            setattr(self, key, value)

    @staticmethod
    def coerce(value):

        if value.lower() == "true":
            return True

        elif value.lower() == "false":
            return False

        for kind in (int, float):
            try:
                return kind(value)
            except ValueError:
                pass

        return value

    @classmethod
    def environment_overrides(cls, environ=None):

        environ = os.environ if environ is None else environ
        overrides = {}

        for key, value in environ.items():
            if key.startswith(ENV_PREFIX):
                name = key.replace(ENV_PREFIX, "", 1).lower()

                if name in cls.DEFAULTS:
                    overrides[name] = cls.coerce(value)

                else:
                    LOG.debug("Ignoring unknown environment setting '{}'".format(key))

        return overrides

    @classmethod
    def load(cls, command, config_path=None, overrides=None, environ=None):
        '''
        Build the configuration for ``command``.

        :param config_path: Optional JSON file of parameter values
        :type config_path: str

        :param overrides: Command-line values; ``None`` entries are ignored
        :type overrides: dict

        :rtype: :py:class:`RunConfig`
        '''

        config = cls(command)
        config.update(cls.environment_overrides(environ))

        if config_path:
            with open(config_path) as handle:
                try:
                    data = json.load(handle)
                except ValueError as error:
                    raise errors.ConfigError("Config file '{}' is not valid JSON: {}".format(config_path, error))

            if not isinstance(data, dict):
                raise errors.ConfigError("Config file '{}' must hold a JSON object".format(config_path))

            config.update(data)

        config.update({key: value for key, value in (overrides or {}).items() if value is not None})

        LOG.debug("Run configuration:")
        for key, value in sorted(config.to_dict().items()):
            LOG.debug("  {}: '{}'".format(key, value))

        return config

    def _require(self, condition, message):
        if not condition:
            raise errors.ConfigError(message)

    @staticmethod
    def _is_int(value):
        return isinstance(value, int) and not isinstance(value, bool)

    @staticmethod
    def _is_number(value):
        return isinstance(value, (int, float)) and not isinstance(value, bool)

    def validate(self):

        from . import bound_solver
        from . import trial_engine

        self._require(self._is_int(self.trials) and self.trials >= 1, "trials must be a positive integer, got {!r}".format(self.trials))
        self._require(self.distribution in DISTRIBUTIONS, "distribution must be one of {}, got {!r}".format(DISTRIBUTIONS, self.distribution))
        self._require(self._is_number(self.alpha) and self.alpha > 0, "alpha must be positive, got {!r}".format(self.alpha))

        for key in ("delta", "epsilon_prime"):
            value = getattr(self, key)
            self._require(self._is_number(value) and 0 < value < 1, "{} must lie in (0, 1), got {!r}".format(key, value))

        self._require(self.noise_kind in trial_engine.NOISE_KINDS, "noise_kind must be one of {}, got {!r}".format(trial_engine.NOISE_KINDS, self.noise_kind))
        self._require(self._is_number(self.noise_p) and 0 <= self.noise_p <= 1, "noise_p must lie in [0, 1], got {!r}".format(self.noise_p))
        self._require(self._is_int(self.seed) and self.seed >= 0, "seed must be a non-negative integer, got {!r}".format(self.seed))

        self._require(str(self.level) in bound_solver.LEVELS, "level must be one of {}, got {!r}".format(bound_solver.LEVELS, self.level))
        self.level = str(self.level)

        self._require(self._is_int(self.grid) and self.grid >= 2, "grid must be an integer >= 2, got {!r}".format(self.grid))
        self._require(self._is_number(self.tolerance) and self.tolerance > 0, "tolerance must be positive, got {!r}".format(self.tolerance))
        self._require(self._is_int(self.threads) and self.threads >= 1, "threads must be a positive integer, got {!r}".format(self.threads))
        self._require(self.format in FORMATS, "format must be one of {}, got {!r}".format(FORMATS, self.format))

        self._require(self.l_hat is None or self._is_number(self.l_hat), "l_hat must be a number, got {!r}".format(self.l_hat))
        self._require(self._is_number(self.threshold) and 2 < self.threshold <= 4, "threshold must lie in (2, 4], got {!r}".format(self.threshold))
        self._require(self._is_int(self.threshold_count) and self.threshold_count >= 2,
                      "threshold_count must be an integer >= 2, got {!r}".format(self.threshold_count))

        self._require(self._is_number(self.k_min) and self._is_number(self.k_max) and 0 < self.k_min < self.k_max,
                      "k_min and k_max must satisfy 0 < k_min < k_max, got {!r} and {!r}".format(self.k_min, self.k_max))
        self._require(self._is_int(self.k_points) and self.k_points >= 2, "k_points must be an integer >= 2, got {!r}".format(self.k_points))
        self._require(self._is_number(self.extractor_epsilon) and 0 < self.extractor_epsilon <= 1,
                      "extractor_epsilon must lie in (0, 1], got {!r}".format(self.extractor_epsilon))

        return True

    def to_dict(self):

        from . import outputs

        data = {"command": self.command}
        for key in self.DEFAULTS:
            value = getattr(self, key)

            if key in self.PATH_KEYS and value:
                value = outputs.normalize_path(value)

            data[key] = value

        return data
