class AnyonRngError(Exception):
    pass


class InvalidArgumentError(AnyonRngError, ValueError):
    pass


class ConfigError(InvalidArgumentError):
    pass


class ProtocolError(AnyonRngError):
    pass


class SolverError(AnyonRngError):
    pass


class DataIntegrityError(AnyonRngError):
    pass


class InternalError(AnyonRngError):
    pass
