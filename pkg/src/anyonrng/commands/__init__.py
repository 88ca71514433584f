from .. import command_registry

from . import simulate
from . import fcurve
from . import certify
from . import expand
from . import extract
from . import validate

command_registry.CommandRegistry.register(simulate.SimulateCommand)
command_registry.CommandRegistry.register(fcurve.FCurveCommand)
command_registry.CommandRegistry.register(certify.CertifyCommand)
command_registry.CommandRegistry.register(expand.ExpandCommand)
command_registry.CommandRegistry.register(extract.ExtractCommand)
command_registry.CommandRegistry.register(validate.ValidateCommand)
