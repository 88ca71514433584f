from .errors import (AnyonRngError, InvalidArgumentError, ConfigError, ProtocolError, SolverError,
                     DataIntegrityError, InternalError)
from .majorana_sim import MajoranaRegister, FusionOutcome, new_vacuum, majorana_operator
from .logical_layer import LogicalState, QubitLayout, encode, prepare_ghz, readout
from .trial_engine import (SettingsDistribution, TrialRecord, NoiseSpec, uniform_distribution, biased_distribution,
                           run_trials)
from .mabk_stats import ViolationEstimate, estimate, trial_variable
from .sdp import SdpProblem, SdpSolution, solve_sdp
from .bound_solver import FCurveTable, build_moment_problem, guessing_probability, f_of_l, build_fcurve, nosignalling_max
from .certifier import CertificationParams, EntropyCertificate, certify, epsilon_of, input_bits
from .extractor import ToeplitzSeed, extract, output_length
from .config import RunConfig
