'''
Certified min-entropy from an observed MABK violation.

For k trials with settings drawn with minimum probability r, either the
observed event has probability at most delta, or the output string carries at
least

    k f(L_m - epsilon) - log2(1/delta)

bits of min-entropy, where L_m is the highest threshold at or below L-hat and
epsilon = (4 + 1/r) sqrt(-2 ln(epsilon') / k) is the martingale deviation.
'''

import concurrent.futures
import itertools
import logging
import math

import numpy as np
import scipy.optimize

from . import errors
from . import mabk_stats
from . import trial_engine

LOG = logging.getLogger(__name__)

DEFAULT_DELTA = 0.001
DEFAULT_EPSILON_PRIME = 0.01
DEFAULT_THRESHOLD_COUNT = 21
DEFAULT_EXPANSION_THRESHOLD = 3.9

EXPANSION_CSV_HEADER = ("k", "bound_bits", "input_bits", "net_bits")


class CertifierError(errors.InvalidArgumentError):
    pass


def default_thresholds(count=DEFAULT_THRESHOLD_COUNT):
    return np.linspace(mabk_stats.CLASSICAL_BOUND, mabk_stats.QUANTUM_BOUND, count)


def epsilon_of(k, r, epsilon_prime):
    '''
    Deviation epsilon = (4 + 1/r) sqrt(-2 ln(epsilon') / k).

    :param k: Number of trials, >= 1
    :param r: Minimum settings probability in (0, 1]
    :param epsilon_prime: Closeness parameter in (0, 1)

    :rtype: float
    '''

    if not k >= 1:
        raise CertifierError("k must be at least 1, got {}".format(k))

    if not 0 < r <= 1:
        raise CertifierError("r must lie in (0, 1], got {}".format(r))

    if not 0 < epsilon_prime < 1:
        raise CertifierError("epsilon' must lie in (0, 1), got {}".format(epsilon_prime))

    return (4.0 + 1.0 / r) * math.sqrt(-2.0 * math.log(epsilon_prime) / k)


def input_bits(k, dist):
    '''
    Randomness consumed by the settings: k times the Shannon entropy of one draw.
    '''
    return k * dist.entropy_bits()


class CertificationParams(object):

    def __init__(self, k, r, delta=DEFAULT_DELTA, epsilon_prime=DEFAULT_EPSILON_PRIME, thresholds=None,
                 entropy_per_trial=None):

        self.k = k
        self.r = r
        self.delta = delta
        self.epsilon_prime = epsilon_prime
        self.thresholds = default_thresholds() if thresholds is None else np.asarray(thresholds, dtype=float)
        self.entropy_per_trial = entropy_per_trial

        self.validate()

    def validate(self):

        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise CertifierError("k must be a positive integer, got {!r}".format(self.k))

        if not 0 < self.r <= 0.25:
            raise CertifierError("r must lie in (0, 1/4], got {}".format(self.r))

        for name in ("delta", "epsilon_prime"):
            if not 0 < getattr(self, name) < 1:
                raise CertifierError("{} must lie in (0, 1), got {}".format(name, getattr(self, name)))

        thresholds = self.thresholds
        if (thresholds.ndim != 1 or len(thresholds) < 2 or np.any(np.diff(thresholds) <= 0)
                or thresholds[0] != mabk_stats.CLASSICAL_BOUND or thresholds[-1] != mabk_stats.QUANTUM_BOUND):
            raise CertifierError("Thresholds must increase strictly from 2 to 4")

    @property
    def epsilon(self):
        return epsilon_of(self.k, self.r, self.epsilon_prime)

    @classmethod
    def for_distribution(cls, k, dist, delta=DEFAULT_DELTA, epsilon_prime=DEFAULT_EPSILON_PRIME, thresholds=None):
        return cls(k, dist.r, delta, epsilon_prime, thresholds, entropy_per_trial=dist.entropy_bits())

    def to_dict(self):
        return {"k": self.k,
                "r": self.r,
                "delta": self.delta,
                "epsilon_prime": self.epsilon_prime,
                "thresholds": [float(value) for value in self.thresholds],
                "entropy_per_trial": self.entropy_per_trial}


class EntropyCertificate(object):

    FIELDS = ("k", "l_hat", "m", "threshold", "epsilon", "f_value", "bound_bits", "input_bits", "net_bits",
              "delta", "epsilon_prime", "r", "thresholds")

    def __init__(self, **values):
        missing = set(self.FIELDS) - set(values)
        if missing:
            raise CertifierError("Certificate is missing {}".format(sorted(missing)))

        for field in self.FIELDS:
            setattr(self, field, values[field])

    def to_dict(self):
        return {field: getattr(self, field) for field in self.FIELDS}

    @classmethod
    def from_dict(cls, data):
        return cls(**{field: data[field] for field in cls.FIELDS})

    def __eq__(self, other):
        return isinstance(other, EntropyCertificate) and self.to_dict() == other.to_dict()


def threshold_index(l_hat, thresholds):
    '''
    Index m of the highest threshold at or below ``l_hat``, or -1 below them all.
    '''
    return int(np.searchsorted(thresholds, l_hat, side="right")) - 1


def bound_bits(k, f_value, delta):
    return max(0.0, k * f_value - math.log2(1.0 / delta))


def certify(estimate, params, fcurve):
    '''
    Certified min-entropy bound for an observed violation.

    :param estimate: The observed violation
    :type estimate: :py:class:`~anyonrng.mabk_stats.ViolationEstimate`

    :param params: Certification parameters; ``params.k`` must equal ``estimate.k``
    :type params: :py:class:`CertificationParams`

    :param fcurve: f(L) table
    :type fcurve: :py:class:`~anyonrng.bound_solver.FCurveTable`

    :rtype: :py:class:`EntropyCertificate`
    '''

    l_hat = estimate.l_hat

    if estimate.k != params.k:
        raise CertifierError("The estimate covers {} trials but the parameters expect {}".format(estimate.k, params.k))

    if not math.isfinite(l_hat):
        raise errors.DataIntegrityError("L-hat is not finite: {}".format(l_hat))

    epsilon = params.epsilon

    if l_hat > mabk_stats.QUANTUM_BOUND + epsilon:
        raise errors.DataIntegrityError("L-hat = {} exceeds the quantum bound 4 by more than epsilon = {}".format(l_hat, epsilon))

    m = threshold_index(min(l_hat, mabk_stats.QUANTUM_BOUND), params.thresholds)

    if m < 0:
        LOG.info("L-hat = {} is below every threshold, no entropy certified".format(l_hat))
        threshold = None
        f_value = 0.0

    else:
        threshold = float(params.thresholds[m])
        f_value = fcurve.evaluate(threshold - epsilon)

    bound = bound_bits(params.k, f_value, params.delta)
    consumed = params.k * params.entropy_per_trial if params.entropy_per_trial is not None else 0.0

    LOG.debug("certify: k={} l_hat={} m={} epsilon={} f={} bound={}".format(params.k, l_hat, m, epsilon, f_value, bound))

    return EntropyCertificate(k=params.k,
                              l_hat=float(l_hat),
                              m=m,
                              threshold=threshold,
                              epsilon=epsilon,
                              f_value=f_value,
                              bound_bits=bound,
                              input_bits=consumed,
                              net_bits=bound - consumed,
                              delta=params.delta,
                              epsilon_prime=params.epsilon_prime,
                              r=params.r,
                              thresholds=[float(value) for value in params.thresholds])


class _ThresholdEstimate(object):

    def __init__(self, l_hat, k):
        self.l_hat = l_hat
        self.k = k


def bound_at_threshold(k, dist, fcurve, threshold=DEFAULT_EXPANSION_THRESHOLD, delta=DEFAULT_DELTA,
                       epsilon_prime=DEFAULT_EPSILON_PRIME):
    '''
    Certificate for an observed violation lying just above ``threshold``.
    '''

    thresholds = np.union1d(default_thresholds(), [threshold])
    params = CertificationParams.for_distribution(k, dist, delta, epsilon_prime, thresholds)

    return certify(_ThresholdEstimate(threshold, k), params, fcurve)


class ExpansionCurve(object):
    '''
    Net randomness k -> bound_bits - input_bits for the biased settings
    family, alongside the bound the uniform distribution would give.
    '''

    def __init__(self, rows, crossing_k, alpha, threshold):
        self.rows = rows
        self.crossing_k = crossing_k
        self.alpha = alpha
        self.threshold = threshold

    def csv_rows(self):
        return [[row[field] for field in EXPANSION_CSV_HEADER] for row in self.rows]

    def to_dict(self):
        return {"alpha": self.alpha, "threshold": self.threshold, "crossing_k": self.crossing_k, "rows": self.rows}


def net_randomness(k, alpha, fcurve, threshold=DEFAULT_EXPANSION_THRESHOLD, delta=DEFAULT_DELTA,
                   epsilon_prime=DEFAULT_EPSILON_PRIME):
    certificate = bound_at_threshold(k, trial_engine.biased_distribution(k, alpha), fcurve, threshold, delta, epsilon_prime)
    return certificate.net_bits


def bound_curve(k_grid, fcurve, alpha, threshold=DEFAULT_EXPANSION_THRESHOLD, delta=DEFAULT_DELTA,
                epsilon_prime=DEFAULT_EPSILON_PRIME):
    '''
    Uniform and biased min-entropy bounds over ``k_grid``.

    :returns: One dict per k with ``uniform_bound_bits`` and ``biased_bound_bits``
    :rtype: list of dict
    '''

    rows = []
    for k in k_grid:
        k = int(k)
        uniform = bound_at_threshold(k, trial_engine.uniform_distribution(), fcurve, threshold, delta, epsilon_prime)
        biased = bound_at_threshold(k, trial_engine.biased_distribution(k, alpha), fcurve, threshold, delta, epsilon_prime)
        rows.append({"k": k, "uniform_bound_bits": uniform.bound_bits, "biased_bound_bits": biased.bound_bits})

    return rows


def net_randomness_curve(k_grid, alpha, fcurve, threshold=DEFAULT_EXPANSION_THRESHOLD, delta=DEFAULT_DELTA,
                         epsilon_prime=DEFAULT_EPSILON_PRIME):
    '''
    Net randomness over ``k_grid`` for biased_distribution(k, alpha) with the
    observed violation at ``threshold``, and the k where it turns positive.

    :rtype: :py:class:`ExpansionCurve`
    '''

    if not alpha > 0:
        raise CertifierError("alpha must be positive, got {}".format(alpha))

    k_grid = [int(k) for k in k_grid]
    if any(not k > (3 * alpha) ** 2 for k in k_grid):
        raise CertifierError("Every k must exceed (3 alpha)^2 = {}".format((3 * alpha) ** 2))

    rows = []
    for k in k_grid:
        biased = bound_at_threshold(k, trial_engine.biased_distribution(k, alpha), fcurve, threshold, delta, epsilon_prime)
        uniform = bound_at_threshold(k, trial_engine.uniform_distribution(), fcurve, threshold, delta, epsilon_prime)

        rows.append({"k": k,
                     "bound_bits": biased.bound_bits,
                     "input_bits": biased.input_bits,
                     "net_bits": biased.net_bits,
                     "uniform_bound_bits": uniform.bound_bits,
                     "uniform_net_bits": uniform.net_bits})

    crossing_k = None
    for previous, current in zip(rows, rows[1:]):
        if previous["net_bits"] <= 0 < current["net_bits"]:
            crossing_k = _crossing(previous["k"], current["k"], alpha, fcurve, threshold, delta, epsilon_prime)
            break

    if crossing_k is None:
        LOG.info("Net randomness does not turn positive inside the k grid")

    else:
        LOG.info("Net randomness turns positive at k = {:.4g}".format(crossing_k))

    return ExpansionCurve(rows, crossing_k, alpha, threshold)


def _crossing(k_low, k_high, alpha, fcurve, threshold, delta, epsilon_prime):

    def net_at(log_k):
        return net_randomness(int(round(math.exp(log_k))), alpha, fcurve, threshold, delta, epsilon_prime)

    try:
        log_k = scipy.optimize.brentq(net_at, math.log(k_low), math.log(k_high), xtol=1e-6)

    except ValueError:
        return float(k_high)

    return float(math.exp(log_k))


class ConcentrationCheck(object):

    def __init__(self, rate, runs, k, epsilon, oracle_l, epsilon_prime, exceedances):
        self.rate = rate
        self.runs = runs
        self.k = k
        self.epsilon = epsilon
        self.oracle_l = oracle_l
        self.epsilon_prime = epsilon_prime
        self.exceedances = exceedances

    @property
    def limit(self):
        return self.epsilon_prime + 3.0 * math.sqrt(self.epsilon_prime * (1.0 - self.epsilon_prime) / self.runs)

    @property
    def passed(self):
        return self.rate <= self.limit

    def to_dict(self):
        return {"rate": self.rate, "runs": self.runs, "k": self.k, "epsilon": self.epsilon, "oracle_l": self.oracle_l,
                "epsilon_prime": self.epsilon_prime, "limit": self.limit, "passed": self.passed}


def _run_l_hat(run, k, noise, dist, seed):
    records = trial_engine.run_trials(k, dist, noise, (seed, run))
    return mabk_stats.estimate(records, dist).l_hat


def azuma_empirical_check(runs, k, noise, dist, seed, epsilon_prime=DEFAULT_EPSILON_PRIME, epsilon_scale=1.0, workers=1):
    '''
    Fraction of ``runs`` simulated experiments in which the device's true MABK
    value lies at or below L-hat - epsilon. The device is i.i.d., so the
    conditional expectation of every trial variable is its exact value L.

    :rtype: :py:class:`ConcentrationCheck`
    '''

    if runs < 100:
        raise CertifierError("The concentration check needs at least 100 runs, got {}".format(runs))

    oracle_l = trial_engine.oracle_violation(noise)
    epsilon = epsilon_scale * epsilon_of(k, dist.r, epsilon_prime)

    arguments = (range(runs), itertools.repeat(k), itertools.repeat(noise), itertools.repeat(dist), itertools.repeat(seed))

    if workers <= 1:
        l_hats = list(map(_run_l_hat, *arguments))

    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            l_hats = list(pool.map(_run_l_hat, *arguments, chunksize=max(1, runs // (4 * workers))))

    exceedances = sum(1 for l_hat in l_hats if oracle_l <= l_hat - epsilon)
    rate = exceedances / float(runs)

    LOG.info("Concentration check: {} of {} runs exceeded epsilon={:.4f} (L={:.4f})".format(exceedances, runs, epsilon, oracle_l))

    return ConcentrationCheck(rate, runs, k, epsilon, oracle_l, epsilon_prime, exceedances)
