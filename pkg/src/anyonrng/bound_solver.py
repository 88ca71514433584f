'''
Upper bounds on the guessing probability P*(abc|xyz) given a MABK value, and
the min-entropy rate f(L) = -log2 P*.

Quantum correlations are relaxed with moment matrices over words in the six
dichotomic operators A_x, B_y, C_z (outcome projectors M^a = (1 + (-1)^a A)/2).
Words are reduced with A^2 = 1 and commutation across parties, and the
relaxation is real, so a moment and its adjoint share one variable.
No-signalling correlations are handled with a linear program.
'''

import concurrent.futures
import itertools
import logging
import math

import numpy as np
import scipy.optimize

from . import errors
from . import mabk_stats
from . import sdp
from . import trial_engine

LOG = logging.getLogger(__name__)

PARTY_NAMES = "ABC"
LETTERS = tuple((party, setting) for party in range(3) for setting in range(2))

LEVEL_1 = "1"
LEVEL_1_AB = "1+AB"
LEVEL_2 = "2"
LEVELS = (LEVEL_1, LEVEL_1_AB, LEVEL_2)
DEFAULT_LEVEL = LEVEL_2

MAX_F = 3.0
JITTER_WARNING = 1e-6
AUDIT_TOLERANCE = 1e-5
BOUNDARY_BACKOFF = 1e-3

NS_PAIR_MARGINALS = "pair"
NS_PARTY_MARGINALS = "party"
NS_MARGINALS = (NS_PAIR_MARGINALS, NS_PARTY_MARGINALS)

ALL_TRIPLES = tuple((outcomes, settings) for settings in mabk_stats.ALL_SETTINGS for outcomes in mabk_stats.ALL_OUTCOMES)


class MomentProblemError(errors.InvalidArgumentError):
    pass


class BoundSolverError(errors.SolverError):
    pass


def reduce_monomial(word):
    '''
    Normal form of a word: letters sorted by party (stable, since different
    parties commute) and adjacent repeats cancelled (A^2 = 1).
    '''

    reduced = []
    for letter in sorted(word, key=lambda letter: letter[0]):
        if reduced and reduced[-1] == letter:
            reduced.pop()
        else:
            reduced.append(letter)

    return tuple(reduced)


def adjoint(word):
    return reduce_monomial(tuple(reversed(word)))


def canonical_moment(word):
    word = reduce_monomial(word)
    return min(word, adjoint(word))


def monomial_name(word):
    return "".join("{}{}".format(PARTY_NAMES[party], setting) for party, setting in word) or "1"


def monomial_basis(level):
    '''
    Level "1": the identity and the six operators. Level "1+AB" adds every
    product of two operators from different parties. Level "2" also adds the
    same-party products A0A1, A1A0 and likewise for B and C.
    '''

    if level not in LEVELS:
        raise MomentProblemError("Unknown hierarchy level '{}', expected one of {}".format(level, LEVELS))

    basis = [()] + [(letter,) for letter in LETTERS]

    if level in (LEVEL_1_AB, LEVEL_2):
        basis += [(first, second) for first, second in itertools.combinations(LETTERS, 2) if first[0] != second[0]]

    if level == LEVEL_2:
        for party in range(3):
            basis += [((party, 0), (party, 1)), ((party, 1), (party, 0))]

    return basis


def mabk_terms():
    return [(mabk_stats.tau(*settings), tuple(zip(range(3), settings))) for settings in mabk_stats.SETTINGS_SUPPORT]


def probability_terms(outcomes, settings):
    '''
    P(abc|xyz) = (1/8) sum over subsets T of the parties of
    prod_{p in T} (-1)^{o_p} <prod_{p in T} X_p>.
    '''

    terms = []
    for subset in itertools.product((False, True), repeat=3):
        sign = 1.0
        word = []
        for party, included in enumerate(subset):
            if included:
                sign *= -1.0 if outcomes[party] else 1.0
                word.append((party, settings[party]))

        terms.append((sign / 8.0, tuple(word)))

    return terms


class MomentProblem(object):
    '''
    The moment-matrix relaxation of max P(abc|xyz) subject to L = l_target.

    ``index[i, j]`` is the moment variable of basis[i]^dagger basis[j];
    variable 0 is the identity moment, fixed to 1.
    '''

    def __init__(self, level, l_target, objective_triple):

        self.level = level
        self.l_target = float(l_target)
        self.objective_triple = objective_triple
        self.basis = monomial_basis(level)

        moments = {(): 0}
        index = np.zeros((self.dimension, self.dimension), dtype=int)

        for i, left in enumerate(self.basis):
            for j, right in enumerate(self.basis):
                key = canonical_moment(adjoint(left) + right)
                index[i, j] = moments.setdefault(key, len(moments))

        self.moments = list(moments)
        self.index = index
        self._moment_lookup = moments

        outcomes, settings = objective_triple
        self.constraint = self._functional(mabk_terms())
        self.objective = self._functional(probability_terms(outcomes, settings))

    @property
    def dimension(self):
        return len(self.basis)

    def _functional(self, terms):
        vector = np.zeros(len(self.moments))

        for coefficient, word in terms:
            key = canonical_moment(word)

            if key not in self._moment_lookup:
                raise MomentProblemError("Level '{}' has no moment for {}".format(self.level, monomial_name(key)))

            vector[self._moment_lookup[key]] += coefficient

        return vector

    def to_sdp(self):
        count = len(self.moments)
        selectors = (self.index[np.newaxis, :, :] == np.arange(count)[:, np.newaxis, np.newaxis]).astype(float)

        return sdp.SdpProblem(selectors[0], selectors[1:], self.objective[1:],
                              offset=self.objective[0],
                              equality_matrix=self.constraint[np.newaxis, 1:],
                              equality_rhs=[self.l_target - self.constraint[0]])


def _check_l_hat(l_hat):
    if not mabk_stats.CLASSICAL_BOUND <= l_hat <= mabk_stats.QUANTUM_BOUND:
        raise errors.InvalidArgumentError("l_hat must lie in [2, 4], got {}".format(l_hat))


def _check_triple(objective_triple):
    outcomes, settings = objective_triple

    if tuple(outcomes) not in mabk_stats.ALL_OUTCOMES or tuple(settings) not in mabk_stats.ALL_SETTINGS:
        raise MomentProblemError("Objective triple {} is not a pair of bit triples".format(objective_triple))


def build_moment_problem(level, l_target, objective_triple):
    '''
    Build the relaxation for one objective triple.

    :param level: ``"1"``, ``"1+AB"`` or ``"2"``. Level "1" has no
                  three-party moments and therefore always fails
    :type level: str

    :param l_target: Required MABK value in [2, 4]
    :type l_target: float

    :param objective_triple: ``((a, b, c), (x, y, z))``
    :type objective_triple: tuple

    :rtype: :py:class:`MomentProblem`
    '''

    if level not in LEVELS:
        raise MomentProblemError("Unknown hierarchy level '{}', expected one of {}".format(level, LEVELS))

    _check_l_hat(l_target)
    _check_triple(objective_triple)

    return MomentProblem(level, l_target, objective_triple)


def solve_triple(l_hat, level, objective_triple, tolerance=None):
    '''
    Relaxed maximum of P(abc|xyz) at MABK value ``l_hat``. The target is not
    range-checked, so values above 4 report an infeasible status.
    '''

    _check_triple(objective_triple)
    problem = MomentProblem(level, l_hat, objective_triple)
    return sdp.solve_sdp(problem.to_sdp(), tolerance=tolerance)


def accepted(solution):
    '''
    True when ``solution.upper_bound`` may be used as a bound on P*. A run
    that stopped early counts only if its dual certificate passes the audit.
    '''

    if solution.status == sdp.STATUS_OPTIMAL:
        return True

    if solution.status in (sdp.STATUS_MAX_ITERATIONS, sdp.STATUS_NUMERICAL_ERROR):
        return solution.audit(AUDIT_TOLERANCE)

    return False


class TripleBound(object):
    '''
    Upper bound on one P(abc|xyz). ``solved_at`` is the MABK value the bound
    was actually computed at; it is below ``l_hat`` only after a boundary
    back-off, which can only loosen the bound.
    '''

    def __init__(self, l_hat, value, status, gap, solved_at):
        self.l_hat = l_hat
        self.value = value
        self.status = status
        self.gap = gap
        self.solved_at = solved_at

    @property
    def ok(self):
        return not math.isnan(self.value)

    def __repr__(self):
        return "TripleBound(l_hat={}, value={}, status={!r}, solved_at={})".format(self.l_hat, self.value,
                                                                                  self.status, self.solved_at)


def bound_triple(l_hat, level, objective_triple, tolerance=None):
    '''
    Upper bound on P(abc|xyz) at ``l_hat``.

    The moment matrix loses its strict interior as L approaches 4 and the
    solver can stop short of its tolerance there. When the run is not
    accepted, the problem is solved again at ``l_hat - BOUNDARY_BACKOFF``.
    P* does not increase with L, so that value bounds P* at ``l_hat`` too.

    :rtype: :py:class:`TripleBound`
    '''

    solution = solve_triple(l_hat, level, objective_triple, tolerance)

    if accepted(solution):
        return TripleBound(l_hat, solution.upper_bound, solution.status, solution.gap, l_hat)

    backoff = l_hat - BOUNDARY_BACKOFF

    if solution.status != sdp.STATUS_INFEASIBLE and backoff > mabk_stats.CLASSICAL_BOUND:
        LOG.debug("Status '{}' at L={} for {}, solving again at L={}".format(solution.status, l_hat,
                                                                            objective_triple, backoff))
        retry = solve_triple(backoff, level, objective_triple, tolerance)

        if accepted(retry):
            return TripleBound(l_hat, retry.upper_bound, retry.status, retry.gap, backoff)

    return TripleBound(l_hat, float("nan"), solution.status, solution.gap, l_hat)


def _bound_job(arguments):
    return bound_triple(*arguments)


def _transform(triple, permutation, flips):
    outcomes, settings = triple
    outcomes = tuple(outcomes[party] ^ flips[party] for party in permutation)
    settings = tuple(settings[party] for party in permutation)
    return outcomes, settings


def symmetry_orbits(triples=ALL_TRIPLES):
    '''
    Group triples into orbits of the MABK symmetries: party permutations and
    flipping the outcomes of an even number of parties.

    :returns: Mapping from orbit representative to its members
    :rtype: dict
    '''

    flip_patterns = [flips for flips in itertools.product((0, 1), repeat=3) if sum(flips) % 2 == 0]
    orbits = {}

    for triple in triples:
        representative = min(_transform(triple, permutation, flips)
                             for permutation in itertools.permutations(range(3))
                             for flips in flip_patterns)
        orbits.setdefault(representative, []).append(triple)

    return orbits


def sweep_triples(l_hat, level=DEFAULT_LEVEL, tolerance=None, workers=1, deduplicate=False):
    '''
    Bound the relaxation for all 64 objective triples.

    :returns: Mapping from triple to :py:class:`TripleBound`
    :rtype: dict
    '''

    _check_l_hat(l_hat)

    if deduplicate:
        orbits = symmetry_orbits()
        targets = list(orbits)
    else:
        orbits = None
        targets = list(ALL_TRIPLES)

    jobs = [(l_hat, level, triple, tolerance) for triple in targets]

    if workers <= 1:
        bounds = [_bound_job(job) for job in jobs]

    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            bounds = list(pool.map(_bound_job, jobs))

    results = dict(zip(targets, bounds))

    if orbits is not None:
        results = {member: results[representative] for representative, members in orbits.items() for member in members}

    return results


def _best_bound(l_hat, results):

    failed = {triple: bound.status for triple, bound in results.items() if not bound.ok}

    if failed:
        raise BoundSolverError("SDP failed at l_hat={} for {} triple(s), e.g. {}".format(l_hat, len(failed),
                                                                                          next(iter(failed.items()))))

    best = max(results, key=lambda triple: results[triple].value)
    return best, results[best]


def guessing_probability(l_hat, level=DEFAULT_LEVEL, tolerance=None, workers=1, deduplicate=False):
    '''
    Maximum of the relaxed P(abc|xyz) over all 8 outcome triples and all 8
    setting triples, taken from the dual side of each solve.

    :returns: ``(p_star, (outcomes, settings))``
    :rtype: tuple
    '''

    best, bound = _best_bound(l_hat, sweep_triples(l_hat, level, tolerance, workers, deduplicate))

    LOG.info("P*(l_hat={}, level={}) = {:.6f} at {}".format(l_hat, level, bound.value, best))

    return bound.value, best


def f_from_p_star(p_star):
    return min(MAX_F, max(0.0, -math.log2(min(1.0, max(p_star, 2.0 ** -MAX_F)))))


def f_of_l(l_hat, level=DEFAULT_LEVEL, tolerance=None, workers=1, deduplicate=False):
    '''
    Min-entropy per trial, -log2 P*, clamped to 0 for l_hat <= 2.
    '''

    if l_hat <= mabk_stats.CLASSICAL_BOUND:
        return 0.0

    return f_from_p_star(guessing_probability(l_hat, level, tolerance, workers, deduplicate)[0])


def quantum_guessing_probability(noise=None):
    '''
    Largest P(abc|xyz) of the explicit GHZ realization; 1/4 when noiseless.
    '''

    table = trial_engine.exact_distribution(noise or trial_engine.NoiseSpec())
    return float(table.max())


class FCurveTable(object):
    '''
    Sampled f(L) on a grid in [2, 4], non-decreasing, evaluated by linear
    interpolation. Below the grid it is 0 and above it is the last value.
    '''

    CSV_HEADER = ("L", "f")

    def __init__(self, grid, values, metadata=None):

        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.metadata = dict(metadata or {})

        if self.grid.ndim != 1 or len(self.grid) < 2 or self.grid.shape != self.values.shape:
            raise errors.InvalidArgumentError("An f-curve needs matching grid and value arrays of length >= 2")

        if np.any(np.diff(self.grid) <= 0):
            raise errors.InvalidArgumentError("f-curve grid must be strictly increasing")

        if np.any(np.diff(self.values) < -1e-12) or self.values.min() < 0 or self.values.max() > MAX_F:
            raise errors.DataIntegrityError("f-curve values must be non-decreasing and within [0, {}]".format(MAX_F))

    def evaluate(self, l_value):
        return float(np.interp(l_value, self.grid, self.values, left=0.0, right=self.values[-1]))

    __call__ = evaluate

    def rows(self):
        return [(float(l_value), float(f_value)) for l_value, f_value in zip(self.grid, self.values)]

    def to_dict(self):
        return {"grid": [float(value) for value in self.grid],
                "f": [float(value) for value in self.values],
                "metadata": self.metadata}

    @classmethod
    def from_dict(cls, data):
        return cls(data["grid"], data["f"], data.get("metadata"))

    @classmethod
    def from_rows(cls, rows, metadata=None):
        rows = list(rows)
        return cls([float(row["L"]) for row in rows], [float(row["f"]) for row in rows], metadata)


def build_fcurve(grid_points=21, level=DEFAULT_LEVEL, tolerance=None, workers=1, deduplicate=False):
    '''
    Solve f on ``grid_points`` equally spaced values of L in [2, 4] and clean
    up solver jitter with a running maximum.

    :rtype: :py:class:`FCurveTable`
    '''

    if grid_points < 2:
        raise errors.InvalidArgumentError("An f-curve needs at least 2 grid points, got {}".format(grid_points))

    grid = np.linspace(mabk_stats.CLASSICAL_BOUND, mabk_stats.QUANTUM_BOUND, grid_points)
    raw = []
    points = []

    for l_value in grid:

        if l_value <= mabk_stats.CLASSICAL_BOUND:
            raw.append(0.0)
            points.append({"L": float(l_value), "p_star": 1.0, "gap": 0.0, "status": sdp.STATUS_OPTIMAL,
                           "solved_at": float(l_value), "argmax": None})
            continue

        results = sweep_triples(l_value, level, tolerance, workers, deduplicate)
        best, bound = _best_bound(l_value, results)
        solved_at = min(result.solved_at for result in results.values())

        raw.append(f_from_p_star(bound.value))
        points.append({"L": float(l_value), "p_star": float(bound.value), "gap": float(bound.gap),
                       "status": bound.status, "solved_at": float(solved_at),
                       "argmax": [list(best[0]), list(best[1])]})

        if solved_at < l_value:
            LOG.warning("Some triples at L={:.3f} were bounded at L={:.4f}".format(l_value, solved_at))

        LOG.info("f({:.3f}) = {:.6f}".format(l_value, raw[-1]))

    raw = np.array(raw)
    values = np.clip(np.maximum.accumulate(raw), 0.0, MAX_F)
    jitter = float(np.max(values - raw))

    if jitter > JITTER_WARNING:
        LOG.warning("Monotone cleanup moved f by up to {:.3g}".format(jitter))

    metadata = {"level": level,
                "tolerance": tolerance if tolerance is not None else sdp.DEFAULT_OPTIONS["tolerance"],
                "deduplicate": bool(deduplicate),
                "boundary_backoff": BOUNDARY_BACKOFF,
                "max_jitter": jitter,
                "points": points}

    return FCurveTable(grid, values, metadata)


class NoSignallingBound(object):

    def __init__(self, value, triple, status, probabilities=None):
        self.value = value
        self.triple = triple
        self.status = status
        self.probabilities = probabilities

    def to_dict(self):
        return {"value": self.value,
                "status": self.status,
                "argmax": None if self.triple is None else [list(self.triple[0]), list(self.triple[1])]}


def _joint_index(settings, outcomes):
    return int(np.ravel_multi_index(tuple(settings) + tuple(outcomes), (2,) * 6))


def _marginal_row(party, own_setting, own_outcome, other_settings, reference_settings):
    '''
    Row of P(own outcome | settings) at ``other_settings`` minus the same
    single-party marginal at ``reference_settings``.
    '''

    others = [other for other in range(3) if other != party]
    row = np.zeros(64)

    for remote, sign in ((other_settings, 1.0), (reference_settings, -1.0)):
        for remote_outcomes in itertools.product((0, 1), repeat=2):
            settings = [own_setting] * 3
            outcomes = [own_outcome] * 3

            for other, setting, outcome in zip(others, remote, remote_outcomes):
                settings[other] = setting
                outcomes[other] = outcome

            row[_joint_index(settings, outcomes)] += sign

    return row


def nosignalling_constraints(l_hat, marginals=NS_PAIR_MARGINALS):
    '''
    Equality constraints on the 64 probabilities P(abc|xyz): 8 normalizations,
    the no-signalling conditions and the MABK value.

    :param marginals: ``"pair"`` for the full polytope (48 rows: every
                      two-party marginal is independent of the third party's
                      setting) or ``"party"`` for the weaker set (36 rows:
                      every single-party marginal is independent of the other
                      two settings)
    :type marginals: str

    :returns: ``(A_eq, b_eq)``
    '''

    if marginals not in NS_MARGINALS:
        raise errors.InvalidArgumentError("marginals must be one of {}, got {!r}".format(NS_MARGINALS, marginals))

    rows = []
    rhs = []

    for settings in mabk_stats.ALL_SETTINGS:
        row = np.zeros(64)
        for outcomes in mabk_stats.ALL_OUTCOMES:
            row[_joint_index(settings, outcomes)] = 1.0

        rows.append(row)
        rhs.append(1.0)

    if marginals == NS_PAIR_MARGINALS:
        for party in range(3):
            others = [other for other in range(3) if other != party]

            for other_settings in itertools.product((0, 1), repeat=2):
                for other_outcomes in itertools.product((0, 1), repeat=2):
                    row = np.zeros(64)

                    for own_setting, sign in ((0, 1.0), (1, -1.0)):
                        for own_outcome in (0, 1):
                            settings = [own_setting] * 3
                            outcomes = [own_outcome] * 3

                            for other, setting, outcome in zip(others, other_settings, other_outcomes):
                                settings[other] = setting
                                outcomes[other] = outcome

                            row[_joint_index(settings, outcomes)] += sign

                    rows.append(row)
                    rhs.append(0.0)

    else:
        for party in range(3):
            for own_setting in (0, 1):
                for own_outcome in (0, 1):
                    for other_settings in list(itertools.product((0, 1), repeat=2))[1:]:
                        rows.append(_marginal_row(party, own_setting, own_outcome, other_settings, (0, 0)))
                        rhs.append(0.0)

    row = np.zeros(64)
    for settings in mabk_stats.SETTINGS_SUPPORT:
        for outcomes in mabk_stats.ALL_OUTCOMES:
            row[_joint_index(settings, outcomes)] = mabk_stats.tau(*settings) * mabk_stats.parity_class(*outcomes).sign

    rows.append(row)
    rhs.append(float(l_hat))

    return np.array(rows), np.array(rhs)


def nosignalling_max(l_hat, marginals=NS_PAIR_MARGINALS):
    '''
    Maximum of P(abc|xyz) over no-signalling boxes with MABK value ``l_hat``,
    over all 64 triples. Values above 4 are reported with an ``infeasible``
    status rather than raised.

    On the full polytope a box with P(abc|xyz) = 1 cannot reach L = 4, so the
    maximum there is below 1. With ``marginals="party"`` it is 1 for every
    l_hat in [2, 4].

    :rtype: :py:class:`NoSignallingBound`
    '''

    A_eq, b_eq = nosignalling_constraints(l_hat, marginals)
    best = NoSignallingBound(float("nan"), None, sdp.STATUS_INFEASIBLE)

    for triple in ALL_TRIPLES:
        cost = np.zeros(64)
        cost[_joint_index(triple[1], triple[0])] = -1.0

        result = scipy.optimize.linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=(0.0, 1.0), method="highs")

        if result.status == 2:
            LOG.debug("No-signalling LP infeasible at l_hat={}".format(l_hat))
            return best

        if result.status != 0:
            raise BoundSolverError("No-signalling LP failed at l_hat={}: {}".format(l_hat, result.message))

        value = -float(result.fun)
        if best.triple is None or value > best.value:
            best = NoSignallingBound(value, triple, sdp.STATUS_OPTIMAL, result.x.reshape((2,) * 6))

    LOG.info("No-signalling ({} marginals) max P(abc|xyz) at l_hat={} is {:.6f}".format(marginals, l_hat, best.value))

    return best
