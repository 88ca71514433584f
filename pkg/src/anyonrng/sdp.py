'''
A small dense semidefinite-programming solver.

Problems are stated as linear matrix inequalities

    maximize    offset + c.y
    subject to  F_0 + sum_i y_i F_i  is positive semidefinite
                G y = h

The equalities are eliminated through a null-space basis of G. The reduced
problem is solved by an infeasible-start primal-dual path-following method
with the HKM search direction and Mehrotra predictor-corrector steps. The
Schur complement is factored with Cholesky.
'''

import logging
import math

import numpy as np
import scipy.linalg

from . import errors

LOG = logging.getLogger(__name__)

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_MAX_ITERATIONS = "max_iterations"
STATUS_NUMERICAL_ERROR = "numerical_error"

MAX_DIMENSION = 200
DIVERGENCE_LIMIT = 1e12

DEFAULT_OPTIONS = {"tolerance": 1e-7,
                   "max_iterations": 200,
                   "step": 0.95,
                   "feasibility_tolerance": 1e-6}


class SdpError(errors.SolverError):
    pass


def _symmetric(matrix):
    return 0.5 * (matrix + matrix.T)


class SdpProblem(object):
    '''
    :param constant: F_0, a symmetric d x d matrix
    :param coefficients: F_1 .. F_m stacked into an (m, d, d) array
    :param objective: c, length m
    :param offset: Constant added to the objective
    :param equality_matrix: G, shape (p, m), or None
    :param equality_rhs: h, length p, or None
    '''

    def __init__(self, constant, coefficients, objective, offset=0.0, equality_matrix=None, equality_rhs=None):

        self.constant = np.asarray(constant, dtype=float)
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.objective = np.asarray(objective, dtype=float)
        self.offset = float(offset)

        dimension = self.constant.shape[0]

        if self.constant.shape != (dimension, dimension) or dimension > MAX_DIMENSION:
            raise SdpError("The constant matrix must be square with side <= {}, got {}".format(MAX_DIMENSION, self.constant.shape))

        if self.coefficients.ndim != 3 or self.coefficients.shape[1:] != (dimension, dimension):
            raise SdpError("Coefficient matrices must have shape (m, {0}, {0}), got {1}".format(dimension, self.coefficients.shape))

        if self.objective.shape != (self.coefficients.shape[0],):
            raise SdpError("The objective needs {} entries, got {}".format(self.coefficients.shape[0], self.objective.shape))

        if not np.allclose(self.constant, self.constant.T) or not np.allclose(self.coefficients, self.coefficients.transpose(0, 2, 1)):
            raise SdpError("All constraint matrices must be symmetric")

        if equality_matrix is None:
            self.equality_matrix = np.zeros((0, self.variable_count))
            self.equality_rhs = np.zeros(0)

        else:
            self.equality_matrix = np.atleast_2d(np.asarray(equality_matrix, dtype=float))
            self.equality_rhs = np.atleast_1d(np.asarray(equality_rhs, dtype=float))

            if self.equality_matrix.shape != (len(self.equality_rhs), self.variable_count):
                raise SdpError("Equality matrix shape {} does not match {} right-hand sides and {} variables".format(
                    self.equality_matrix.shape, len(self.equality_rhs), self.variable_count))

    @property
    def dimension(self):
        return self.constant.shape[0]

    @property
    def variable_count(self):
        return self.coefficients.shape[0]

    def matrix(self, y):
        return self.constant + np.tensordot(y, self.coefficients, axes=1)

    def value(self, y):
        return self.offset + float(self.objective @ y)


class SdpSolution(object):
    '''
    Result of :py:func:`solve_sdp`.

    ``primal_matrix`` is F(y) at the returned point. ``dual_matrix`` is the
    dual certificate X, whose objective ``dual_bound`` is an upper bound on
    ``value`` when X is feasible.
    '''

    def __init__(self, status, value, y=None, primal_matrix=None, dual_matrix=None, gap=float("nan"),
                 iterations=0, dual_bound=float("nan"), dual_residual=float("nan")):
        self.status = status
        self.value = value
        self.y = y
        self.primal_matrix = primal_matrix
        self.dual_matrix = dual_matrix
        self.gap = gap
        self.iterations = iterations
        self.dual_bound = dual_bound
        self.dual_residual = dual_residual

    @property
    def success(self):
        return self.status == STATUS_OPTIMAL

    @property
    def upper_bound(self):
        '''
        The larger of the two objectives. For a maximization this is the side
        that never understates the optimum.
        '''
        return max(self.value, self.dual_bound)

    def audit(self, tolerance=1e-6):
        '''
        Weak-duality audit: both matrices PSD within 1e-8, the dual
        equalities met within ``tolerance`` and the dual bound within
        ``tolerance`` of the value.
        '''

        if self.primal_matrix is None or self.dual_matrix is None:
            return False

        if not (np.all(np.isfinite(self.primal_matrix)) and np.all(np.isfinite(self.dual_matrix))):
            return False

        primal_ok = scipy.linalg.eigvalsh(self.primal_matrix).min() >= -1e-8
        dual_ok = scipy.linalg.eigvalsh(self.dual_matrix).min() >= -1e-8
        residual_ok = self.dual_residual <= tolerance

        return bool(primal_ok and dual_ok and residual_ok and abs(self.dual_bound - self.value) <= tolerance)

    def __repr__(self):
        return "SdpSolution(status={!r}, value={!r}, gap={!r}, iterations={})".format(self.status, self.value,
                                                                                        self.gap, self.iterations)


def _max_step(matrix, direction):
    '''
    Largest alpha with matrix + alpha * direction PSD, for PD ``matrix``.
    '''

    smallest = scipy.linalg.eigh(direction, matrix, eigvals_only=True).min()
    return math.inf if smallest >= 0 else -1.0 / smallest


def _path_following(C, A, b, tolerance, max_iterations, step):
    '''
    Solve max b.t s.t. Z = C - sum_j t_j A_j PSD, together with its dual
    min <C, X> s.t. <A_j, X> = b_j, X PSD.
    '''

    n = C.shape[0]
    m = len(b)
    Avec = A.reshape(m, -1)
    identity = np.eye(n)

    norm_A = np.linalg.norm(Avec, axis=1)
    norm_b = np.linalg.norm(b)
    norm_C = np.linalg.norm(C)

    xi = max(10.0, math.sqrt(n), n * float(np.max((1.0 + np.abs(b)) / (1.0 + norm_A))))
    eta = max(10.0, math.sqrt(n), float(norm_A.max()), norm_C)

    X = xi * identity
    Z = eta * identity
    t = np.zeros(m)

    status = STATUS_MAX_ITERATIONS
    iteration = 0

    for iteration in range(1, max_iterations + 1):

        rp = b - Avec @ X.ravel()
        Rd = C - Z - (t @ Avec).reshape(n, n)

        pobj = float(np.vdot(C, X))
        dobj = float(b @ t)
        mu = float(np.vdot(X, Z)) / n

        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(rp) / (1.0 + norm_b)
        dinf = np.linalg.norm(Rd) / (1.0 + norm_C)

        LOG.debug("iter {:3d}: pobj={:.10g} dobj={:.10g} relgap={:.2e} pinf={:.2e} dinf={:.2e}".format(iteration, pobj, dobj, relgap, pinf, dinf))

        if relgap < tolerance and pinf < tolerance and dinf < tolerance:
            status = STATUS_OPTIMAL
            break

        if np.abs(X).max() > DIVERGENCE_LIMIT or np.abs(Z).max() > DIVERGENCE_LIMIT:
            LOG.debug("Iterates diverged after {} iterations".format(iteration))
            break

        try:
            W = _symmetric(scipy.linalg.cho_solve(scipy.linalg.cho_factor(Z), identity))
            schur = _symmetric(Avec @ (W @ A @ X).reshape(m, -1).T)

        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            status = STATUS_NUMERICAL_ERROR
            break

        try:
            schur_factor = scipy.linalg.cho_factor(schur)

            def solve_schur(rhs):
                return scipy.linalg.cho_solve(schur_factor, rhs)

        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):

            def solve_schur(rhs):
                return scipy.linalg.lstsq(schur, rhs)[0]

        coupling = Avec @ (X @ Rd @ W).ravel()

        def direction(K):
            dt = solve_schur(rp - Avec @ K.ravel() + coupling)
            dZ = Rd - (dt @ Avec).reshape(n, n)
            dX = _symmetric(K - X @ dZ @ W)
            return dX, dt, dZ

        try:
            dX, dt, dZ = direction(-X)

            alpha_p = min(1.0, _max_step(X, dX))
            alpha_d = min(1.0, _max_step(Z, dZ))
            mu_affine = float(np.vdot(X + alpha_p * dX, Z + alpha_d * dZ)) / n
            sigma = min(1.0, max(0.0, (mu_affine / mu) ** 3))

            dX, dt, dZ = direction(sigma * mu * W - X - dX @ dZ @ W)

            alpha_p = min(1.0, step * _max_step(X, dX))
            alpha_d = min(1.0, step * _max_step(Z, dZ))

        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            status = STATUS_NUMERICAL_ERROR
            break

        X = _symmetric(X + alpha_p * dX)
        t = t + alpha_d * dt
        Z = _symmetric(Z + alpha_d * dZ)

    return {"status": status,
            "X": X,
            "t": t,
            "Z": Z,
            "pobj": float(np.vdot(C, X)),
            "dobj": float(b @ t),
            "dual_residual": float(np.linalg.norm(b - Avec @ X.ravel()) / (1.0 + norm_b)),
            "iterations": iteration}


def _phase_one(C, A):
    '''
    max s s.t. C - sum_j t_j A_j - s I PSD and s <= 1. Strictly feasible by
    construction; a negative optimum proves the original LMI infeasible.
    '''

    n = C.shape[0]
    m = A.shape[0]

    C1 = np.zeros((n + 1, n + 1))
    C1[:n, :n] = C
    C1[n, n] = 1.0

    A1 = np.zeros((m + 1, n + 1, n + 1))
    A1[:m, :n, :n] = A
    A1[m] = np.eye(n + 1)

    b1 = np.zeros(m + 1)
    b1[m] = 1.0

    return C1, A1, b1


def _eliminate_equalities(problem):
    '''
    Write y = y0 + N t where N spans the null space of G. Returns None when
    G y = h has no solution.
    '''

    G = problem.equality_matrix
    h = problem.equality_rhs

    if not len(h):
        return np.zeros(problem.variable_count), np.eye(problem.variable_count)

    y0 = scipy.linalg.lstsq(G, h)[0]
    if np.linalg.norm(G @ y0 - h) > 1e-9 * max(1.0, np.linalg.norm(h)):
        return None

    return y0, scipy.linalg.null_space(G)


def solve_sdp(problem, tolerance=None, max_iterations=None, step=None, feasibility_tolerance=None):
    '''
    Solve an :py:class:`SdpProblem`.

    :param tolerance: Stopping tolerance on relative gap and infeasibilities
    :type tolerance: float

    :returns: The solution; its ``status`` is ``optimal``, ``infeasible``,
              ``max_iterations`` (with the best point found) or
              ``numerical_error``
    :rtype: :py:class:`SdpSolution`
    '''

    options = dict(DEFAULT_OPTIONS)
    for key, value in (("tolerance", tolerance), ("max_iterations", max_iterations),
                       ("step", step), ("feasibility_tolerance", feasibility_tolerance)):
        if value is not None:
            options[key] = value

    reduced = _eliminate_equalities(problem)

    if reduced is None:
        LOG.debug("Equality constraints are inconsistent")
        return SdpSolution(STATUS_INFEASIBLE, float("nan"))

    y0, basis = reduced

    C = problem.matrix(y0)
    A = -np.tensordot(basis.T, problem.coefficients, axes=1)
    b = basis.T @ problem.objective
    offset = problem.value(y0)

    if basis.shape[1] == 0:
        feasible = scipy.linalg.eigvalsh(C).min() >= -options["feasibility_tolerance"]
        return SdpSolution(STATUS_OPTIMAL if feasible else STATUS_INFEASIBLE, offset if feasible else float("nan"),
                           y=y0, primal_matrix=C, gap=0.0)

    result = _path_following(C, A, b, options["tolerance"], options["max_iterations"], options["step"])
    status = result["status"]

    if status != STATUS_OPTIMAL:
        LOG.debug("Main solve stopped with status '{}', checking feasibility".format(status))
        phase_one = _path_following(*_phase_one(C, A), tolerance=options["tolerance"],
                                    max_iterations=options["max_iterations"], step=options["step"])

        if phase_one["status"] == STATUS_OPTIMAL and phase_one["dobj"] < -options["feasibility_tolerance"]:
            status = STATUS_INFEASIBLE

        elif status == STATUS_MAX_ITERATIONS:
            LOG.warning("SDP stopped after {} iterations without reaching tolerance {:g}".format(result["iterations"], options["tolerance"]))

    if status == STATUS_INFEASIBLE:
        return SdpSolution(status, float("nan"), iterations=result["iterations"])

    y = y0 + basis @ result["t"]
    value = offset + result["dobj"]
    dual_bound = offset + result["pobj"]

    return SdpSolution(status, value,
                       y=y,
                       primal_matrix=result["Z"],
                       dual_matrix=result["X"],
                       gap=dual_bound - value,
                       iterations=result["iterations"],
                       dual_bound=dual_bound,
                       dual_residual=result["dual_residual"])
