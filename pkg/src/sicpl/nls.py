"""Weighted nonlinear least-squares minimizer (Levenberg-Marquardt).

Minimizes sum_i w_i * (y_i - f(p, x_i))^2 with multiplicative damping
(lambda x10 on rejection, /10 on acceptance), box bounds by projected
steps, and parameter covariance reduced_chi2 * (J^T W J)^-1 at the
solution. Per the reporting convention used throughout the toolkit,
parameter margins are quoted as 3-sigma half-widths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFitError, DomainError, EvaluationError, ValidationError

DEFAULT_OPTIONS = {"max_iter": 200, "step_tol": 1e-8, "cost_tol": 1e-10, "fd_step": 1e-6}


@dataclass
class FitProblem:
    """A weighted curve-fitting problem.

    model(p, x) must accept a parameter vector and an abscissa array and
    return predicted values; jacobian, if given, returns the (n, m)
    matrix of d model / d p_j and is checked against finite differences
    in the test suite.
    """

    model: callable
    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray | None = None
    p0: np.ndarray = field(default_factory=lambda: np.array([]))
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    jacobian: callable | None = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.p0 = np.asarray(self.p0, dtype=float)
        n, m = self.y.size, self.p0.size
        if m == 0:
            raise ValidationError("empty initial guess")
        if n < m:
            raise ValidationError(f"need >= {m} data points, got {n}")
        if self.weights is None:
            self.weights = np.ones(n)
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(~np.isfinite(self.weights)) or np.any(self.weights <= 0):
            raise ValidationError("weights must be positive and finite")
        self.lower = np.full(m, -np.inf) if self.lower is None else np.asarray(self.lower, float)
        self.upper = np.full(m, np.inf) if self.upper is None else np.asarray(self.upper, float)
        if np.any(self.p0 < self.lower) or np.any(self.p0 > self.upper):
            raise ValidationError("initial guess outside bounds")


@dataclass
class FitResult:
    parameters: np.ndarray
    covariance: np.ndarray
    reduced_chi2: float
    n_iterations: int
    converged: bool
    cost: float

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def sigma3(self) -> np.ndarray:
        """3-sigma half-widths per parameter."""
        return 3.0 * self.sigma

    def at_bound(self, lower, upper, rtol=1e-8) -> np.ndarray:
        p = self.parameters
        scale = np.maximum(np.abs(p), 1.0)
        return (np.abs(p - lower) <= rtol * scale) | (np.abs(p - upper) <= rtol * scale)


def finite_diff_jacobian(model, p, xs, h=1e-6) -> np.ndarray:
    """Central-difference Jacobian of model(p, xs) w.r.t. p.

    h is a relative step, required in (0, 1e-2]. Serves as the oracle
    for any analytic derivatives supplied to the engine.
    """
    if not (0 < h <= 1e-2):
        raise DomainError(f"finite-difference step h must be in (0, 1e-2], got {h}")
    p = np.asarray(p, dtype=float)
    xs = np.asarray(xs, dtype=float)
    J = np.empty((xs.size, p.size))
    for j in range(p.size):
        step = h * max(abs(p[j]), 1.0)
        pp, pm = p.copy(), p.copy()
        pp[j] += step
        pm[j] -= step
        fp = np.asarray(model(pp, xs), dtype=float)
        fm = np.asarray(model(pm, xs), dtype=float)
        if np.any(~np.isfinite(fp)) or np.any(~np.isfinite(fm)):
            raise EvaluationError(f"model not finite at parameter {j} +/- {step}")
        J[:, j] = (fp - fm) / (2.0 * step)
    return J


def _cost(problem, p):
    f = np.asarray(problem.model(p, problem.x), dtype=float)
    if np.any(~np.isfinite(f)):
        raise EvaluationError("model returned non-finite values")
    r = problem.y - f
    return float(np.sum(problem.weights * r * r)), r


def _jacobian(problem, p, h):
    if problem.jacobian is not None:
        J = np.asarray(problem.jacobian(p, problem.x), dtype=float)
        if np.any(~np.isfinite(J)):
            raise EvaluationError("analytic Jacobian returned non-finite values")
        return J
    return finite_diff_jacobian(problem.model, p, problem.x, h)


def _covariance(problem, p, cost, h):
    """reduced_chi2 * (J^T W J)^-1, symmetrized; raises on rank deficiency."""
    J = _jacobian(problem, p, h)
    A = J.T @ (problem.weights[:, None] * J)
    m = p.size
    d = np.sqrt(np.diag(A))
    if np.any(d == 0):
        names = [f"p[{i}]" for i in range(m) if d[i] == 0]
        raise DegenerateFitError(
            "singular normal matrix; zero sensitivity to " + ", ".join(names)
        )
    # test rank on the correlation-scaled matrix so parameter units cancel
    As = A / np.outer(d, d)
    u, s, vt = np.linalg.svd(As)
    if s[-1] < 1e-10 * s[0]:
        null = vt[-1]
        names = [f"p[{i}]" for i in range(m) if abs(null[i]) > 0.1]
        raise DegenerateFitError(
            "singular normal matrix; unidentifiable parameter direction involves "
            + ", ".join(names)
        )
    dof = problem.y.size - m
    red_chi2 = cost / dof if dof > 0 else 0.0
    As_inv = vt.T @ np.diag(1.0 / s) @ u.T
    cov = red_chi2 * (As_inv / np.outer(d, d))
    cov = 0.5 * (cov + cov.T)
    return cov, red_chi2


def minimize(problem: FitProblem, options: dict | None = None) -> FitResult:
    """Run Levenberg-Marquardt on a FitProblem.

    Convergence requires relative step < step_tol AND relative cost
    change < cost_tol; converged is False when max_iter is hit first.
    """
    opts = dict(DEFAULT_OPTIONS)
    opts.update(options or {})
    h = opts["fd_step"]
    p = problem.p0.copy()
    cost, _ = _cost(problem, p)
    lam = 1e-3
    converged = False
    n_iter = 0
    for n_iter in range(1, opts["max_iter"] + 1):
        J = _jacobian(problem, p, h)
        r = problem.y - np.asarray(problem.model(p, problem.x), dtype=float)
        W = problem.weights
        A = J.T @ (W[:, None] * J)
        g = J.T @ (W * r)
        diag = np.diag(A).copy()
        floor = 1e-14 * max(diag.max(), 1e-300)
        diag = np.maximum(diag, floor)
        accepted = False
        while lam < 1e14:
            try:
                delta = np.linalg.solve(A + lam * np.diag(diag), g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            p_new = np.clip(p + delta, problem.lower, problem.upper)
            try:
                cost_new, _ = _cost(problem, p_new)
            except EvaluationError:
                lam *= 10.0
                continue
            if cost_new <= cost:
                step_rel = np.max(np.abs(p_new - p) / np.maximum(np.abs(p), 1.0))
                cost_rel = (cost - cost_new) / max(cost, 1e-300)
                p, cost = p_new, cost_new
                lam = max(lam / 10.0, 1e-12)
                accepted = True
                if (step_rel < opts["step_tol"] and cost_rel < opts["cost_tol"]) or cost == 0.0:
                    converged = True
                break
            lam *= 10.0
        if not accepted or converged:
            converged = converged or not accepted  # stalled damping: local minimum
            break
    cov, red_chi2 = _covariance(problem, p, cost, h)
    return FitResult(
        parameters=p,
        covariance=cov,
        reduced_chi2=red_chi2,
        n_iterations=n_iter,
        converged=converged,
        cost=cost,
    )
