"""Alternating projected gradient ascent for continuous fairness-without-regret.

The inner problem maximizes ``U(theta, s)`` over ``s``; the outer problem
moves ``theta`` to increase the fairness of the inner optimum. The outer
gradient comes from implicit differentiation of the inner optimality
condition ``grad_s U(theta, s*) = 0``::

    G(theta, s) = -C(theta, s) @ solve(H(theta, s), grad F(s))

with ``C = d/dtheta grad_s U`` (shape d x d') and ``H`` the Hessian of U in s.
When ``H`` is singular (for instance a utility linear in s) no such
gradient exists and :class:`~noregret.errors.SingularHessian` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, SingularHessian

__all__ = [
    "SmoothProblem",
    "AscentConfig",
    "AscentTrace",
    "AuditReport",
    "COND_LIMIT",
    "box_projection",
    "simplex_projection",
    "fairness_gradient",
    "inner_step",
    "outer_step",
    "alternating_ascent",
    "finite_difference_audit",
    "quadratic_toy",
    "curved_toy",
    "simplex_relaxation",
    "PROBLEMS",
]

COND_LIMIT = 1e12

Array = np.ndarray


def _identity(x):
    return np.asarray(x, dtype=float)


def box_projection(lo, hi) -> Callable[[Array], Array]:
    """Clamp onto the box ``[lo, hi]`` (scalars broadcast)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise ConfigError("box projection needs lo <= hi")

    def project(x):
        return np.clip(np.asarray(x, dtype=float), lo, hi)

    return project


def simplex_projection(total: float = 1.0) -> Callable[[Array], Array]:
    """Euclidean projection onto ``{x >= 0, sum(x) = total}`` (sort-based)."""
    if total <= 0:
        raise ConfigError("simplex total must be positive")

    def project(x):
        x = np.asarray(x, dtype=float)
        u = np.sort(x)[::-1]
        css = np.cumsum(u) - total
        idx = np.arange(1, x.size + 1)
        rho = np.nonzero(u - css / idx > 0)[0][-1]
        tau = css[rho] / (rho + 1)
        return np.maximum(x - tau, 0.0)

    return project


@dataclass(frozen=True)
class SmoothProblem:
    """Twice-differentiable inner utility and fairness over continuous spaces.

    Attributes:
        utility: ``(theta, s) -> float``
        grad_s: ``(theta, s) -> (d',)`` gradient of the utility in s
        mixed: ``(theta, s) -> (d, d')``, the theta-derivative of ``grad_s``
        hess_s: ``(theta, s) -> (d', d')`` Hessian of the utility in s
        fairness: ``s -> float``
        grad_fairness: ``s -> (d',)``
        project_s, project_theta: projections back into S and Theta
        solve_inner: optional exact maximizer ``theta -> s*``
    """

    dim_s: int
    dim_theta: int
    utility: Callable
    grad_s: Callable
    mixed: Callable
    hess_s: Callable
    fairness: Callable
    grad_fairness: Callable
    project_s: Callable = _identity
    project_theta: Callable = _identity
    solve_inner: Optional[Callable] = None
    name: str = "problem"


@dataclass(frozen=True)
class AscentConfig:
    alpha: float = 0.01
    beta: float = 0.01
    max_iter: int = 10_000
    tol: float = 1e-8
    exact_inner: bool = False
    resolve_before_outer: bool = False

    def __post_init__(self):
        if not self.alpha > 0 or not self.beta > 0:
            raise ConfigError("learning rates alpha and beta must be positive")
        if isinstance(self.max_iter, bool) or int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError("max_iter must be an integer >= 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")


@dataclass
class AscentTrace:
    """Iterates of an ascent run. Entry 0 is the (projected) starting point."""

    s: list = field(default_factory=list)
    theta: list = field(default_factory=list)
    utility: list = field(default_factory=list)
    fairness: list = field(default_factory=list)
    step_s: list = field(default_factory=list)
    step_theta: list = field(default_factory=list)
    reason: str = ""

    def __len__(self):
        return len(self.theta)

    def append(self, p: SmoothProblem, s, theta, ds, dtheta):
        self.s.append(np.array(s, dtype=float))
        self.theta.append(np.array(theta, dtype=float))
        self.utility.append(float(p.utility(theta, s)))
        self.fairness.append(float(p.fairness(s)))
        self.step_s.append(float(ds))
        self.step_theta.append(float(dtheta))

    @property
    def final_s(self) -> Array:
        return self.s[-1]

    @property
    def final_theta(self) -> Array:
        return self.theta[-1]


def _vec(x) -> Array:
    return np.atleast_1d(np.asarray(x, dtype=float))


def fairness_gradient(p: SmoothProblem, theta, s) -> Array:
    """Implicit-differentiation gradient of fairness with respect to theta.

    Equals ``d/dtheta F(s*(theta))`` when ``s`` is the inner optimum.
    """
    theta, s = _vec(theta), _vec(s)
    H = np.atleast_2d(np.asarray(p.hess_s(theta, s), dtype=float))
    C = np.asarray(p.mixed(theta, s), dtype=float).reshape(theta.size, s.size)
    gF = _vec(p.grad_fairness(s))
    if not np.all(np.isfinite(H)):
        raise SingularHessian("Hessian has non-finite entries")
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularHessian(
            f"solution-space Hessian is singular (condition number {cond:.3g}); "
            "utilities linear in s admit no implicit fairness gradient"
        )
    return -C @ np.linalg.solve(H, gF)


def inner_step(p: SmoothProblem, theta, s, alpha: float) -> Array:
    """One projected ascent step on the utility at fixed theta."""
    if not alpha > 0:
        raise ConfigError("alpha must be positive")
    s = _vec(s)
    out = _vec(p.project_s(s + alpha * _vec(p.grad_s(_vec(theta), s))))
    if out.shape != s.shape or not np.all(np.isfinite(out)):
        raise ConfigError("projection onto S failed")
    return out


def outer_step(p: SmoothProblem, theta, s, beta: float) -> Array:
    """One projected step of theta along the implicit fairness gradient."""
    if not beta > 0:
        raise ConfigError("beta must be positive")
    theta = _vec(theta)
    return _vec(p.project_theta(theta + beta * fairness_gradient(p, theta, s)))


def alternating_ascent(p: SmoothProblem, cfg: AscentConfig, s0, theta0) -> AscentTrace:
    """Alternate an s-update and a theta-update until both steps are below tol.

    The s-update is an exact inner solve when ``cfg.exact_inner`` is set
    (requires ``p.solve_inner``), otherwise one projected gradient step. The
    theta-update uses the fairness gradient at the freshly updated s; with
    ``cfg.resolve_before_outer`` it uses the exact inner optimum instead.
    A singular Hessian ends the run early with ``reason == "singular-hessian"``.
    """
    if (cfg.exact_inner or cfg.resolve_before_outer) and p.solve_inner is None:
        raise ConfigError("exact inner solves need problem.solve_inner")
    s = _vec(p.project_s(_vec(s0)))
    theta = _vec(p.project_theta(_vec(theta0)))
    trace = AscentTrace()
    trace.append(p, s, theta, 0.0, 0.0)
    for _ in range(int(cfg.max_iter)):
        s_new = _vec(p.solve_inner(theta)) if cfg.exact_inner else inner_step(p, theta, s, cfg.alpha)
        s_for_g = _vec(p.solve_inner(theta)) if cfg.resolve_before_outer else s_new
        try:
            theta_new = _vec(p.project_theta(theta + cfg.beta * fairness_gradient(p, theta, s_for_g)))
        except SingularHessian:
            trace.reason = "singular-hessian"
            return trace
        ds = float(np.linalg.norm(s_new - s))
        dt = float(np.linalg.norm(theta_new - theta))
        s, theta = s_new, theta_new
        trace.append(p, s, theta, ds, dt)
        if ds < cfg.tol and dt < cfg.tol:
            trace.reason = "converged"
            return trace
    trace.reason = "cap"
    return trace


@dataclass(frozen=True)
class AuditReport:
    theta: Array
    analytic: Array
    numeric: Array
    max_deviation: float


def finite_difference_audit(p: SmoothProblem, theta, eps: float = 1e-5) -> AuditReport:
    """Compare the implicit gradient with central differences of F(s*(theta))."""
    if p.solve_inner is None:
        raise ConfigError("the audit needs an exact inner solver")
    if not eps > 0:
        raise ConfigError("eps must be positive")
    theta = _vec(theta)
    analytic = _vec(fairness_gradient(p, theta, _vec(p.solve_inner(theta))))
    numeric = np.empty(theta.size)
    for j in range(theta.size):
        e = np.zeros(theta.size)
        e[j] = eps
        up = p.fairness(_vec(p.solve_inner(theta + e)))
        down = p.fairness(_vec(p.solve_inner(theta - e)))
        numeric[j] = (up - down) / (2 * eps)
    return AuditReport(theta, analytic, numeric, float(np.max(np.abs(analytic - numeric))))


def quadratic_toy(theta_lo: float = 0.0, theta_hi: float = 1.0) -> SmoothProblem:
    """``U = -(s1 - t)^2 - (s2 - t^2)^2`` and ``F = s2 - s1``.

    The inner optimum is ``(t, t^2)``, so ``F(s*) = t^2 - t`` with gradient
    ``2t - 1``.
    """

    def utility(t, s):
        t = _vec(t)[0]
        return -(s[0] - t) ** 2 - (s[1] - t**2) ** 2

    def grad_s(t, s):
        t = _vec(t)[0]
        return np.array([-2 * (s[0] - t), -2 * (s[1] - t**2)])

    def mixed(t, s):
        t = _vec(t)[0]
        return np.array([[2.0, 4 * t]])

    return SmoothProblem(
        dim_s=2,
        dim_theta=1,
        utility=utility,
        grad_s=grad_s,
        mixed=mixed,
        hess_s=lambda t, s: -2.0 * np.eye(2),
        fairness=lambda s: float(s[1] - s[0]),
        grad_fairness=lambda s: np.array([-1.0, 1.0]),
        project_theta=box_projection(theta_lo, theta_hi),
        solve_inner=lambda t: np.array([_vec(t)[0], _vec(t)[0] ** 2]),
        name="quadratic-toy",
    )


def curved_toy() -> SmoothProblem:
    """Two-parameter problem with a non-identity Hessian and nonlinear fairness.

    ``U = -(s - c(t))^T A (s - c(t))`` with ``c(t) = (sin t1, t1 t2, t2^3)``
    and ``F = s1 s2 - s3^2``; ``s* = c(t)`` in closed form.
    """
    A = np.array([[3.0, 1.0, 0.0], [1.0, 2.0, 0.5], [0.0, 0.5, 1.0]])

    def c(t):
        t = _vec(t)
        return np.array([np.sin(t[0]), t[0] * t[1], t[1] ** 3])

    def dc(t):
        # rows: d c / d t_j
        t = _vec(t)
        return np.array([[np.cos(t[0]), t[1], 0.0], [0.0, t[0], 3 * t[1] ** 2]])

    return SmoothProblem(
        dim_s=3,
        dim_theta=2,
        utility=lambda t, s: float(-(s - c(t)) @ A @ (s - c(t))),
        grad_s=lambda t, s: -2 * A @ (s - c(t)),
        mixed=lambda t, s: 2 * dc(t) @ A,
        hess_s=lambda t, s: -2 * A,
        fairness=lambda s: float(s[0] * s[1] - s[2] ** 2),
        grad_fairness=lambda s: np.array([s[1], s[0], -2 * s[2]]),
        solve_inner=c,
        name="curved-toy",
    )


def simplex_relaxation(scores_first=None, scores_second=None, groups=None, k: int = 2) -> SmoothProblem:
    """Continuous relaxation of top-k selection: a cautionary example.

    The selection indicator is relaxed to ``{s >= 0, sum(s) = k}`` and the
    utility ``sum_i s_i * (t * u1_i + (1 - t) * u2_i)`` is linear in s, so
    its Hessian vanishes and the implicit fairness gradient does not exist.
    Defaults to the six-applicant admissions example.
    """
    if scores_first is None:
        scores_first = [10.0, 15.0, 15.0, 11.0, 7.0, 14.0]
        scores_second = [10.0, 7.0, 5.0, 9.0, 9.0, 8.0]
        groups = ["f", "m", "f", "f", "m", "m"]
    u1 = np.asarray(scores_first, dtype=float)
    u2 = np.asarray(scores_second, dtype=float)
    sign = np.array([1.0 if g == groups[0] else -1.0 for g in groups])
    n = u1.size

    def scores(t):
        t = _vec(t)[0]
        return t * u1 + (1 - t) * u2

    return SmoothProblem(
        dim_s=n,
        dim_theta=1,
        utility=lambda t, s: float(_vec(s) @ scores(t)),
        grad_s=lambda t, s: scores(t),
        mixed=lambda t, s: (u1 - u2).reshape(1, n),
        hess_s=lambda t, s: np.zeros((n, n)),
        fairness=lambda s: float(-(sign @ _vec(s)) ** 2),
        grad_fairness=lambda s: -2 * (sign @ _vec(s)) * sign,
        project_s=simplex_projection(float(k)),
        project_theta=box_projection(0.0, 1.0),
        name="simplex-relaxation",
    )


PROBLEMS = {
    "quadratic-toy": quadratic_toy,
    "curved-toy": curved_toy,
    "simplex-relaxation": simplex_relaxation,
}
