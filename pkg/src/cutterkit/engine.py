"""Composed-iteration drivers and trace recording.

The main driver runs x^{k+1} = x^k + (alpha_k / nu) (U T(x^k) - x^k) with
alpha_k in [eps, 2 - eps]; the reformulated driver applies the effective
step directly, x^{k+1} = x^k + abar_k (U T(x^k) - x^k) with abar_k in
[eps, 1 + rho - eps].  The two produce identical trajectories under
abar_k = alpha_k / nu.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, UsageError
from .geometry import ConvexSet, as_point
from .operators import Operator, projection_operator, relax
from .theory import RelaxationPair, nu, rho_overrelax


@dataclass(frozen=True, eq=False)
class IterationConfig:
    """Parameters of one composed-iteration run.

    alpha may be a constant, a sequence indexed by the step counter, or a
    callable k -> alpha_k.  Its admissible window depends on the driver.
    """

    pair: RelaxationPair
    x0: np.ndarray
    epsilon: float = 0.1
    alpha: object = 1.0
    max_iter: int = 1000
    residual_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "x0", as_point(self.x0))
        if not isinstance(self.pair, RelaxationPair):
            raise UsageError("config.pair must be a RelaxationPair")
        if not self.epsilon > 0:
            raise UsageError(f"epsilon must be positive, got {self.epsilon}")
        if not self.residual_tol > 0:
            raise UsageError(f"residual_tol must be positive, got {self.residual_tol}")
        if int(self.max_iter) < 0:
            raise UsageError(f"max_iter must be >= 0, got {self.max_iter}")

    def alpha_at(self, k: int) -> float:
        if callable(self.alpha):
            return float(self.alpha(k))
        if np.isscalar(self.alpha):
            return float(self.alpha)
        try:
            return float(self.alpha[k])
        except IndexError:
            raise UsageError(f"step sequence exhausted at k={k}") from None


@dataclass
class Trace:
    """Recorded run: iterates plus per-transition residuals and steps.

    step_sizes holds the effective multiplier applied to (U T(x) - x) at
    each transition.  fejer_gaps are ||x^k - w||^2 - ||x^{k+1} - w||^2 for
    the reference supplied to the driver; solution_errors are
    ||x^k - x*|| per iterate.
    """

    iterates: np.ndarray
    residuals: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    fejer_gaps: list | None = None
    solution_errors: list | None = None

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def n_steps(self) -> int:
        return len(self.residuals)

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else float("inf")


def _run(w_eval, x0, coeff_at, max_iter, residual_tol, reference, solution):
    """Shared inner loop: x <- x + coeff_k (W(x) - x), recording the trace."""
    x = as_point(x0)
    iterates = [x]
    residuals: list[float] = []
    steps: list[float] = []
    gaps: list[float] | None = [] if reference is not None else None
    errs: list[float] | None = None
    if solution is not None:
        solution = as_point(solution, x.size)
        errs = [float(np.linalg.norm(x - solution))]
    if reference is not None:
        reference = as_point(reference, x.size)

    def partial():
        return Trace(np.array(iterates), residuals, steps, gaps, errs)

    for k in range(int(max_iter)):
        wx = np.asarray(w_eval(x), dtype=float)
        res = float(np.linalg.norm(wx - x))
        if not np.isfinite(res):
            raise DivergenceError(f"non-finite operator value at step {k}", partial())
        coeff = coeff_at(k)
        x_next = x + coeff * (wx - x)
        if not np.all(np.isfinite(x_next)):
            raise DivergenceError(f"non-finite iterate at step {k}", partial())
        residuals.append(res)
        steps.append(coeff)
        iterates.append(x_next)
        if gaps is not None:
            gaps.append(
                float(np.linalg.norm(x - reference) ** 2
                      - np.linalg.norm(x_next - reference) ** 2)
            )
        if errs is not None:
            errs.append(float(np.linalg.norm(x_next - solution)))
        x = x_next
        if res <= residual_tol:
            break
    return partial()


def _check_dims(t: Operator, u: Operator, x0: np.ndarray):
    for op in (t, u):
        if op.dim is not None and op.dim != x0.size:
            raise UsageError(
                f"operator dimension {op.dim} does not match x0 dimension {x0.size}"
            )


def iterate(t: Operator, u: Operator, config: IterationConfig,
            reference=None, solution=None) -> Trace:
    """Run x^{k+1} = x^k + (alpha_k / nu)(U T(x^k) - x^k).

    Stops when ||U T(x^k) - x^k|| <= residual_tol (checked after the
    transition is recorded) or after max_iter transitions.
    """
    _check_dims(t, u, config.x0)
    if config.epsilon > 1.0:
        raise UsageError("epsilon must be <= 1 so that [eps, 2 - eps] is nonempty")
    n = nu(config.pair)

    def coeff_at(k):
        a = config.alpha_at(k)
        if a < config.epsilon or a > 2.0 - config.epsilon:
            raise UsageError(
                f"alpha_{k} = {a} outside [{config.epsilon}, {2.0 - config.epsilon}]"
            )
        return a / n

    return _run(lambda x: u(t(x)), config.x0, coeff_at, config.max_iter,
                config.residual_tol, reference, solution)


def iterate_reformulated(t: Operator, u: Operator, config: IterationConfig,
                         reference=None, solution=None) -> Trace:
    """Run x^{k+1} = x^k + abar_k (U T(x^k) - x^k) with
    abar_k in [eps, 1 + rho - eps], rho = (2 - nu)/nu."""
    _check_dims(t, u, config.x0)
    rho = rho_overrelax(config.pair)
    hi = 1.0 + rho - config.epsilon
    if hi < config.epsilon:
        raise UsageError(
            f"empty step window: [eps, 1 + rho - eps] = [{config.epsilon}, {hi}]"
        )

    def coeff_at(k):
        a = config.alpha_at(k)
        if a < config.epsilon or a > hi:
            raise UsageError(f"abar_{k} = {a} outside [{config.epsilon}, {hi}]")
        return a

    return _run(lambda x: u(t(x)), config.x0, coeff_at, config.max_iter,
                config.residual_tol, reference, solution)


def run_map(a: ConvexSet, b: ConvexSet, x0, n: int,
            reference=None, solution=None) -> Trace:
    """Method of alternating projections x^{k+1} = P_B P_A x^k for n steps."""
    if n < 0:
        raise UsageError(f"n must be >= 0, got {n}")
    x0 = as_point(x0, a.dim)
    return _run(lambda x: b.project(a.project(x)), x0, lambda k: 1.0,
                n, 0.0, reference, solution)


def run_dr(a: ConvexSet, b: ConvexSet, x0, n: int,
            reference=None, solution=None) -> Trace:
    """Douglas-Rachford comparison driver
    x^{k+1} = x^k + (1/2)((P_B)_2 (P_A)_2 x^k - x^k) for n steps.

    lam = mu = 2 sits outside the lam*mu < 4 hypothesis, so this is a
    standalone baseline rather than a RelaxationPair-driven run.
    """
    if n < 0:
        raise UsageError(f"n must be >= 0, got {n}")
    x0 = as_point(x0, a.dim)
    ra = relax(projection_operator(a), 2.0)
    rb = relax(projection_operator(b), 2.0)
    return _run(lambda x: rb(ra(x)), x0, lambda k: 0.5, n, 0.0, reference, solution)
