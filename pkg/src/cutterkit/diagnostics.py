"""Numerical certification of the cutter/demicontraction inequalities and
empirical estimation of regularity moduli.

Every probe samples points uniformly from a ball B(z, r), evaluates the
inequality it certifies, and reports the minimum margin (slack of the
inequality, written so that a pass means margin >= -tolerance).  Probes
are pure given a seed.  Reports serialize to one line:

    PROBE <name> PASS|FAIL|SKIP margin=<min margin> samples=<n> seed=<s>

SKIP marks a vacuous or inconclusive probe (lam == mu for the lower-bound
product inequality, or a rate certificate on a non-converged trace).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import Trace
from .errors import EstimationError, UsageError
from .geometry import as_point
from .operators import Operator
from .theory import RelaxationPair, alpha_beta, nu, qlinear_rate

MAX_RECORDED_VIOLATIONS = 20


@dataclass(frozen=True)
class ProbeConfig:
    """Sampling region, budget and tolerance of one probe.

    big_radius defaults to radius; for a lam-relaxed first factor the
    prescribed enlargement is max{r, (lam - 1) r} (see big_radius()).
    """

    center: np.ndarray
    radius: float
    big_radius: float | None = None
    sample_count: int = 1000
    seed: int = 0
    tolerance: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise UsageError(f"probe radius must be positive, got {self.radius}")
        if self.big_radius is None:
            object.__setattr__(self, "big_radius", float(self.radius))
        if self.big_radius < self.radius:
            raise UsageError("big_radius must be >= radius")
        if int(self.sample_count) < 1:
            raise UsageError("sample_count must be >= 1")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")


def big_radius(radius: float, lam: float) -> float:
    """Enlarged radius max{r, (lam - 1) r} reached by a lam-relaxed cutter."""
    return max(radius, (lam - 1.0) * radius)


def sample_ball(probe: ProbeConfig) -> np.ndarray:
    """(n, d) points uniform on B(center, radius): normalized Gaussian
    directions scaled by radius * U^(1/d)."""
    rng = np.random.default_rng(probe.seed)
    d = probe.center.size
    g = rng.standard_normal((int(probe.sample_count), d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = probe.radius * rng.random(int(probe.sample_count)) ** (1.0 / d)
    return probe.center + radii[:, None] * g


@dataclass
class RegularityReport:
    """Outcome of one probe: pass/fail, minimum margin, and any measured
    moduli (delta_hat, kappa_hat) or rate data (q_factor)."""

    name: str
    passed: bool
    margin: float
    samples: int
    seed: int | None = None
    violations: list = field(default_factory=list)
    delta_hat: float | None = None
    kappa_hat: float | None = None
    q_factor: float | None = None
    skipped: bool = False
    note: str = ""

    def line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        seed = self.seed if self.seed is not None else "-"
        return (
            f"PROBE {self.name} {status} margin={self.margin:.6g} "
            f"samples={self.samples} seed={seed}"
        )


def _eval_batch(op: Operator, x: np.ndarray) -> np.ndarray:
    """Evaluate an operator on an (n, d) batch, falling back to row-wise
    evaluation for operators that only take single points."""
    try:
        out = np.asarray(op(x), dtype=float)
        if out.shape == x.shape:
            return out
    except Exception:
        pass
    return np.stack([np.asarray(op(row), dtype=float) for row in x])


def _report(name, margins, points, tolerance, seed=None, **extra) -> RegularityReport:
    margins = np.asarray(margins, dtype=float)
    bad = np.where(margins < -tolerance)[0]
    violations = [
        (name, points[i].copy(), float(margins[i]))
        for i in bad[:MAX_RECORDED_VIOLATIONS]
    ]
    return RegularityReport(
        name=name,
        passed=bad.size == 0,
        margin=float(margins.min()) if margins.size else math.inf,
        samples=int(margins.size),
        seed=seed,
        violations=violations,
        **extra,
    )


def _validate_fixed(op: Operator, fixed_sample, probe: ProbeConfig) -> np.ndarray:
    zs = np.atleast_2d(np.asarray(fixed_sample, dtype=float))
    if zs.size == 0:
        raise UsageError("fixed_sample must contain at least one point")
    moved = np.linalg.norm(_eval_batch(op, zs) - zs, axis=1)
    if np.any(moved > probe.tolerance):
        worst = float(moved.max())
        raise UsageError(
            f"fixed_sample contains non-fixed points of {op.label}: "
            f"max ||T(z) - z|| = {worst:.3e}"
        )
    return zs


def cutter_check(t: Operator, fixed_sample, probe: ProbeConfig) -> RegularityReport:
    """Certify <z - T(x), x - T(x)> <= 0 over sampled x and supplied z."""
    zs = _validate_fixed(t, fixed_sample, probe)
    x = sample_ball(probe)
    tx = _eval_batch(t, x)
    xtx = x - tx
    margins = np.min(
        [-np.einsum("nd,nd->n", z - tx, xtx) for z in zs], axis=0
    )
    return _report("cutter", margins, x, probe.tolerance, probe.seed)


def relaxed_cutter_check(t: Operator, lam: float, fixed_sample,
                         probe: ProbeConfig) -> RegularityReport:
    """Certify lam <z - x, T(x) - x> >= ||T(x) - x||^2 over samples."""
    if not lam > 0:
        raise UsageError(f"lambda must be positive, got {lam}")
    zs = _validate_fixed(t, fixed_sample, probe)
    x = sample_ball(probe)
    a = _eval_batch(t, x) - x
    aa = np.einsum("nd,nd->n", a, a)
    margins = np.min(
        [lam * np.einsum("nd,nd->n", z - x, a) - aa for z in zs], axis=0
    )
    return _report("relaxed-cutter", margins, x, probe.tolerance, probe.seed)


def demicontraction_check(t: Operator, rho: float, fixed_sample,
                          probe: ProbeConfig) -> RegularityReport:
    """Certify ||T(x) - z||^2 <= ||x - z||^2 + rho ||T(x) - x||^2."""
    if not rho < 1:
        raise UsageError(f"demicontraction constant must be < 1, got {rho}")
    zs = _validate_fixed(t, fixed_sample, probe)
    x = sample_ball(probe)
    tx = _eval_batch(t, x)
    a = tx - x
    aa = np.einsum("nd,nd->n", a, a)
    margins = np.min(
        [
            np.einsum("nd,nd->n", x - z, x - z) + rho * aa
            - np.einsum("nd,nd->n", tx - z, tx - z)
            for z in zs
        ],
        axis=0,
    )
    return _report("demicontraction", margins, x, probe.tolerance, probe.seed)


def lb1_check(t: Operator, u: Operator, pair: RelaxationPair, fixed_sample,
              probe: ProbeConfig) -> RegularityReport:
    """Certify the product lower bound
    <z - x, UT(x) - x> >= ||s1 (T(x)-x) +/- s2 (UT(x)-T(x))||^2
    with s1 = sqrt(1/lam - 1/nu), s2 = sqrt(1/mu - 1/nu), sign "+" when
    max{lam, mu} >= 2 and "-" otherwise."""
    n = nu(pair)
    s1 = math.sqrt(max(1.0 / pair.lam - 1.0 / n, 0.0))
    s2 = math.sqrt(max(1.0 / pair.mu - 1.0 / n, 0.0))
    sign = 1.0 if max(pair.lam, pair.mu) >= 2.0 else -1.0
    zs = np.atleast_2d(np.asarray(fixed_sample, dtype=float))
    _validate_fixed(t, zs, probe)
    _validate_fixed(u, zs, probe)
    x = sample_ball(probe)
    tx = _eval_batch(t, x)
    utx = _eval_batch(u, tx)
    a = tx - x
    b = utx - tx
    c = utx - x
    comb = s1 * a + sign * s2 * b
    rhs = np.einsum("nd,nd->n", comb, comb)
    margins = np.min(
        [np.einsum("nd,nd->n", z - x, c) - rhs for z in zs], axis=0
    )
    return _report("lb1", margins, x, probe.tolerance, probe.seed)


def lb2_check(t: Operator, u: Operator, pair: RelaxationPair,
              intersection_distance, probe: ProbeConfig) -> RegularityReport:
    """Certify the residual lower bound
    ||UT(x) - x|| >= (|alpha|/(1+beta sqrt(nu)))^2
                     * max{||T(x)-x||^2, ||UT(x)-T(x)||^2} / d(x, Fix T n Fix U).

    Vacuous (SKIP) when lam == mu, since alpha = 0.  Samples inside the
    intersection (distance below tolerance) are skipped.
    """
    if pair.lam == pair.mu:
        return RegularityReport(
            name="lb2", passed=True, margin=math.inf, samples=0,
            seed=probe.seed, skipped=True, note="vacuous: lam == mu",
        )
    a_, b_ = alpha_beta(pair)
    coef = (abs(a_) / (1.0 + b_ * math.sqrt(nu(pair)))) ** 2
    dist = getattr(intersection_distance, "distance", intersection_distance)
    x = sample_ball(probe)
    d = np.asarray(dist(x), dtype=float)
    keep = d > probe.tolerance
    if not np.any(keep):
        return RegularityReport(
            name="lb2", passed=True, margin=math.inf, samples=0,
            seed=probe.seed, skipped=True, note="all samples degenerate",
        )
    x = x[keep]
    d = d[keep]
    tx = _eval_batch(t, x)
    utx = _eval_batch(u, tx)
    a = tx - x
    b = utx - tx
    c = utx - x
    biggest = np.maximum(
        np.einsum("nd,nd->n", a, a), np.einsum("nd,nd->n", b, b)
    )
    margins = np.linalg.norm(c, axis=1) - coef * biggest / d
    return _report("lb2", margins, x, probe.tolerance, probe.seed)


def regularity_modulus_estimate(t: Operator, probe: ProbeConfig) -> float:
    """delta_hat = min over samples of ||T(x) - x|| / d(x, Fix T).

    An upper bound on the true linear-regularity modulus over the sampled
    ball; samples with d(x, Fix T) below tolerance are skipped.
    """
    if t.fix_distance is None:
        raise UsageError(f"operator {t.label} carries no fix_distance oracle")
    x = sample_ball(probe)
    d = np.asarray(t.fix_distance(x), dtype=float)
    keep = d > probe.tolerance
    if not np.any(keep):
        raise EstimationError("all samples are degenerate (on the fixed set)")
    step = np.linalg.norm(_eval_batch(t, x[keep]) - x[keep], axis=1)
    return float(np.min(step / d[keep]))


def pair_regularity_estimate(a, b, intersection, probe: ProbeConfig) -> float:
    """kappa_hat = max over samples of d(x, A n B) / max{d(x, A), d(x, B)}.

    A lower bound on the true linear-regularity constant of the pair;
    grows monotonically with the sample count.  intersection may be a
    ConvexSet or a distance callable for the true A n B.
    """
    dist = getattr(intersection, "distance", intersection)
    x = sample_ball(probe)
    dm = np.maximum(np.asarray(a.distance(x)), np.asarray(b.distance(x)))
    keep = dm > probe.tolerance
    if not np.any(keep):
        raise EstimationError("all samples are degenerate (max distance ~ 0)")
    di = np.asarray(dist(x[keep]), dtype=float)
    return float(np.max(di / dm[keep]))


def rate_certificate(trace: Trace, x_star, epsilon: float, delta: float,
                     nu_value: float, tol: float = 1e-9,
                     converged_tol: float = 1e-8) -> RegularityReport:
    """Certify the per-step Q-linear bound
    ||x^{k+1} - x*|| <= sqrt(1 - (eps*delta/(2 nu))^2) ||x^k - x*|| + tol
    on a converged trace, and report the empirical Q-factor
    max_k ||x^{k+1} - x*|| / ||x^k - x*||.

    A trace whose final residual exceeds converged_tol is inconclusive
    and reported as SKIP.
    """
    if not trace.residuals or trace.residuals[-1] > converged_tol:
        return RegularityReport(
            name="rate", passed=False, margin=-math.inf, samples=0,
            skipped=True,
            note=f"inconclusive: final residual {trace.final_residual:.3e} "
                 f"> {converged_tol:.3e}",
        )
    x_star = as_point(x_star, trace.iterates.shape[1])
    q = qlinear_rate(epsilon, delta, nu_value)
    errs = np.linalg.norm(trace.iterates - x_star, axis=1)
    margins = q * errs[:-1] - errs[1:]
    denom_ok = errs[:-1] > 1e-15
    q_factor = (
        float(np.max(errs[1:][denom_ok] / errs[:-1][denom_ok]))
        if np.any(denom_ok) else None
    )
    return _report("rate", margins, trace.iterates[:-1], tol, q_factor=q_factor)


def fejer_check(trace: Trace, w, intersection_distance=None, x_star=None,
                tol: float = 1e-9) -> RegularityReport:
    """Certify monotonicity ||x^{k+1} - w|| <= ||x^k - w|| along the trace,
    plus the localization bound ||x^k - x*|| <= 2 d(x^k, C) when an
    intersection distance is available (x* defaults to the final iterate).
    """
    w = as_point(w, trace.iterates.shape[1])
    dists = np.linalg.norm(trace.iterates - w, axis=1)
    margins = dists[:-1] - dists[1:]
    points = trace.iterates[:-1]
    if intersection_distance is not None:
        dist = getattr(intersection_distance, "distance", intersection_distance)
        xs = trace.final if x_star is None else as_point(x_star, w.size)
        loc = 2.0 * np.asarray(dist(trace.iterates), dtype=float) \
            - np.linalg.norm(trace.iterates - xs, axis=1)
        margins = np.concatenate([margins, loc])
        points = np.vstack([points, trace.iterates])
    return _report("fejer", margins, points, tol)


def dc_gap_check(trace: Trace, w, nu_value: float, epsilon: float,
                 tol: float = 1e-9) -> RegularityReport:
    """Certify the per-step demicontraction gap
    ||x^k - w||^2 - ||x^{k+1} - w||^2 >= ((2-alpha_k)/alpha_k)||x^{k+1}-x^k||^2
                                      >= (eps/nu)^2 ||UT(x^k) - x^k||^2,
    where alpha_k = step_sizes[k] * nu recovers the nominal step."""
    w = as_point(w, trace.iterates.shape[1])
    if not epsilon > 0:
        raise UsageError(f"epsilon must be positive, got {epsilon}")
    d2 = np.linalg.norm(trace.iterates - w, axis=1) ** 2
    gaps = d2[:-1] - d2[1:]
    deltas = np.linalg.norm(np.diff(trace.iterates, axis=0), axis=1)
    alphas = np.asarray(trace.step_sizes) * nu_value
    if np.any(alphas <= 0):
        raise UsageError("recovered alpha_k must be positive")
    res = np.asarray(trace.residuals)
    m1 = gaps - ((2.0 - alphas) / alphas) * deltas**2
    m2 = gaps - (epsilon / nu_value) ** 2 * res**2
    margins = np.minimum(m1, m2)
    return _report("fejer-dc", margins, trace.iterates[:-1], tol)
