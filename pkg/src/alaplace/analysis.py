"""Hypothesis checks and certificates for the bracketed solver.

These routines verify, at the discrete level, the assumptions the existence
argument rests on: the one-sided growth data behind the auxiliary
supersolution, the two-sided bound |f| <= sigma(x) + a A'(|xi|)|xi| inside a
bracket, weak sub/supersolution residual signs, and the chain of inequalities
that keeps bracketed solutions strictly signed in the interior.  Each check
returns a small report object with explicit margins rather than a bare bool,
so a failure points at the inequality that broke and by how much.

Margins are relative: (satisfied side - required side) / max(1, required
side).  A margin of -1e-9 on an inequality that holds analytically is noise;
anything materially negative is a genuine violation.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .youngfn import YoungFunction, IndexBounds
from .operators import ALaplacianOperator
from .discretize import Mesh, DiscreteField, assemble
from .solver import ConvectionTerm, OneSidedGrowth, SubSuperPair

__all__ = [
    "HypothesisReport",
    "GrowthReport",
    "ResidualReport",
    "PositivityCertificate",
    "PositivityReport",
    "SignReport",
    "check_hypothesis_H",
    "check_growth_H",
    "verify_subsolution",
    "verify_supersolution",
    "build_positivity_certificate",
    "check_positivity_certificate",
    "check_interior_sign",
]

# volume of the unit ball, by dimension
_BALL_VOLUME = {1: 2.0, 2: np.pi}


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the one-sided growth hypothesis check."""

    k1: float
    k1_max: float
    checks: dict
    growth_margin: float
    passed: bool


def check_hypothesis_H(
    one_sided: OneSidedGrowth,
    A: YoungFunction,
    mesh: Mesh,
    n_samples: int = 400,
    s_span: float = 1e3,
) -> HypothesisReport:
    """Check the data (rho1, rho2, g1, g2, s0, k1) against the domain and A.

    Verifies: 0 < k1 < (ball volume)^(1/n) |domain|^(-1/n); rho1, rho2 >= 0
    nodally with rho2 positive somewhere; g1, g2 vanish at 0 and are
    nondecreasing; and the subcritical growth g1(s) s <= A(k1 s) on a log
    grid from s0 to s_span * s0.
    """
    n = mesh.dim
    k1_max = _BALL_VOLUME[n] ** (1.0 / n) * mesh.volume ** (-1.0 / n)
    k1 = float(one_sided.k1)
    checks = {}
    checks["k1_admissible"] = bool(0.0 < k1 < k1_max)

    r1 = np.asarray(one_sided.rho1(mesh.nodes), dtype=float)
    r2 = np.asarray(one_sided.rho2(mesh.nodes), dtype=float)
    checks["rho1_nonnegative"] = bool(np.all(r1 >= 0.0))
    checks["rho2_nonnegative"] = bool(np.all(r2 >= 0.0))
    checks["rho2_positive_somewhere"] = bool(np.any(r2 > 0.0))

    s0 = float(one_sided.s0)
    grid = np.concatenate([[0.0], np.geomspace(1e-8, s_span * max(s0, 1.0), n_samples)])
    for label, g in (("g1", one_sided.g1), ("g2", one_sided.g2)):
        vals = np.asarray(g(grid), dtype=float)
        checks[label + "_zero_at_zero"] = bool(abs(vals[0]) <= 1e-14)
        checks[label + "_nondecreasing"] = bool(np.all(np.diff(vals) >= -1e-12 * np.maximum(1.0, np.abs(vals[1:]))))

    s = np.geomspace(s0, s_span * s0, n_samples)
    lhs = np.asarray(one_sided.g1(s), dtype=float) * s
    rhs = np.asarray(A.value(k1 * s), dtype=float)
    growth_margin = float(np.min((rhs - lhs) / np.maximum(1.0, rhs)))
    checks["growth_subcritical"] = bool(growth_margin >= -1e-10)

    return HypothesisReport(
        k1=k1,
        k1_max=float(k1_max),
        checks=checks,
        growth_margin=growth_margin,
        passed=all(checks.values()),
    )


@dataclass(frozen=True)
class GrowthReport:
    """Sampled margin of |f(x,s,xi)| <= sigma(x) + a A'(|xi|)|xi| over a bracket."""

    n_samples: int
    margin: float
    sigma_sup: float
    a: float
    passed: bool


def check_growth_H(
    f: ConvectionTerm,
    pair: SubSuperPair,
    A: YoungFunction,
    n_samples: int = 4000,
    seed: int = 0,
    xi_max: float = 1e3,
) -> GrowthReport:
    """Sample the declared two-sided bound with s inside the bracket.

    Draws nodes at random, s uniformly between the bracket fields at that
    node, and gradient magnitudes log-uniform up to xi_max with random
    directions.  The reported margin is the worst relative slack.
    """
    mesh = pair.mesh
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, mesh.n_nodes, size=n_samples)
    x = mesh.nodes[idx]
    lo = pair.lower.values[idx]
    hi = pair.upper.values[idx]
    s = lo + (hi - lo) * rng.random(n_samples)
    r = np.geomspace(1e-8, xi_max, n_samples)
    d = rng.standard_normal((n_samples, mesh.dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    xi = d * r[:, None]

    lhs = np.abs(f(x, s, xi))
    sigma = np.asarray(f.sigma(x), dtype=float)
    rhs = sigma + f.a * np.asarray(A.deriv1(r), dtype=float) * r
    margin = float(np.min((rhs - lhs) / np.maximum(1.0, rhs)))
    return GrowthReport(
        n_samples=n_samples,
        margin=margin,
        sigma_sup=float(np.max(sigma)),
        a=float(f.a),
        passed=bool(margin >= -1e-10),
    )


@dataclass(frozen=True)
class ResidualReport:
    """Signed weak residual of a candidate sub- or supersolution."""

    kind: str
    worst_residual: float
    boundary_violation: float
    n_interior: int
    passed: bool


def _weak_residual(u: DiscreteField, f: ConvectionTerm, op: ALaplacianOperator) -> np.ndarray:
    s = u.values
    xi = u.node_gradients()
    rhs = f(u.mesh.nodes, s, xi)
    return assemble(op, rhs, u).gradient


def verify_subsolution(u: DiscreteField, f: ConvectionTerm, op: ALaplacianOperator, atol: float = 1e-8) -> ResidualReport:
    """A subsolution has nonpositive weak residual against nonnegative test functions.

    Discretely: every interior entry of the assembled gradient is <= atol,
    and the boundary trace is <= atol.
    """
    g = _weak_residual(u, f, op)
    worst = float(np.max(g, initial=-np.inf))
    btrace = float(np.max(u.values[u.mesh.boundary], initial=-np.inf))
    return ResidualReport(
        kind="sub",
        worst_residual=worst,
        boundary_violation=max(btrace, 0.0),
        n_interior=g.size,
        passed=bool(worst <= atol and btrace <= atol),
    )


def verify_supersolution(u: DiscreteField, f: ConvectionTerm, op: ALaplacianOperator, atol: float = 1e-8) -> ResidualReport:
    """Mirror of verify_subsolution: residual entries >= -atol, trace >= -atol."""
    g = _weak_residual(u, f, op)
    worst = float(np.min(g, initial=np.inf))
    btrace = float(np.min(u.values[u.mesh.boundary], initial=np.inf))
    return ResidualReport(
        kind="super",
        worst_residual=worst,
        boundary_violation=max(-btrace, 0.0),
        n_interior=g.size,
        passed=bool(worst >= -atol and btrace >= -atol),
    )


# ----------------------------------------------------------------------------
# interior positivity certificate


@dataclass(frozen=True)
class PositivityCertificate:
    """Constants for the lower bound 1/H^{-1}(B(s)) >= delta_bar / (b1 s).

    H(s) = s A'(s) - A(s), B(s) = int_0^s A(k t)/t dt.  h is the smallest
    integer with k < 2^h, so iterated doubling gives A(k s) <= K^h A(s);
    b1 = max(delta_bar, K^h).  delta_bar must not exceed p_A - 1, the
    coefficient in H(s) >= (p_A - 1) A(s).
    """

    k: float
    delta_bar: float
    K: float
    h: int
    b1: float
    p_A: float


def build_positivity_certificate(
    A: YoungFunction,
    bounds: IndexBounds,
    K: float,
    k: float,
    delta_bar: float = None,
) -> PositivityCertificate:
    if not (np.isfinite(k) and k > 0):
        raise ValueError("scaling k must be positive")
    if not (np.isfinite(K) and K >= 1.0):
        raise ValueError("doubling constant K must be >= 1")
    if delta_bar is None:
        delta_bar = bounds.p_A - 1.0
    if not (0.0 < delta_bar <= bounds.p_A - 1.0 + 1e-12):
        raise ValueError("delta_bar must lie in (0, p_A - 1]")
    h = int(np.floor(np.log2(k))) + 1
    b1 = max(delta_bar, K ** h)
    return PositivityCertificate(k=float(k), delta_bar=float(delta_bar), K=float(K),
                                 h=h, b1=float(b1), p_A=float(bounds.p_A))


@dataclass(frozen=True)
class PositivityReport:
    """Per-link margins of the certificate chain, sampled on a log grid."""

    margins: dict
    divergence_lower_bound: float
    passed: bool


def _H(A: YoungFunction, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return s * np.asarray(A.deriv1(s), dtype=float) - np.asarray(A.value(s), dtype=float)


def _H_inverse(A: YoungFunction, target: float, s_hint: float, rel_tol: float = 1e-13) -> float:
    """Invert the strictly increasing H by bracketing bisection."""
    if target <= 0.0:
        return 0.0
    lo, hi = s_hint, s_hint
    for _ in range(300):
        if _H(A, np.array([hi]))[0] >= target:
            break
        hi *= 2.0
    for _ in range(300):
        if _H(A, np.array([lo]))[0] <= target:
            break
        lo *= 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _H(A, np.array([mid]))[0] < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * hi:
            break
    return 0.5 * (lo + hi)


def check_positivity_certificate(
    cert: PositivityCertificate,
    A: YoungFunction,
    bounds: IndexBounds,
    n_samples: int = 100,
    s_min: float = 1e-8,
    s_max: float = 1.0,
) -> PositivityReport:
    """Verify each link of the chain behind 1/H^{-1}(B(s)) >= delta_bar/(b1 s).

    Links, each sampled at n_samples log-spaced points in [s_min, s_max]:
      H_lower:      H(s) >= delta_bar A(s)
      b_monotone:   b(s) = A(k s)/s is nondecreasing
      B_vs_Aks:     B(s) = int_0^s A(k t)/t dt <= A(k s)
      doubling:     A(k s) <= K^h A(s)
      conclusion:   1/H^{-1}(B(s)) >= delta_bar/(b1 s)
    Also reports int_{s_min}^{s_max} delta_bar/(b1 s) ds, the divergence
    surrogate that grows without bound as s_min -> 0.
    """
    s = np.geomspace(s_min, s_max, n_samples)
    Av = np.asarray(A.value(s), dtype=float)
    Aks = np.asarray(A.value(cert.k * s), dtype=float)
    Hs = _H(A, s)

    def rel(lhs, rhs):
        # lhs >= rhs, relative slack
        return float(np.min((lhs - rhs) / np.maximum(1.0, np.abs(rhs))))

    margins = {}
    margins["H_lower"] = rel(Hs, cert.delta_bar * Av)

    b = Aks / s
    margins["b_monotone"] = float(np.min(np.diff(b) / np.maximum(1.0, b[1:])))

    integrand = lambda t: float(A.value(cert.k * t)) / t
    B = np.empty_like(s)
    acc = quad(integrand, 0.0, s[0], epsabs=1e-300, epsrel=1e-11, limit=200)[0]
    B[0] = acc
    for i in range(1, len(s)):
        acc += quad(integrand, s[i - 1], s[i], epsabs=1e-300, epsrel=1e-11, limit=200)[0]
        B[i] = acc
    margins["B_vs_Aks"] = rel(Aks, B)

    margins["doubling"] = rel(cert.K ** cert.h * Av, Aks)

    inv = np.array([_H_inverse(A, Bi, si) for Bi, si in zip(B, s)])
    lhs = 1.0 / inv
    rhs = cert.delta_bar / (cert.b1 * s)
    margins["conclusion"] = rel(lhs, rhs)

    divergence = cert.delta_bar / cert.b1 * float(np.log(s_max / s_min))
    passed = all(m >= -1e-9 for m in margins.values())
    return PositivityReport(margins=margins, divergence_lower_bound=divergence, passed=passed)


@dataclass(frozen=True)
class SignReport:
    """Strict interior sign of a discrete field."""

    sign: str
    extreme: float
    n_violations: int
    passed: bool


def check_interior_sign(u: DiscreteField, sign: str) -> SignReport:
    """Check u > 0 (sign='positive') or u < 0 (sign='negative') at interior nodes."""
    if sign not in ("positive", "negative"):
        raise ValueError("sign must be 'positive' or 'negative'")
    vals = u.values[u.mesh.interior]
    if sign == "positive":
        bad = int(np.sum(vals <= 0.0))
        extreme = float(np.min(vals, initial=np.inf))
    else:
        bad = int(np.sum(vals >= 0.0))
        extreme = float(np.max(vals, initial=-np.inf))
    return SignReport(sign=sign, extreme=extreme, n_violations=bad, passed=(bad == 0))
