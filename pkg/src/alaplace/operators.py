"""The A-Laplacian flux, its Hessian, and the structure inequalities.

With Phi(eta) = A(|eta|), the operator is -div(grad Phi(grad u)).  The flux and
its Jacobian are

    grad Phi(eta)   = A'(|eta|) eta / |eta|
    d2 Phi(eta)_ij  = A''(|eta|) eta_i eta_j / |eta|^2
                      + A'(|eta|) (delta_ij/|eta| - eta_i eta_j/|eta|^3)

so the eigenvalues split into A''(|eta|) along eta and A'(|eta|)/|eta| across
it.  The growth indices (delta, g0) of A' turn that split into the two-sided
structure bounds

    xi . d2 Phi(eta) xi  >=  min(delta, 1) (A'(|eta|)/|eta|) |xi|^2
    sum_ij |d2 Phi(eta)_ij|  <=  lambda A'(|eta|)/|eta|,
    lambda = 2 max(|delta - 1|, |g0 - 1|) + n

verified here by direct sampling.  An epsilon-regularized magnitude
sqrt(|eta|^2 + eps^2) may replace |eta| in the denominators (only there; the
argument of A' and A'' is untouched, preserving the degenerate directions).
"""

from dataclasses import dataclass
import numpy as np

from .youngfn import YoungFunction, IndexBounds, estimate_index_bounds, _MACHINE_ZERO

__all__ = ["ALaplacianOperator", "StructureReport", "make_operator", "flux", "hessian", "verify_structure"]


@dataclass(frozen=True)
class ALaplacianOperator:
    A: YoungFunction
    bounds: IndexBounds
    dim: int
    epsilon_reg: float = 0.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("operator dimension must be 1 or 2, got %d" % self.dim)
        if self.epsilon_reg < 0:
            raise ValueError("epsilon_reg must be nonnegative")

    @property
    def ellipticity_constant(self) -> float:
        return min(self.bounds.delta, 1.0)

    @property
    def lambda_struct(self) -> float:
        b = self.bounds
        return 2.0 * max(abs(b.delta - 1.0), abs(b.g0 - 1.0)) + self.dim

    @property
    def Lambda_struct(self) -> float:
        return self.lambda_struct / self.ellipticity_constant

    def g_floor(self, t):
        """Ellipticity envelope g(t) = min(delta, 1) A'(t)."""
        return self.ellipticity_constant * np.asarray(self.A.deriv1(t), dtype=float)


def make_operator(A: YoungFunction, dim: int, bounds: IndexBounds = None, epsilon_reg: float = 0.0) -> ALaplacianOperator:
    if bounds is None:
        bounds = estimate_index_bounds(A)
    return ALaplacianOperator(A=A, bounds=bounds, dim=dim, epsilon_reg=epsilon_reg)


def _norms(eta):
    eta = np.asarray(eta, dtype=float)
    if eta.shape[-1:] == ():
        raise ValueError("eta must have a trailing space dimension")
    return eta, np.sqrt(np.sum(eta * eta, axis=-1))


def flux(op: ALaplacianOperator, eta):
    """A'(|eta|) eta / |eta| (zero vector at eta = 0), vectorized over leading axes."""
    eta, r = _norms(eta)
    denom = np.sqrt(r * r + op.epsilon_reg**2) if op.epsilon_reg > 0 else r
    safe = np.where(denom > _MACHINE_ZERO, denom, 1.0)
    scale = np.where(r > _MACHINE_ZERO, np.asarray(op.A.deriv1(r), dtype=float) / safe, 0.0)
    return eta * scale[..., None]


def hessian(op: ALaplacianOperator, eta):
    """d2 Phi(eta), regularized in the denominators when epsilon_reg > 0.

    Shape (..., n, n).  Raises at eta = 0 with no regularization (the formula
    is singular there).
    """
    eta, r = _norms(eta)
    if op.epsilon_reg == 0.0 and np.any(r <= _MACHINE_ZERO):
        raise ValueError("hessian undefined at eta = 0 without regularization")
    rt = np.sqrt(r * r + op.epsilon_reg**2)
    rt = np.where(rt > _MACHINE_ZERO, rt, 1.0)
    zero = r <= _MACHINE_ZERO
    with np.errstate(divide="ignore", invalid="ignore"):
        a2 = np.asarray(op.A.deriv2(r), dtype=float)
    a2 = np.where(zero, 0.0, a2)  # eta eta^T vanishes there anyway
    a1 = np.where(zero, 0.0, np.asarray(op.A.deriv1(r), dtype=float))
    outer = eta[..., :, None] * eta[..., None, :]
    eye = np.eye(eta.shape[-1])
    radial = (a2 / rt**2 - a1 / rt**3)[..., None, None] * outer
    tangential = (a1 / rt)[..., None, None] * eye
    return radial + tangential


@dataclass(frozen=True)
class StructureReport:
    n_samples: int
    margins: dict
    passed: dict
    vacuous: tuple
    lambda_struct: float
    Lambda1: float = None

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


def verify_structure(
    op: ALaplacianOperator,
    etas,
    xis,
    convection=None,
    M0: float = None,
    x=None,
    tol: float = 1e-10,
) -> StructureReport:
    """Sample the coefficient conditions the operator must satisfy.

    (a) ellipticity  xi.d2Phi(eta)xi >= (g(|eta|)/|eta|)|xi|^2 with
        g(t) = min(delta,1) A'(t);
    (b) size         sum |d2Phi_ij| <= Lambda g(|eta|)/|eta|,
        Lambda = lambda/min(delta,1);
    (c) coefficient continuity in x: vacuous, the flux is autonomous;
    (d) convection size |f(x,s,xi)| <= Lambda1 (1 + g(|xi|)|xi|) with
        Lambda1 = max(sup sigma, a/min(delta,1)), checked only when a
        convection term (and M0, x samples) is supplied.

    Margins are relative; passing means margin >= -tol.
    """
    etas = np.asarray(etas, dtype=float)
    xis = np.asarray(xis, dtype=float)
    if etas.shape != xis.shape or etas.ndim != 2 or etas.shape[1] != op.dim:
        raise ValueError("etas and xis must both have shape (m, dim)")
    r = np.sqrt(np.sum(etas * etas, axis=1))
    if np.any(r <= _MACHINE_ZERO):
        raise ValueError("structure samples need |eta| > 0")
    exact = ALaplacianOperator(A=op.A, bounds=op.bounds, dim=op.dim, epsilon_reg=0.0)
    H = hessian(exact, etas)
    a1_over_r = np.asarray(op.A.deriv1(r), dtype=float) / r
    xi2 = np.sum(xis * xis, axis=1)
    quad = np.einsum("mi,mij,mj->m", xis, H, xis)
    cmin = op.ellipticity_constant
    live = xi2 > 0
    scale_a = a1_over_r * xi2
    margin_a = float(np.min((quad[live] - cmin * scale_a[live]) / scale_a[live])) if np.any(live) else 0.0
    sum_abs = np.sum(np.abs(H), axis=(1, 2))
    bound_b = op.lambda_struct * a1_over_r
    margin_b = float(np.min((bound_b - sum_abs) / bound_b))
    margins = {"a": margin_a, "b": margin_b, "c": None}
    passed = {"a": margin_a >= -tol, "b": margin_b >= -tol, "c": True}
    vacuous = ["c"]
    Lambda1 = None
    if convection is not None and M0 is not None and x is not None:
        x = np.asarray(x, dtype=float)
        m = etas.shape[0]
        xs = x[np.arange(m) % len(x)]
        ss = np.linspace(-M0, M0, m)
        sig = np.asarray(convection.sigma(xs), dtype=float)
        Lambda1 = max(float(np.max(sig)), convection.a / cmin)
        fv = np.abs(np.asarray(convection(xs, ss, xis), dtype=float))
        rhs = Lambda1 * (1.0 + np.asarray(op.g_floor(np.sqrt(xi2)), dtype=float) * np.sqrt(xi2))
        margin_d = float(np.min((rhs - fv) / np.maximum(rhs, 1.0)))
        margins["d"] = margin_d
        passed["d"] = margin_d >= -tol
    else:
        margins["d"] = None
        passed["d"] = True
        vacuous.append("d")
    return StructureReport(
        n_samples=int(etas.shape[0]),
        margins=margins,
        passed=passed,
        vacuous=tuple(vacuous),
        lambda_struct=op.lambda_struct,
        Lambda1=Lambda1,
    )
