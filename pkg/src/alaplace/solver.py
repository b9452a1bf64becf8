"""Sub/supersolution solver for -div(A'(|grad u|) grad u/|grad u|) = f(x, u, grad u).

The gradient dependence of f is handled by truncation: beyond radius R the
convection term is scaled down by A'(R)R / (A'(|xi|)|xi|), which caps it at
its value on the sphere |xi| = R and makes the frozen problems uniformly
solvable.  The outer loop freezes (u, grad u) in f, solves the resulting
convex minimization by damped Newton, relaxes, and clamps into the ordered
bracket [lower, upper]; R is doubled and the solve repeated while the
converged gradient touches R.

Everything is deterministic: fixed iteration orders, no randomness, no time.
"""

from dataclasses import dataclass, field as dc_field
import warnings

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .youngfn import YoungFunction
from .operators import ALaplacianOperator
from .discretize import Mesh, DiscreteField, assemble, assemble_energy

__all__ = [
    "ConvectionTerm",
    "OneSidedGrowth",
    "TruncatedConvection",
    "SubSuperPair",
    "SolveReport",
    "SolveError",
    "truncate_convection",
    "solve_frozen",
    "solve_problem",
    "mirror_problem",
    "auxiliary_supersolution",
]


class SolveError(RuntimeError):
    """Non-convergence of an inner or outer iteration, with diagnostics attached."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class OneSidedGrowth:
    """Data for the one-sided growth hypothesis backing the bracket construction.

    rho1/g1 bound f from above for s >= 0 (f <= rho1(x) + g1(s)); rho2/g2 bound
    it from below (f >= rho2(x) - g2(s) - a(s) A'(|xi|)|xi|).  g1, g2 are
    nondecreasing with g(0) = 0; a_of_s is locally bounded; (s0, k1) witness
    the subcritical growth g1(s)s <= A(k1 s) for s >= s0.
    """

    rho1: callable
    rho2: callable
    g1: callable
    g2: callable
    a_of_s: callable
    s0: float
    k1: float


@dataclass
class ConvectionTerm:
    """f(x, s, xi), vectorized over samples, with its declared growth data.

    fn maps (x: (m,dim), s: (m,), xi: (m,dim)) -> (m,).  sigma and the constant
    a witness |f(x,s,xi)| <= sigma(x) + a A'(|xi|)|xi| for s inside the working
    bracket.  one_sided optionally carries the data the auxiliary-supersolution
    construction needs.
    """

    fn: callable
    sigma: callable
    a: float
    one_sided: OneSidedGrowth = None
    name: str = ""

    def __call__(self, x, s, xi):
        return np.asarray(self.fn(np.asarray(x, dtype=float), np.asarray(s, dtype=float), np.asarray(xi, dtype=float)), dtype=float)


@dataclass
class TruncatedConvection:
    """f_R: f untouched for |xi| <= R, scaled by A'(R)R/(A'(|xi|)|xi|) beyond.

    Uniformly bounded: |f_R| <= sigma(x) + a A'(R) R.  Tracks the largest
    magnitude it has returned, so solves can report the cap was respected.
    """

    base: ConvectionTerm
    A: YoungFunction
    R: float
    max_abs_seen: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.R) and self.R > 0):
            raise ValueError("truncation radius must be positive and finite")

    def cap(self, sigma_sup: float) -> float:
        return sigma_sup + self.base.a * float(self.A.deriv1(self.R)) * self.R

    def __call__(self, x, s, xi):
        xi = np.asarray(xi, dtype=float)
        r = np.sqrt(np.sum(xi * xi, axis=-1))
        f = self.base(x, s, xi)
        over = r > self.R
        if np.any(over):
            num = float(self.A.deriv1(self.R)) * self.R
            den = np.where(over, np.asarray(self.A.deriv1(r), dtype=float) * r, 1.0)
            f = np.where(over, f * (num / den), f)
        seen = float(np.max(np.abs(f), initial=0.0))
        if seen > self.max_abs_seen:
            self.max_abs_seen = seen
        return f


def truncate_convection(f: ConvectionTerm, A: YoungFunction, R: float) -> TruncatedConvection:
    return TruncatedConvection(base=f, A=A, R=R)


@dataclass
class SubSuperPair:
    """Ordered bracket: lower <= upper nodally, lower <= 0 <= upper on the boundary."""

    lower: DiscreteField
    upper: DiscreteField

    def __post_init__(self):
        if self.lower.mesh is not self.upper.mesh:
            raise ValueError("bracket fields must share one mesh")
        if np.any(self.lower.values > self.upper.values + 1e-14):
            raise ValueError("bracket is not ordered: lower > upper somewhere")
        b = self.lower.mesh.boundary
        if np.any(self.lower.values[b] > 1e-12) or np.any(self.upper.values[b] < -1e-12):
            raise ValueError("bracket must satisfy lower <= 0 <= upper on the boundary")

    @property
    def mesh(self) -> Mesh:
        return self.lower.mesh

    def clamp(self, values: np.ndarray) -> np.ndarray:
        return np.clip(values, self.lower.values, self.upper.values)

    def midpoint_start(self) -> DiscreteField:
        vals = 0.5 * (self.lower.values + self.upper.values)
        vals[self.mesh.boundary] = 0.0
        return DiscreteField(self.mesh, vals)

    def sup_bound(self) -> float:
        return max(self.lower.sup_norm(), self.upper.sup_norm())

    def mirror(self) -> "SubSuperPair":
        return SubSuperPair(
            lower=DiscreteField(self.mesh, -self.upper.values),
            upper=DiscreteField(self.mesh, -self.lower.values),
        )


# ----------------------------------------------------------------------------
# frozen convex solve


def _newton_direction(H: sp.csr_matrix, g: np.ndarray) -> np.ndarray:
    """Solve H d = -g, nudging H by a growing Levenberg shift until it works.

    The regularized Hessian can be exactly singular at flat iterates of
    degenerate operators (A''(0) = 0), so factorization failure or a
    non-descent direction falls back to larger shifts, and ultimately to
    steepest descent.
    """
    n = H.shape[0]
    diag_scale = float(np.mean(np.abs(H.diagonal()))) or 1.0
    nu = 0.0
    for _ in range(30):
        M = H if nu == 0.0 else H + sp.identity(n, format="csr") * nu
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                d = spla.spsolve(M.tocsc(), -g)
            except Exception:
                d = None
        if d is not None and np.all(np.isfinite(d)):
            slope = float(np.dot(g, d))
            if slope < 0.0:
                return d
        nu = max(nu * 10.0, 1e-10 * diag_scale)
    return -g


def solve_frozen(
    op: ALaplacianOperator,
    rhs,
    mesh: Mesh,
    init: DiscreteField,
    tol: float = 1e-10,
    max_iter: int = 100,
    armijo: float = 1e-4,
    backtrack: float = 0.5,
) -> DiscreteField:
    """Minimize J(v) = int A(|grad v|) - (rhs, v) over fields vanishing on the boundary.

    Damped Newton with Armijo backtracking on J; terminates when the assembled
    gradient's sup norm drops below tol.  Raises SolveError on line-search
    failure or iteration exhaustion (never silently returns a bad field).
    """
    if init.mesh is not mesh:
        raise ValueError("init field lives on a different mesh")
    if np.any(np.abs(init.values[mesh.boundary]) > 1e-12):
        raise ValueError("init must vanish on the boundary")
    rhs = np.asarray(rhs, dtype=float)
    u = init.copy()
    J = assemble_energy(op, rhs, u)
    for _ in range(max_iter):
        system = assemble(op, rhs, u)
        gnorm = float(np.max(np.abs(system.gradient), initial=0.0))
        if gnorm < tol:
            return u
        d = _newton_direction(system.hessian, system.gradient)
        slope = float(np.dot(system.gradient, d))
        step = np.zeros(mesh.n_nodes)
        step[mesh.interior] = d
        # near the minimum the predicted decrease drops below the rounding
        # noise of J itself; without this allowance the test rejects full
        # Newton steps whose true decrease is smaller than one ulp of J
        noise = 64.0 * np.finfo(float).eps * max(abs(J), 1e-30)
        t = 1.0
        while True:
            trial = DiscreteField(mesh, u.values + t * step)
            J_trial = assemble_energy(op, rhs, trial)
            if J_trial <= J + armijo * t * slope + noise:
                break
            t *= backtrack
            if t < 1e-14:
                raise SolveError(
                    "line search failed in frozen solve",
                    gradient_norm=gnorm,
                    energy=J,
                    slope=slope,
                )
        u = trial
        J = J_trial
    raise SolveError("frozen solve: max iterations exceeded", gradient_norm=gnorm, energy=J)


# ----------------------------------------------------------------------------
# outer bracketed iteration


@dataclass
class SolveReport:
    solution: DiscreteField
    outer_iterations: int
    final_residual: float
    R: float
    max_gradient: float
    bracket_violation: float
    structure_summary: dict
    converged: bool
    R_active: bool
    bracket_active: bool
    escalations: int
    truncation_cap: float
    max_load_seen: float
    failure_reason: str = None
    theta_final: float = 1.0


def _structure_summary(op: ALaplacianOperator, grads: np.ndarray) -> dict:
    """Cheap structure margins sampled at the solve's own cell gradients."""
    from .operators import verify_structure

    r = np.sqrt(np.sum(grads * grads, axis=1))
    keep = r > 1e-12
    if not np.any(keep):
        return {"samples": 0, "margin_a": None, "margin_b": None}
    etas = grads[keep][:2000]
    rng = np.random.default_rng(0)
    xis = rng.standard_normal(etas.shape)
    rep = verify_structure(op, etas, xis)
    return {"samples": rep.n_samples, "margin_a": rep.margins["a"], "margin_b": rep.margins["b"]}


def _picard(op, trunc, pair, mesh, init, outer_tol, outer_max, inner_tol, newton_max, theta_min):
    u = init.values.copy()
    theta = 1.0
    prev_res = np.inf
    clamp_mag = 0.0
    res = np.inf
    x = mesh.nodes
    for k in range(1, outer_max + 1):
        ufield = DiscreteField(mesh, u)
        s = pair.clamp(u)
        xi = ufield.node_gradients()
        load = trunc(x, s, xi)
        try:
            v = solve_frozen(op, load, mesh, init=ufield, tol=inner_tol, max_iter=newton_max)
        except SolveError as err:
            return u, k, res, clamp_mag, theta, "frozen solve failed: %s" % err
        w = theta * v.values + (1.0 - theta) * u
        w[mesh.boundary] = 0.0
        clamped = pair.clamp(w)
        clamp_mag = float(np.max(np.abs(clamped - w), initial=0.0))
        res = float(np.max(np.abs(clamped - u), initial=0.0))
        if res > prev_res:
            theta = max(theta / 2.0, theta_min)
        u = clamped
        prev_res = res
        if res < outer_tol:
            return u, k, res, clamp_mag, theta, None
    return u, outer_max, res, clamp_mag, theta, "outer iteration did not converge"


def solve_problem(
    op: ALaplacianOperator,
    f: ConvectionTerm,
    pair: SubSuperPair,
    mesh: Mesh = None,
    outer_tol: float = 1e-8,
    outer_max: int = 200,
    inner_tol: float = 1e-10,
    newton_max: int = 100,
    r_initial: float = None,
    r_factor: float = 2.0,
    max_escalations: int = 10,
    theta_min: float = 1.0 / 16.0,
) -> SolveReport:
    """Bracketed Picard iteration with gradient truncation.

    Starts from the bracket midpoint (zeroed on the boundary).  The initial
    truncation radius is 2 max(1, |grad init|_inf) unless given; after a
    converged pass, R doubles and the solve repeats while the measured gradient
    reaches R (at most max_escalations times).
    """
    mesh = mesh or pair.mesh
    init = pair.midpoint_start()
    g0 = init.cell_gradients()
    grad0 = float(np.max(np.sqrt(np.sum(g0 * g0, axis=1)), initial=0.0))
    R = r_initial if r_initial is not None else 2.0 * max(1.0, grad0)
    sigma_sup = float(np.max(np.asarray(f.sigma(mesh.nodes), dtype=float)))

    escalations = 0
    while True:
        trunc = truncate_convection(f, op.A, R)
        u, iters, res, clamp_mag, theta, reason = _picard(
            op, trunc, pair, mesh, init, outer_tol, outer_max, inner_tol, newton_max, theta_min
        )
        sol = DiscreteField(mesh, u)
        g = sol.cell_gradients()
        max_grad = float(np.max(np.sqrt(np.sum(g * g, axis=1)), initial=0.0))
        if reason is None and max_grad >= R and escalations < max_escalations:
            escalations += 1
            R *= r_factor
            continue
        break

    R_active = max_grad >= R
    if reason is None and R_active:
        reason = "truncation radius escalation exhausted (max gradient %.3g >= R %.3g)" % (max_grad, R)
    return SolveReport(
        solution=sol,
        outer_iterations=iters,
        final_residual=res,
        R=R,
        max_gradient=max_grad,
        bracket_violation=clamp_mag,
        structure_summary=_structure_summary(op, g),
        converged=(reason is None and res < outer_tol),
        R_active=R_active,
        bracket_active=clamp_mag > 0.0,
        escalations=escalations,
        truncation_cap=trunc.cap(sigma_sup),
        max_load_seen=trunc.max_abs_seen,
        failure_reason=reason,
        theta_final=theta,
    )


def mirror_problem(f: ConvectionTerm, pair: SubSuperPair):
    """Reflect the problem through u -> -u: f'(x,s,xi) = -f(x,-s,-xi), bracket negated.

    Solving the mirrored problem and negating recovers a solution of the
    original, which turns a nonpositive bracket into a nonnegative one.
    """
    base = f.fn

    def mirrored(x, s, xi):
        return -np.asarray(base(x, -np.asarray(s, dtype=float), -np.asarray(xi, dtype=float)), dtype=float)

    one = f.one_sided
    mirrored_one = None
    if one is not None:
        mirrored_one = OneSidedGrowth(
            rho1=one.rho2, rho2=one.rho1, g1=one.g2, g2=one.g1,
            a_of_s=lambda s: np.asarray(one.a_of_s(-np.asarray(s, dtype=float)), dtype=float),
            s0=one.s0, k1=one.k1,
        )
    f2 = ConvectionTerm(fn=mirrored, sigma=f.sigma, a=f.a, one_sided=mirrored_one,
                        name=(f.name + "-mirrored") if f.name else "mirrored")
    return f2, pair.mirror()


def auxiliary_supersolution(
    op: ALaplacianOperator,
    rho1,
    g1,
    mesh: Mesh,
    tol: float = 1e-8,
    max_iter: int = 200,
    inner_tol: float = 1e-10,
    on_iterate=None,
) -> DiscreteField:
    """Solve -div A'(|grad u|) grad u/|grad u| = rho1(x) + g1(|u|), u = 0 on the boundary.

    Picard from u = 0; with rho1 >= 0 and g1 nondecreasing the iterates are
    nondecreasing, and the limit is the supersolution the bracket construction
    uses.  rho1 is a nodal array or a callable of the node coordinates.
    """
    rho = np.asarray(rho1(mesh.nodes) if callable(rho1) else rho1, dtype=float)
    if rho.shape != (mesh.n_nodes,):
        raise ValueError("rho1 must be nodal")
    u = DiscreteField(mesh, np.zeros(mesh.n_nodes))
    for _ in range(max_iter):
        load = rho + np.asarray(g1(np.abs(u.values)), dtype=float)
        v = solve_frozen(op, load, mesh, init=u, tol=inner_tol)
        res = float(np.max(np.abs(v.values - u.values)))
        u = v
        if on_iterate is not None:
            on_iterate(u.copy())
        if res < tol:
            return u
    raise SolveError("auxiliary supersolution iteration did not converge", residual=res)
