"""Young-function calculus: families, growth indices, conjugates, Orlicz norms.

The objects here describe the nonlinearity A that drives the operator
-div(A'(|grad u|) grad u / |grad u|).  A Young function is convex on [0, inf),
vanishes at 0, and is C^2 away from 0.  Everything downstream (ellipticity
constants, truncation caps, doubling behaviour, duality) is derived from A,
A', A'' and four growth indices:

    delta <= t A''(t) / A'(t) <= g0      (second-order quotient)
    p_A   <= t A'(t) / A(t)   <= q_A     (first-order quotient)

Indices are estimated on log-spaced grids.  The second-order quotient of the
logarithmic families approaches its limit like 1/ln t, far too slowly for any
floating-point grid to resolve, so the estimator extrapolates each tail
linearly in 1/ln t; that extrapolation is exact for the built-in families'
tail expansions and inert for power-type tails (where the fitted slope is 0).
"""

from dataclasses import dataclass, field
import numpy as np
from scipy.interpolate import PchipInterpolator

_MACHINE_ZERO = 1e-300

__all__ = [
    "YoungFunction",
    "IndexBounds",
    "DoublingConstants",
    "ConjugateFunction",
    "HolderReport",
    "make_young",
    "default_grid",
    "estimate_index_bounds",
    "doubling_constants",
    "conjugate",
    "luxemburg_norm",
    "check_holder",
]


@dataclass(frozen=True)
class YoungFunction:
    """A(t) with closed-form first and second derivatives, all vectorized in t >= 0."""

    value: callable
    deriv1: callable
    deriv2: callable
    family_tag: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        v0 = float(np.asarray(self.value(0.0)))
        if not abs(v0) <= 1e-14:
            raise ValueError("Young function must vanish at 0, got A(0)=%g" % v0)
        # A'(0+) = 0 is required (superlinear at the origin); compare two deep
        # tail samples so that slowly-decaying derivatives still pass while a
        # positive limit is rejected.
        d_deep = float(np.asarray(self.deriv1(1e-250)))
        d_mid = float(np.asarray(self.deriv1(1e-120)))
        if not d_deep <= 0.9 * d_mid + 1e-12 * max(1.0, abs(d_mid)):
            raise ValueError("A'(0) must vanish; sampled derivative does not decay near 0")
        t_check = np.array([1e-2, 1.0, 1e2])
        if np.any(np.asarray(self.deriv2(t_check)) < 0):
            raise ValueError("A must be convex: A'' sampled negative")


@dataclass(frozen=True)
class IndexBounds:
    """Growth indices (delta, g0) of A' and (p_A, q_A) of A."""

    delta: float
    g0: float
    p_A: float
    q_A: float

    def __post_init__(self):
        if not (0.0 < self.delta <= self.g0 < np.inf):
            raise ValueError("need 0 < delta <= g0 < inf, got (%g, %g)" % (self.delta, self.g0))
        if not (1.0 < self.p_A <= self.q_A < np.inf):
            raise ValueError("need 1 < p_A <= q_A < inf, got (%g, %g)" % (self.p_A, self.q_A))


@dataclass(frozen=True)
class DoublingConstants:
    """Grid extremes of A(2t)/A(t); bracketed by 2^(delta+1) and 2^(g0+1)."""

    K_delta2: float
    K_nabla2: float


def default_grid(n_points: int = 1201, t_lo: float = 1e-6, t_hi: float = 1e6):
    """Log-spaced sampling grid used by the index and doubling estimators."""
    return np.geomspace(t_lo, t_hi, n_points)


# ----------------------------------------------------------------------------
# built-in families


def _power_callables(p):
    def value(t):
        t = np.asarray(t, dtype=float)
        return t**p / p

    def deriv1(t):
        t = np.asarray(t, dtype=float)
        return t ** (p - 1.0)

    def deriv2(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return (p - 1.0) * t ** (p - 2.0)

    return value, deriv1, deriv2


def _power_sum_callables(p, q):
    def value(t):
        t = np.asarray(t, dtype=float)
        return t**p / p + t**q / q

    def deriv1(t):
        t = np.asarray(t, dtype=float)
        return t ** (p - 1.0) + t ** (q - 1.0)

    def deriv2(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return (p - 1.0) * t ** (p - 2.0) + (q - 1.0) * t ** (q - 2.0)

    return value, deriv1, deriv2


def _sqrt_shift_callables(gamma):
    # w = sqrt(1+t^2) - 1 computed as t^2/(1+sqrt(1+t^2)): the naive form loses
    # half the mantissa at t ~ 1e-6, which is fatal for the doubling margins.
    def _parts(t):
        t = np.asarray(t, dtype=float)
        s = np.hypot(1.0, t)
        w = t * (t / (1.0 + s))
        return t, s, w

    def value(t):
        _, _, w = _parts(t)
        return w**gamma

    def deriv1(t):
        t, s, w = _parts(t)
        with np.errstate(invalid="ignore"):
            out = gamma * w ** (gamma - 1.0) * (t / s)
        return np.where(t == 0.0, 0.0, out)

    def deriv2(t):
        t, s, w = _parts(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = gamma * (gamma - 1.0) * w ** (gamma - 2.0) * (t / s) ** 2
            bend = gamma * w ** (gamma - 1.0) / s**3
            out = radial + bend
        # limit at 0 is 0 for gamma > 1 (A'' ~ t^(2 gamma - 2))
        return np.where(t == 0.0, 0.0, out)

    return value, deriv1, deriv2


class _CumulativeIntegral:
    """Antiderivative of a smooth positive derivative, accurate to ~1e-14 relative.

    Per-decade Gauss-Legendre panels over [t_lo, t_hi] are summed once; queries
    add a partial panel from the nearest knot.  Below t_lo the integrand is a
    near-power, so the local model int_0^t f = t f(t)/(theta(t)+1) with theta
    the local log-slope of f is used; above t_hi the same model anchors a
    monotone extension.
    """

    def __init__(self, deriv, log_slope, t_lo=1e-12, t_hi=1e12, per_decade=48, order=10):
        self.deriv = deriv
        self.log_slope = log_slope
        self.t_lo = t_lo
        self.t_hi = t_hi
        decades = np.log10(t_hi / t_lo)
        n_panels = int(np.ceil(decades * per_decade))
        self.knots = np.geomspace(t_lo, t_hi, n_panels + 1)
        x, w = np.polynomial.legendre.leggauss(order)
        self._x = 0.5 * (x + 1.0)  # nodes on [0, 1]
        self._w = 0.5 * w
        a = self.knots[:-1, None]
        b = self.knots[1:, None]
        pts = a + (b - a) * self._x[None, :]
        panel = ((b - a)[:, 0]) * (deriv(pts) @ self._w)
        self._tail0 = self._power_tail(t_lo)
        self.cum = self._tail0 + np.concatenate([[0.0], np.cumsum(panel)])

    def _power_tail(self, t):
        t = np.asarray(t, dtype=float)
        theta = self.log_slope(t)
        return t * self.deriv(t) / (theta + 1.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros(t.shape)
        low = t < self.t_lo
        high = t > self.t_hi
        mid = ~(low | high) & (t > 0)
        if np.any(low):
            tl = t[low]
            pos = tl > 0
            vals = np.zeros(tl.shape)
            vals[pos] = self._power_tail(tl[pos])
            out[low] = vals
        if np.any(mid):
            tm = t[mid]
            k = np.clip(np.searchsorted(self.knots, tm, side="right") - 1, 0, len(self.knots) - 2)
            a = self.knots[k]
            pts = a[:, None] + (tm - a)[:, None] * self._x[None, :]
            out[mid] = self.cum[k] + (tm - a) * (self.deriv(pts) @ self._w)
        if np.any(high):
            th = t[high]
            out[high] = self.cum[-1] + np.maximum(0.0, self._power_tail(th) - self._power_tail(self.t_hi))
        return out[0] if scalar else out


def _power_log_callables(p, q, sign):
    if sign > 0:
        # A'(t) = t^(p-1) * ln(1 + t^q)
        def deriv1(t):
            t = np.asarray(t, dtype=float)
            return t ** (p - 1.0) * np.log1p(t**q)

        def deriv2(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = (p - 1.0) * t ** (p - 2.0) * np.log1p(t**q) + q * t ** (p + q - 2.0) / (1.0 + t**q)
            return np.where(t == 0.0, 0.0, out)

        def log_slope(t):
            t = np.asarray(t, dtype=float)
            x = t**q
            return (p - 1.0) + q * x / ((1.0 + x) * np.log1p(x))

    else:
        # A'(t) = t^(p-1) / ln(1 + t)^q, needs p - q - 1 > 0
        def deriv1(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = t ** (p - 1.0) / np.log1p(t) ** q
            return np.where(t == 0.0, 0.0, out)

        def deriv2(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                L = np.log1p(t)
                out = (p - 1.0) * t ** (p - 2.0) / L**q - q * t ** (p - 1.0) / (L ** (q + 1.0) * (1.0 + t))
            return np.where(t == 0.0, 0.0, out)

        def log_slope(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = (p - 1.0) - q * t / ((1.0 + t) * np.log1p(t))
            return np.where(t == 0.0, p - 1.0 - q, out)

    table = _CumulativeIntegral(deriv1, log_slope)
    return table.__call__, deriv1, deriv2


def make_young(family: str, **params) -> YoungFunction:
    """Construct a built-in Young function.

    Families: power(p), power_sum(p, q), sqrt_shift(gamma),
    power_log(p, q, sign) given through its derivative
    A'(t) = t^(p-1) ln(1+t^q) for sign=+1 or A'(t) = t^(p-1)/ln(1+t)^q
    for sign=-1 (the latter needs p - q - 1 > 0).
    """
    if family == "power":
        p = float(params.pop("p"))
        if params:
            raise ValueError("unexpected parameters for power: %s" % sorted(params))
        if not p > 1.0:
            raise ValueError("power family needs p > 1, got p=%g" % p)
        v, d1, d2 = _power_callables(p)
        return YoungFunction(v, d1, d2, "power", {"p": p})
    if family == "power_sum":
        p = float(params.pop("p"))
        q = float(params.pop("q"))
        if params:
            raise ValueError("unexpected parameters for power_sum: %s" % sorted(params))
        if not (1.0 < q < p):
            raise ValueError("power_sum family needs 1 < q < p, got p=%g q=%g" % (p, q))
        v, d1, d2 = _power_sum_callables(p, q)
        return YoungFunction(v, d1, d2, "power_sum", {"p": p, "q": q})
    if family == "sqrt_shift":
        gamma = float(params.pop("gamma"))
        if params:
            raise ValueError("unexpected parameters for sqrt_shift: %s" % sorted(params))
        if not gamma > 1.0:
            raise ValueError("sqrt_shift family needs gamma > 1, got gamma=%g" % gamma)
        v, d1, d2 = _sqrt_shift_callables(gamma)
        return YoungFunction(v, d1, d2, "sqrt_shift", {"gamma": gamma})
    if family == "power_log":
        p = float(params.pop("p"))
        q = float(params.pop("q"))
        sign = params.pop("sign")
        if params:
            raise ValueError("unexpected parameters for power_log: %s" % sorted(params))
        sign = {"+": 1, "-": -1, 1: 1, -1: -1, 1.0: 1, -1.0: -1}.get(sign)
        if sign is None:
            raise ValueError("power_log sign must be '+' or '-'")
        if not q > 0.0:
            raise ValueError("power_log family needs q > 0, got q=%g" % q)
        if sign > 0 and not p > 1.0:
            raise ValueError("power_log(+) needs p > 1, got p=%g" % p)
        if sign < 0 and not p - q - 1.0 > 0.0:
            raise ValueError("power_log(-) needs p - q - 1 > 0, got p=%g q=%g" % (p, q))
        v, d1, d2 = _power_log_callables(p, q, sign)
        return YoungFunction(v, d1, d2, "power_log", {"p": p, "q": q, "sign": sign})
    raise ValueError("unknown family %r" % family)


# ----------------------------------------------------------------------------
# growth indices


def _tail_limit(t, qvals, end):
    """Linear extrapolation of the quotient's tail in x = 1/|ln t|.

    end is 0 (t -> 0 tail) or -1 (t -> inf tail); anchors are the grid
    endpoint and the sample nearest to e^2 inward of it.
    """
    logt = np.log(t)
    i1 = 0 if end == 0 else len(t) - 1
    target = logt[i1] + (2.0 if end == 0 else -2.0)
    i2 = int(np.argmin(np.abs(logt - target)))
    if i2 == i1:
        return qvals[i1]
    x1 = 1.0 / abs(logt[i1])
    x2 = 1.0 / abs(logt[i2])
    if x2 == x1 or not np.isfinite(x1) or not np.isfinite(x2):
        return qvals[i1]
    slope = (qvals[i2] - qvals[i1]) / (x2 - x1)
    return qvals[i1] - x1 * slope


def estimate_index_bounds(A: YoungFunction, grid=None) -> IndexBounds:
    """Estimate (delta, g0, p_A, q_A) from sampled quotients plus tail limits."""
    if grid is None:
        grid = default_grid()
    t = np.asarray(grid, dtype=float)
    t = np.sort(t)
    if len(t) < 200 or t[0] > 1e-6 or t[-1] < 1e6:
        raise ValueError("index grid must span at least [1e-6, 1e6] with >= 200 points")
    d1 = np.asarray(A.deriv1(t), dtype=float)
    d2 = np.asarray(A.deriv2(t), dtype=float)
    v = np.asarray(A.value(t), dtype=float)
    q2 = t * d2 / d1
    q1 = t * d1 / v
    if not (np.all(np.isfinite(q2)) and np.all(np.isfinite(q1))):
        raise ValueError("non-finite growth quotient on the sampling grid")

    def _bounds(qv):
        cands_lo = [float(np.min(qv))]
        cands_hi = [float(np.max(qv))]
        for end in (0, -1):
            lim = _tail_limit(t, qv, end)
            if np.isfinite(lim):
                cands_lo.append(float(lim))
                cands_hi.append(float(lim))
        return min(cands_lo), max(cands_hi)

    delta, g0 = _bounds(q2)
    p_A, q_A = _bounds(q1)
    return IndexBounds(delta=delta, g0=g0, p_A=p_A, q_A=q_A)


def doubling_constants(A: YoungFunction, grid=None) -> DoublingConstants:
    """Extremes of A(2t)/A(t) over the grid."""
    if grid is None:
        grid = default_grid()
    t = np.asarray(grid, dtype=float)
    num = np.asarray(A.value(2.0 * t), dtype=float)
    den = np.asarray(A.value(t), dtype=float)
    if np.any(den <= 0) or not np.all(np.isfinite(num / den)):
        raise ValueError("doubling ratio non-finite on the sampling grid")
    ratio = num / den
    return DoublingConstants(K_delta2=float(np.max(ratio)), K_nabla2=float(np.min(ratio)))


# ----------------------------------------------------------------------------
# conjugate (Legendre transform restricted to t >= 0)


@dataclass(frozen=True)
class ConjugateFunction:
    """Tabulated conjugate sup_t {s t - A(t)} with log-log interpolation."""

    s_grid: np.ndarray
    values: np.ndarray
    family_tag: str = "conjugate"

    def __post_init__(self):
        logs = np.log(self.s_grid)
        logv = np.log(self.values)
        interp = PchipInterpolator(logs, logv, extrapolate=False)
        object.__setattr__(self, "_interp", interp)
        object.__setattr__(self, "_slope_lo", (logv[1] - logv[0]) / (logs[1] - logs[0]))
        object.__setattr__(self, "_slope_hi", (logv[-1] - logv[-2]) / (logs[-1] - logs[-2]))

    def value(self, s):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        out = np.zeros(s.shape)
        pos = s > 0
        if np.any(pos):
            sp = s[pos]
            logs = np.log(sp)
            res = np.empty(sp.shape)
            lo = sp < self.s_grid[0]
            hi = sp > self.s_grid[-1]
            mid = ~(lo | hi)
            if np.any(mid):
                res[mid] = np.exp(self._interp(logs[mid]))
            if np.any(lo):
                res[lo] = np.exp(np.log(self.values[0]) + self._slope_lo * (logs[lo] - np.log(self.s_grid[0])))
            if np.any(hi):
                res[hi] = np.exp(np.log(self.values[-1]) + self._slope_hi * (logs[hi] - np.log(self.s_grid[-1])))
            out[pos] = res
        return out[0] if scalar else out


def conjugate(A, t_grid=None, s_grid=None) -> ConjugateFunction:
    """Tabulate the conjugate of A; ternary refinement to ~1e-12 in the maximizer.

    Raises if the sup is still climbing at the top of the t grid (grid too small
    for the requested s range).
    """
    if t_grid is None:
        t_grid = np.geomspace(1e-6, 1e6, 800)
    t = np.sort(np.asarray(t_grid, dtype=float))
    if s_grid is None:
        probe = np.geomspace(t[0] * 10.0, t[-1] / 10.0, 400)
        s_grid = np.asarray(A.deriv1(probe), dtype=float)
        s_grid = np.unique(s_grid[s_grid > 0])
    s = np.sort(np.asarray(s_grid, dtype=float))
    if np.any(s <= 0):
        raise ValueError("conjugate s grid must be positive")
    At = np.asarray(A.value(t), dtype=float)
    phi = s[:, None] * t[None, :] - At[None, :]
    k = np.argmax(phi, axis=1)
    if np.any(k == len(t) - 1):
        raise ValueError("conjugate sup not attained inside the t grid; enlarge t_grid")
    lo = np.where(k > 0, t[np.maximum(k - 1, 0)], 0.0)
    hi = t[k + 1]
    for _ in range(130):  # ternary search on a concave section function
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        f1 = s * m1 - np.asarray(A.value(m1), dtype=float)
        f2 = s * m2 - np.asarray(A.value(m2), dtype=float)
        take = f1 < f2
        lo = np.where(take, m1, lo)
        hi = np.where(take, hi, m2)
    tstar = 0.5 * (lo + hi)
    vals = np.maximum(s * tstar - np.asarray(A.value(tstar), dtype=float), 0.0)
    if np.any(vals <= 0):
        raise ValueError("conjugate tabulated non-positive; s grid reaches too low")
    return ConjugateFunction(s_grid=s, values=vals)


# ----------------------------------------------------------------------------
# Orlicz (Luxemburg) norm and the Holder inequality


def luxemburg_norm(u, A, tol: float = 1e-8) -> float:
    """inf { lam > 0 : int A(|u|/lam) <= 1 } by bisection (midpoint quadrature).

    u is a piecewise-linear field (anything with cell_averages() and a mesh
    with cell_volumes); A is anything with a vectorized value().
    """
    vals = np.abs(np.asarray(u.cell_averages(), dtype=float))
    vols = np.asarray(u.mesh.cell_volumes, dtype=float)
    vmax = float(vals.max(initial=0.0))
    if vmax <= 0.0:
        return 0.0

    def excess(lam):
        return float(np.dot(vols, np.asarray(A.value(vals / lam), dtype=float))) - 1.0

    lo = hi = vmax
    for _ in range(400):
        if excess(hi) <= 0.0:
            break
        hi *= 2.0
    else:
        raise ValueError("luxemburg bisection failed to bracket from above")
    for _ in range(2000):
        if excess(lo) >= 0.0:
            break
        lo /= 2.0
    else:
        return 0.0  # integral below 1 for every positive lam
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class HolderReport:
    lhs: float
    rhs: float
    passed: bool


def check_holder(u, v, A, Atilde, tol: float = 1e-8) -> HolderReport:
    """int |u v| <= 2 ||u||_A ||v||_Atilde, with a small slack for the numeric conjugate."""
    ua = np.asarray(u.cell_averages(), dtype=float)
    va = np.asarray(v.cell_averages(), dtype=float)
    vols = np.asarray(u.mesh.cell_volumes, dtype=float)
    lhs = float(np.dot(vols, np.abs(ua * va)))
    rhs = 2.0 * luxemburg_norm(u, A, tol=tol) * luxemburg_norm(v, Atilde, tol=tol)
    passed = lhs <= rhs * (1.0 + 1e-9) + 1e-300
    return HolderReport(lhs=lhs, rhs=rhs, passed=passed)
