"""Young function families, index estimation, duality, and norms.

Oracle values here are closed forms: for A(t) = t^p/p the indices are all
p - 1 or p, the doubling ratio is exactly 2^p, and the conjugate is
s^{p'}/p' with 1/p + 1/p' = 1.  The estimator and the tabulated conjugate
are held to those numbers, not to themselves.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import alaplace as al
from alaplace.youngfn import YoungFunction

FAMILIES = [
    ("power", dict(p=3.0)),
    ("power_sum", dict(p=3.0, q=2.0)),
    ("sqrt_shift", dict(gamma=1.5)),
    ("power_log", dict(p=2.0, q=1.0, sign=1)),
    ("power_log", dict(p=3.0, q=1.0, sign=-1)),
]


@pytest.fixture(scope="module", params=FAMILIES, ids=lambda f: "%s-%s" % (f[0], sorted(f[1].items())))
def family(request):
    fam, kw = request.param
    return al.make_young(fam, **kw)


def test_value_matches_integral_of_deriv1(family):
    # trapezoid on a fine grid against the reported antiderivative
    t = np.linspace(1e-6, 5.0, 20001)
    d = np.asarray(family.deriv1(t), dtype=float)
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(t))])
    vals = np.asarray(family.value(t), dtype=float) - float(family.value(t[0]))
    assert np.max(np.abs(vals - integral)) < 5e-7 * max(1.0, vals[-1])


def test_deriv2_matches_fd_of_deriv1(family):
    for t in [1e-3, 0.1, 1.0, 7.0, 50.0]:
        h = 1e-6 * t
        fd = (family.deriv1(t + h) - family.deriv1(t - h)) / (2 * h)
        assert abs(fd - family.deriv2(t)) <= 1e-5 * max(1.0, abs(fd))


def test_zero_and_positivity(family):
    assert family.value(0.0) == 0.0
    t = np.geomspace(1e-8, 1e6, 100)
    assert np.all(np.asarray(family.value(t), dtype=float) > 0.0)
    assert np.all(np.asarray(family.deriv1(t), dtype=float) > 0.0)
    assert np.all(np.asarray(family.deriv2(t), dtype=float) > 0.0)


INDEX_ORACLES = [
    # family, params, delta, g0, p_A, q_A (closed forms)
    ("power", dict(p=2.0), 1.0, 1.0, 2.0, 2.0),
    ("power", dict(p=3.0), 2.0, 2.0, 3.0, 3.0),
    ("power_sum", dict(p=3.0, q=2.0), 1.0, 2.0, 2.0, 3.0),
    ("power_log", dict(p=2.0, q=1.0, sign=1), 1.0, 2.0, 2.0, 3.0),
    ("power_log", dict(p=3.0, q=1.0, sign=-1), 1.0, 2.0, 2.0, 3.0),
    ("sqrt_shift", dict(gamma=1.5), 0.5, 2.0, 1.5, 3.0),
]


@pytest.mark.parametrize("fam,kw,delta,g0,p_A,q_A", INDEX_ORACLES)
def test_index_bounds_against_closed_forms(fam, kw, delta, g0, p_A, q_A):
    A = al.make_young(fam, **kw)
    b = al.estimate_index_bounds(A)
    assert abs(b.delta - delta) < 1e-3
    assert abs(b.g0 - g0) < 1e-3
    assert abs(b.p_A - p_A) < 5e-3
    assert abs(b.q_A - q_A) < 5e-3
    # the sandwich holds with estimation slack
    assert b.delta + 1.0 <= b.p_A + 5e-3
    assert b.q_A <= b.g0 + 1.0 + 5e-3


def test_doubling_constants_power():
    A = al.make_young("power", p=3.0)
    K = al.doubling_constants(A)
    assert abs(K.K_delta2 - 8.0) < 1e-9
    assert abs(K.K_nabla2 - 8.0) < 1e-9


def test_doubling_within_index_brackets(family):
    b = al.estimate_index_bounds(family)
    K = al.doubling_constants(family)
    lo = 2.0 ** (b.delta + 1.0)
    hi = 2.0 ** (b.g0 + 1.0)
    assert (K.K_nabla2 - lo) / lo >= -1e-9
    assert (hi - K.K_delta2) / hi >= -1e-9


def test_make_young_rejects_bad_parameters():
    with pytest.raises(ValueError):
        al.make_young("power", p=1.0)
    with pytest.raises(ValueError):
        al.make_young("power_sum", p=2.0, q=2.0)
    with pytest.raises(ValueError):
        al.make_young("sqrt_shift", gamma=1.0)
    with pytest.raises(ValueError):
        al.make_young("power_log", p=2.0, q=1.5, sign=-1)  # needs p - q - 1 > 0
    with pytest.raises(ValueError):
        al.make_young("power_log", p=2.0, q=1.0, sign=0)
    with pytest.raises(ValueError):
        al.make_young("nosuch")
    with pytest.raises(ValueError):
        al.make_young("power", p=2.0, gamma=3.0)


def test_custom_young_validation():
    with pytest.raises(ValueError):
        YoungFunction(value=lambda t: np.asarray(t) + 1.0,
                      deriv1=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                      deriv2=lambda t: np.zeros_like(np.asarray(t, dtype=float)))


# ----------------------------------------------------------------------------
# conjugate and norms

_A3 = al.make_young("power", p=3.0)
_A3_CONJ = al.conjugate(_A3)


def test_conjugate_power_closed_form():
    s = np.geomspace(1e-3, 1e3, 50)
    exact = s ** 1.5 / 1.5
    rel = np.abs(_A3_CONJ.value(s) - exact) / exact
    assert np.max(rel) < 1e-6


def test_conjugate_at_zero():
    assert _A3_CONJ.value(0.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3))
def test_young_inequality_property(s, t):
    # s t <= A(t) + conj(s), the defining inequality of the conjugate
    lhs = s * t
    rhs = float(_A3.value(t)) + float(_A3_CONJ.value(s))
    assert lhs <= rhs * (1.0 + 1e-9) + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e5))
def test_power_sum_doubling_property(t):
    A = al.make_young("power_sum", p=3.0, q=2.0)
    ratio = float(A.value(2.0 * t)) / float(A.value(t))
    assert 4.0 * (1.0 - 1e-12) <= ratio <= 8.0 * (1.0 + 1e-12)


def test_conjugate_raises_when_sup_escapes():
    A = al.make_young("power", p=2.0)
    # slopes above A'(t_hi) push the sup past the top grid edge
    with pytest.raises(ValueError):
        al.conjugate(A, s_grid=np.array([1e9]))


def test_luxemburg_norm_constant_field():
    mesh = al.interval_mesh(-1.0, 1.0, 0.03125)
    u = al.constant_field(mesh, 0.7)
    # solve 2 A(0.7/k) = 1 for A(t) = t^3/3: k = 0.7 / 1.5^{1/3}
    exact = 0.7 / 1.5 ** (1.0 / 3.0)
    assert abs(al.luxemburg_norm(u, _A3) - exact) < 1e-7


def test_luxemburg_norm_zero_field():
    mesh = al.interval_mesh(-1.0, 1.0, 0.25)
    assert al.luxemburg_norm(al.constant_field(mesh, 0.0), _A3) == 0.0


def test_holder_inequality_random_fields():
    mesh = al.interval_mesh(-1.0, 1.0, 0.0625)
    rng = np.random.default_rng(7)
    for _ in range(20):
        u = al.DiscreteField(mesh, rng.uniform(-2, 2, mesh.n_nodes))
        v = al.DiscreteField(mesh, rng.uniform(-2, 2, mesh.n_nodes))
        rep = al.check_holder(u, v, _A3, _A3_CONJ)
        assert rep.passed, (rep.lhs, rep.rhs)


def test_holder_equality_edge():
    # constants with the quadratic attain the factor-2 bound exactly
    A2 = al.make_young("power", p=2.0)
    A2c = al.conjugate(A2)
    mesh = al.interval_mesh(-1.0, 1.0, 0.125)
    u = al.constant_field(mesh, 1.0)
    rep = al.check_holder(u, u, A2, A2c)
    assert rep.passed
    assert rep.lhs <= rep.rhs * (1.0 + 1e-9)
