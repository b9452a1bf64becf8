"""Scenario configs, a pinned problem corpus, and the end-to-end runner.

A scenario is a JSON-able dict describing one Dirichlet problem: the Young
function, the domain and mesh width, the right-hand side f(x, s, xi) built
from a small grammar of named primitives, the ordered bracket, and the checks
to run on the result.  load_scenario validates strictly (unknown keys are
errors, reported with their path); run_scenario executes the solve plus the
requested checks and returns a deterministic, JSON-safe report dict.

The built-in corpus pins seven scenarios used throughout the tests: four
reaction/convection problems that between them exercise every built-in Young
family, two torsion problems, and a degenerate problem with a closed-form
nonsmooth solution.
"""

import copy
import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .youngfn import make_young, estimate_index_bounds, doubling_constants
from .operators import make_operator, verify_structure
from .discretize import (
    interval_mesh,
    rectangle_mesh,
    DiscreteField,
    constant_field,
    write_field_csv,
    _fmt,
)
from .solver import (
    ConvectionTerm,
    OneSidedGrowth,
    SubSuperPair,
    solve_problem,
    auxiliary_supersolution,
)
from .analysis import (
    check_hypothesis_H,
    check_growth_H,
    verify_subsolution,
    verify_supersolution,
    build_positivity_certificate,
    check_positivity_certificate,
    check_interior_sign,
)

__all__ = [
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "corpus_ids",
    "corpus_entry",
    "run_scenario",
]


class ScenarioError(ValueError):
    """Invalid scenario config; the message names the offending field path."""


def _check_keys(d, allowed, required, path):
    if not isinstance(d, dict):
        raise ScenarioError("expected a mapping at %s" % path)
    for key in d:
        if key not in allowed:
            raise ScenarioError("unknown key '%s' at %s" % (key, path))
    for key in required:
        if key not in d:
            raise ScenarioError("missing key '%s' at %s" % (key, path))


def _number(d, key, path, default=None, positive=False):
    if key not in d:
        if default is None:
            raise ScenarioError("missing key '%s' at %s" % (key, path))
        return default
    v = d[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
        raise ScenarioError("'%s' at %s must be a finite number" % (key, path))
    if positive and v <= 0:
        raise ScenarioError("'%s' at %s must be positive" % (key, path))
    return float(v)


# ----------------------------------------------------------------------------
# scalar functions of s

_SCALAR_KINDS = {
    "constant": {"value"},
    "poly": {"coeffs"},
    "abs": {"coeff"},
    "abs_power": {"coeff", "power"},
    "cos": {"scale"},
}


def _scalar_fn(spec, path):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScenarioError("expected a mapping with a 'kind' at %s" % path)
    kind = spec["kind"]
    if kind not in _SCALAR_KINDS:
        raise ScenarioError("unknown scalar kind '%s' at %s.kind" % (kind, path))
    _check_keys(spec, {"kind"} | _SCALAR_KINDS[kind], {"kind"}, path)
    if kind == "constant":
        v = _number(spec, "value", path)
        return lambda s: np.full(np.shape(s), v, dtype=float)
    if kind == "poly":
        coeffs = spec.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise ScenarioError("'coeffs' at %s must be a nonempty list" % path)
        c = np.asarray(coeffs, dtype=float)
        return lambda s: np.polynomial.polynomial.polyval(np.asarray(s, dtype=float), c)
    if kind == "abs":
        coeff = _number(spec, "coeff", path, default=1.0)
        return lambda s: coeff * np.abs(s)
    if kind == "abs_power":
        coeff = _number(spec, "coeff", path, default=1.0)
        power = _number(spec, "power", path, positive=True)
        return lambda s: coeff * np.abs(s) ** power
    scale = _number(spec, "scale", path, default=1.0)
    return lambda s: np.cos(scale * np.asarray(s, dtype=float))


def _scalar_sup(spec, lo, hi):
    """Exact (or safely rounded-up) sup of |g| over [lo, hi]."""
    kind = spec["kind"]
    if kind == "constant":
        return abs(float(spec["value"]))
    if kind == "poly":
        p = np.polynomial.Polynomial(np.asarray(spec["coeffs"], dtype=float))
        cand = [lo, hi]
        for r in p.deriv().roots():
            if abs(r.imag) < 1e-12 and lo <= r.real <= hi:
                cand.append(float(r.real))
        return float(np.max(np.abs(p(np.asarray(cand)))))
    if kind == "abs":
        return float(spec.get("coeff", 1.0)) * max(abs(lo), abs(hi))
    if kind == "abs_power":
        return float(spec.get("coeff", 1.0)) * max(abs(lo), abs(hi)) ** float(spec["power"])
    return 1.0  # cos: amplitude bound


# ----------------------------------------------------------------------------
# spatial functions of x

_SPATIAL_KINDS = {"constant": {"value"}, "coordinate": {"axis"}}


def _spatial_fn(spec, path, dim):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScenarioError("expected a mapping with a 'kind' at %s" % path)
    kind = spec["kind"]
    if kind not in _SPATIAL_KINDS:
        raise ScenarioError("unknown spatial kind '%s' at %s.kind" % (kind, path))
    _check_keys(spec, {"kind"} | _SPATIAL_KINDS[kind], {"kind"}, path)
    if kind == "constant":
        v = _number(spec, "value", path)
        return lambda x: np.full(np.shape(x)[0], v, dtype=float)
    axis = spec.get("axis", 0)
    if not isinstance(axis, int) or isinstance(axis, bool) or not (0 <= axis < dim):
        raise ScenarioError("'axis' at %s must be an integer in [0, %d)" % (path, dim))
    return lambda x: np.asarray(x, dtype=float)[:, axis]


# ----------------------------------------------------------------------------
# scenario schema

_CONVECTION_KINDS = {
    "reaction_convection": {"g", "h_of_x", "a"},
    "semilinear": {"rho", "g"},
    "constant": {"value"},
}

_TOP_KEYS = {"name", "young", "domain", "h", "convection", "bracket", "tolerances", "r_policy", "checks"}


@dataclass(frozen=True)
class Scenario:
    """A validated problem description; config is the normalized dict."""

    name: str
    config: dict


def load_scenario(source) -> Scenario:
    """Validate a scenario from a dict or a path to a JSON file."""
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as err:
                raise ScenarioError("not valid JSON: %s" % err) from err
    elif isinstance(source, dict):
        cfg = copy.deepcopy(source)
    else:
        raise TypeError("scenario source must be a dict or a path")

    _check_keys(cfg, _TOP_KEYS, {"young", "domain", "h", "convection", "bracket"}, "top level")
    name = cfg.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ScenarioError("'name' must be a nonempty string")

    young = cfg["young"]
    _check_keys(young, {"family", "p", "q", "gamma", "sign"}, {"family"}, "young")
    try:
        make_young(young["family"], **{k: v for k, v in young.items() if k != "family"})
    except (ValueError, TypeError) as err:
        raise ScenarioError("young: %s" % err) from err

    dom = cfg["domain"]
    _check_keys(dom, {"dim", "x", "y"}, {"dim", "x"}, "domain")
    dim = dom["dim"]
    if dim not in (1, 2):
        raise ScenarioError("'dim' at domain must be 1 or 2")
    for axis in ("x", "y") if dim == 2 else ("x",):
        if axis not in dom:
            raise ScenarioError("missing key '%s' at domain" % axis)
        box = dom[axis]
        if (not isinstance(box, list)) or len(box) != 2 or not box[0] < box[1]:
            raise ScenarioError("'%s' at domain must be [lo, hi] with lo < hi" % axis)
    if dim == 1 and "y" in dom:
        raise ScenarioError("unknown key 'y' at domain")

    _number(cfg, "h", "top level", positive=True)

    conv = cfg["convection"]
    _check_keys(conv, {"kind", "one_sided"} | set().union(*_CONVECTION_KINDS.values()), {"kind"}, "convection")
    kind = conv["kind"]
    if kind not in _CONVECTION_KINDS:
        raise ScenarioError("unknown convection kind '%s' at convection.kind" % kind)
    _check_keys(conv, {"kind", "one_sided"} | _CONVECTION_KINDS[kind], {"kind"}, "convection")
    if kind == "reaction_convection":
        if "g" not in conv:
            raise ScenarioError("missing key 'g' at convection")
        _scalar_fn(conv["g"], "convection.g")
        if "h_of_x" in conv:
            _spatial_fn(conv["h_of_x"], "convection.h_of_x", dim)
        a = _number(conv, "a", "convection", default=0.0)
        if a < 0:
            raise ScenarioError("'a' at convection must be >= 0")
    elif kind == "semilinear":
        _check_keys(conv, {"kind", "one_sided", "rho", "g"}, {"kind", "rho", "g"}, "convection")
        _spatial_fn(conv["rho"], "convection.rho", dim)
        _scalar_fn(conv["g"], "convection.g")
    else:
        _number(conv, "value", "convection")
    if "one_sided" in conv:
        one = conv["one_sided"]
        _check_keys(one, {"rho1", "rho2", "g1", "g2", "a_of_s", "s0", "k1"},
                    {"rho1", "rho2", "g1", "g2", "s0", "k1"}, "convection.one_sided")
        _spatial_fn(one["rho1"], "convection.one_sided.rho1", dim)
        _spatial_fn(one["rho2"], "convection.one_sided.rho2", dim)
        _scalar_fn(one["g1"], "convection.one_sided.g1")
        _scalar_fn(one["g2"], "convection.one_sided.g2")
        if "a_of_s" in one:
            _scalar_fn(one["a_of_s"], "convection.one_sided.a_of_s")
        _number(one, "s0", "convection.one_sided", positive=True)
        _number(one, "k1", "convection.one_sided", positive=True)

    br = cfg["bracket"]
    _check_keys(br, {"kind", "lower", "upper"}, {"kind"}, "bracket")
    if br["kind"] == "constants":
        lo = _number(br, "lower", "bracket")
        hi = _number(br, "upper", "bracket")
        if not (lo <= 0.0 <= hi):
            raise ScenarioError("bracket constants must satisfy lower <= 0 <= upper")
    elif br["kind"] == "auxiliary":
        _check_keys(br, {"kind"}, {"kind"}, "bracket")
        if "one_sided" not in conv:
            raise ScenarioError("bracket kind 'auxiliary' requires convection.one_sided")
    else:
        raise ScenarioError("unknown bracket kind '%s' at bracket.kind" % br["kind"])

    tol = cfg.setdefault("tolerances", {})
    _check_keys(tol, {"outer", "inner", "outer_max", "newton_max"}, set(), "tolerances")
    tol.setdefault("outer", 1e-8)
    tol.setdefault("inner", 1e-10)
    tol.setdefault("outer_max", 200)
    tol.setdefault("newton_max", 100)

    rp = cfg.setdefault("r_policy", {})
    _check_keys(rp, {"initial", "factor", "max_escalations"}, set(), "r_policy")
    rp.setdefault("initial", None)
    rp.setdefault("factor", 2.0)
    rp.setdefault("max_escalations", 10)

    checks = cfg.setdefault("checks", {})
    _check_keys(checks, {"growth", "sub_super", "hypothesis", "sign", "exact", "positivity", "structure"},
                set(), "checks")
    if "sign" in checks and checks["sign"] not in ("positive", "negative"):
        raise ScenarioError("'sign' at checks must be 'positive' or 'negative'")
    if "exact" in checks:
        ex = checks["exact"]
        _check_keys(ex, {"name", "tol"}, {"name", "tol"}, "checks.exact")
        if ex["name"] not in _EXACT_SOLUTIONS:
            raise ScenarioError("unknown exact solution '%s' at checks.exact.name" % ex["name"])
        _number(ex, "tol", "checks.exact", positive=True)
    if "positivity" in checks:
        pc = checks["positivity"]
        _check_keys(pc, {"k", "delta_bar"}, {"k"}, "checks.positivity")
        _number(pc, "k", "checks.positivity", positive=True)
    if "hypothesis" in checks and checks["hypothesis"] and "one_sided" not in conv:
        raise ScenarioError("checks.hypothesis requires convection.one_sided")

    cfg["name"] = name
    return Scenario(name=name, config=cfg)


# ----------------------------------------------------------------------------
# exact solutions (homogeneous Dirichlet on (-1, 1))

_EXACT_SOLUTIONS = {
    # -u'' = 1: the parabola
    "torsion_p2": lambda x: 0.5 * (1.0 - x[:, 0] ** 2),
    # -(|u'| u')' = 1: cube-root growth of the flux
    "plaplace_p3": lambda x: (2.0 / 3.0) * (1.0 - np.abs(x[:, 0]) ** 1.5),
}


# ----------------------------------------------------------------------------
# building blocks


def _build_young(cfg):
    spec = cfg["young"]
    return make_young(spec["family"], **{k: v for k, v in spec.items() if k != "family"})


def _build_mesh(cfg):
    dom = cfg["domain"]
    h = float(cfg["h"])
    if dom["dim"] == 1:
        return interval_mesh(dom["x"][0], dom["x"][1], h)
    return rectangle_mesh(dom["x"][0], dom["x"][1], dom["y"][0], dom["y"][1], h)


def _build_one_sided(conv, dim):
    spec = conv.get("one_sided")
    if spec is None:
        return None
    a_spec = spec.get("a_of_s", {"kind": "constant", "value": float(conv.get("a", 0.0))})
    return OneSidedGrowth(
        rho1=_spatial_fn(spec["rho1"], "one_sided.rho1", dim),
        rho2=_spatial_fn(spec["rho2"], "one_sided.rho2", dim),
        g1=_scalar_fn(spec["g1"], "one_sided.g1"),
        g2=_scalar_fn(spec["g2"], "one_sided.g2"),
        a_of_s=_scalar_fn(a_spec, "one_sided.a_of_s"),
        s0=float(spec["s0"]),
        k1=float(spec["k1"]),
    )


def _build_convection(cfg, A, dim, s_lo, s_hi, name):
    """Assemble the ConvectionTerm with its growth witness (sigma, a).

    sigma is derived from the config so that |f(x,s,xi)| <= sigma(x) +
    a A'(|xi|)|xi| holds for every |s| <= max(|s_lo|, |s_hi|) (the symmetric
    hull of the bracket, which is what the structure bound quantifies over),
    with the scalar sups computed exactly per primitive rather than sampled.
    """
    conv = cfg["convection"]
    kind = conv["kind"]
    one_sided = _build_one_sided(conv, dim)
    s_abs = max(abs(s_lo), abs(s_hi))
    s_lo, s_hi = -s_abs, s_abs

    if kind == "reaction_convection":
        g = _scalar_fn(conv["g"], "convection.g")
        hx = _spatial_fn(conv.get("h_of_x", {"kind": "constant", "value": 1.0}), "convection.h_of_x", dim)
        a = float(conv.get("a", 0.0))
        g_sup = _scalar_sup(conv["g"], s_lo, s_hi)

        def fn(x, s, xi):
            r = np.sqrt(np.sum(np.asarray(xi, dtype=float) ** 2, axis=-1))
            drift = np.zeros_like(r)
            pos = r > 0.0
            if np.any(pos):
                drift[pos] = np.asarray(A.deriv1(r[pos]), dtype=float) * r[pos]
            return g(s) * hx(x) + a * drift

        sigma = lambda x: g_sup * np.abs(hx(x))
        return ConvectionTerm(fn=fn, sigma=sigma, a=a, one_sided=one_sided, name=name)

    if kind == "semilinear":
        rho = _spatial_fn(conv["rho"], "convection.rho", dim)
        g = _scalar_fn(conv["g"], "convection.g")
        g_sup = _scalar_sup(conv["g"], s_lo, s_hi)
        fn = lambda x, s, xi: rho(x) + g(s)
        sigma = lambda x: np.abs(rho(x)) + g_sup
        return ConvectionTerm(fn=fn, sigma=sigma, a=0.0, one_sided=one_sided, name=name)

    value = float(conv["value"])
    fn = lambda x, s, xi: np.full(np.shape(s), value, dtype=float)
    sigma = lambda x: np.full(np.shape(x)[0], abs(value), dtype=float)
    return ConvectionTerm(fn=fn, sigma=sigma, a=0.0, one_sided=one_sided, name=name)


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError("cannot serialize %r" % type(obj))


def _write_plotdata(path, field):
    mesh = field.mesh
    g = field.node_gradients()
    gn = np.sqrt(np.sum(g * g, axis=1))
    cols = ["node_id", "x"] + (["y"] if mesh.dim == 2 else []) + ["u", "grad_norm"]
    lines = [",".join(cols)]
    for i in range(mesh.n_nodes):
        row = [str(i)] + [_fmt(c) for c in mesh.nodes[i]] + [_fmt(field.values[i]), _fmt(gn[i])]
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ----------------------------------------------------------------------------
# runner


def run_scenario(scenario: Scenario, out_dir: str = None) -> dict:
    """Solve the scenario's problem, run its checks, return the report dict.

    The report carries the solve diagnostics, one entry per requested check
    with explicit margins, a warnings list, and a top-level 'passed' that is
    true iff the solve converged and every requested check passed.  With
    out_dir set, writes report.json, field.csv and plotdata.csv there;
    identical runs produce byte-identical files.
    """
    cfg = scenario.config
    A = _build_young(cfg)
    bounds = estimate_index_bounds(A)
    mesh = _build_mesh(cfg)
    op = make_operator(A, mesh.dim, bounds=bounds)

    br = cfg["bracket"]
    if br["kind"] == "constants":
        pair = SubSuperPair(
            lower=constant_field(mesh, float(br["lower"])),
            upper=constant_field(mesh, float(br["upper"])),
        )
    else:
        one = _build_one_sided(cfg["convection"], mesh.dim)
        w = auxiliary_supersolution(op, one.rho1, one.g1, mesh)
        pair = SubSuperPair(lower=DiscreteField(mesh, -w.values), upper=w)
    s_lo = float(np.min(pair.lower.values))
    s_hi = float(np.max(pair.upper.values))

    f = _build_convection(cfg, A, mesh.dim, s_lo, s_hi, scenario.name)

    checks_cfg = cfg["checks"]
    checks = {}
    warnings_list = []

    if checks_cfg.get("hypothesis"):
        rep = check_hypothesis_H(f.one_sided, A, mesh)
        checks["hypothesis"] = {
            "k1": rep.k1, "k1_max": rep.k1_max, "growth_margin": rep.growth_margin,
            "conditions": rep.checks, "passed": rep.passed,
        }
    if checks_cfg.get("growth", True):
        rep = check_growth_H(f, pair, A)
        checks["growth"] = {"margin": rep.margin, "sigma_sup": rep.sigma_sup, "a": rep.a,
                            "n_samples": rep.n_samples, "passed": rep.passed}
    if checks_cfg.get("sub_super"):
        sub = verify_subsolution(pair.lower, f, op)
        sup = verify_supersolution(pair.upper, f, op)
        checks["subsolution"] = {"worst_residual": sub.worst_residual,
                                 "boundary_violation": sub.boundary_violation, "passed": sub.passed}
        checks["supersolution"] = {"worst_residual": sup.worst_residual,
                                   "boundary_violation": sup.boundary_violation, "passed": sup.passed}

    tol = cfg["tolerances"]
    rp = cfg["r_policy"]
    report = solve_problem(
        op, f, pair, mesh,
        outer_tol=tol["outer"], outer_max=tol["outer_max"],
        inner_tol=tol["inner"], newton_max=tol["newton_max"],
        r_initial=rp["initial"], r_factor=rp["factor"], max_escalations=rp["max_escalations"],
    )
    u = report.solution

    if checks_cfg.get("sign"):
        rep = check_interior_sign(u, checks_cfg["sign"])
        checks["sign"] = {"sign": rep.sign, "extreme": rep.extreme,
                          "n_violations": rep.n_violations, "passed": rep.passed}
    if checks_cfg.get("exact"):
        ex = checks_cfg["exact"]
        exact = _EXACT_SOLUTIONS[ex["name"]]
        node_err = float(np.max(np.abs(u.values - exact(mesh.nodes))))
        centroids = np.mean(mesh.nodes[mesh.cells], axis=1)
        u_cent = np.mean(u.values[mesh.cells], axis=1)
        cent_err = float(np.max(np.abs(u_cent - exact(centroids))))
        err = max(node_err, cent_err)
        checks["exact"] = {"name": ex["name"], "sup_error": err, "node_error": node_err,
                           "centroid_error": cent_err, "tol": ex["tol"], "passed": err <= ex["tol"]}
    if checks_cfg.get("structure", True):
        n = int(checks_cfg["structure"].get("samples", 2000)) if isinstance(checks_cfg.get("structure"), dict) else 2000
        rng = np.random.default_rng(0)
        mags = np.geomspace(1e-6, 1e3, n)
        dirs = rng.standard_normal((n, mesh.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        srep = verify_structure(op, dirs * mags[:, None], rng.standard_normal((n, mesh.dim)),
                                convection=f, M0=pair.sup_bound(), x=mesh.nodes)
        checks["structure"] = {"margins": srep.margins, "lambda": srep.lambda_struct,
                               "Lambda1": srep.Lambda1, "passed": srep.all_passed}
    if checks_cfg.get("positivity"):
        pc = checks_cfg["positivity"]
        K = doubling_constants(A).K_delta2
        cert = build_positivity_certificate(A, bounds, K=K, k=float(pc["k"]),
                                            delta_bar=pc.get("delta_bar"))
        rep = check_positivity_certificate(cert, A, bounds)
        checks["positivity"] = {"k": cert.k, "delta_bar": cert.delta_bar, "K": cert.K,
                                "h": cert.h, "b1": cert.b1, "margins": rep.margins,
                                "divergence_lower_bound": rep.divergence_lower_bound,
                                "passed": rep.passed}

    if u.sup_norm() < 1e-3:
        warnings_list.append("solution is numerically trivial (sup norm %.3g)" % u.sup_norm())
    if report.R_active:
        warnings_list.append("truncation radius still active at R = %.3g" % report.R)
    if report.bracket_active:
        warnings_list.append("final step was clamped by the bracket (magnitude %.3g)" % report.bracket_violation)

    out = {
        "name": scenario.name,
        "young": cfg["young"],
        "domain": cfg["domain"],
        "h": cfg["h"],
        "n_nodes": mesh.n_nodes,
        "n_cells": mesh.n_cells,
        "index_bounds": {"delta": bounds.delta, "g0": bounds.g0, "p_A": bounds.p_A, "q_A": bounds.q_A},
        "solve": {
            "converged": report.converged,
            "outer_iterations": report.outer_iterations,
            "final_residual": report.final_residual,
            "R": report.R,
            "max_gradient": report.max_gradient,
            "escalations": report.escalations,
            "bracket_violation": report.bracket_violation,
            "truncation_cap": report.truncation_cap,
            "max_load_seen": report.max_load_seen,
            "sup_norm": u.sup_norm(),
            "failure_reason": report.failure_reason,
        },
        "checks": checks,
        "warnings": warnings_list,
        "passed": bool(report.converged and all(c["passed"] for c in checks.values())),
    }
    out = _jsonify(out)

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
        write_field_csv(u, os.path.join(out_dir, "field.csv"))
        _write_plotdata(os.path.join(out_dir, "plotdata.csv"), u)
    return out


# ----------------------------------------------------------------------------
# corpus

_CORPUS = {
    "example-4.1": {
        "description": "cubic reaction times the coordinate plus full-strength "
                       "gradient drift, symmetric bracket; the zero function "
                       "solves it, so the run warns about triviality",
        "config": {
            "name": "example-4.1",
            "young": {"family": "power_sum", "p": 3.0, "q": 2.0},
            "domain": {"dim": 1, "x": [-1.0, 1.0]},
            "h": 0.015625,
            "convection": {
                "kind": "reaction_convection",
                "g": {"kind": "poly", "coeffs": [0.0, 1.0, 0.0, -1.0]},
                "h_of_x": {"kind": "coordinate", "axis": 0},
                "a": 1.0,
            },
            "bracket": {"kind": "constants", "lower": -1.0, "upper": 1.0},
            "checks": {"sub_super": True},
        },
    },
    "example-4.2": {
        "description": "decreasing reaction 1 - s with quarter-strength drift; "
                       "bracket [0, 1], solution strictly positive inside",
        "config": {
            "name": "example-4.2",
            "young": {"family": "power_sum", "p": 3.0, "q": 2.0},
            "domain": {"dim": 1, "x": [-1.0, 1.0]},
            "h": 0.015625,
            "convection": {
                "kind": "reaction_convection",
                "g": {"kind": "poly", "coeffs": [1.0, -1.0]},
                "a": 0.25,
            },
            "bracket": {"kind": "constants", "lower": 0.0, "upper": 1.0},
            "checks": {"sub_super": True, "sign": "positive"},
        },
    },
    "example-4.3": {
        "description": "cosine reaction with quarter-strength drift under the "
                       "logarithmically perturbed quadratic; positivity "
                       "certificate checked at unit scaling",
        "config": {
            "name": "example-4.3",
            "young": {"family": "power_log", "p": 2.0, "q": 1.0, "sign": 1},
            "domain": {"dim": 1, "x": [-1.0, 1.0]},
            "h": 0.015625,
            "convection": {
                "kind": "reaction_convection",
                "g": {"kind": "cos", "scale": 1.5707963267948966},
                "a": 0.25,
            },
            "bracket": {"kind": "constants", "lower": 0.0, "upper": 1.0},
            "checks": {"sub_super": True, "sign": "positive", "positivity": {"k": 1.0}},
        },
    },
    "example-4.4": {
        "description": "semilinear |s| - 1 under the log-damped cubic; "
                       "one-sided data drives the hypothesis check, bracket "
                       "[-1, 0], solution strictly negative inside",
        "config": {
            "name": "example-4.4",
            "young": {"family": "power_log", "p": 3.0, "q": 1.0, "sign": -1},
            "domain": {"dim": 1, "x": [-1.0, 1.0]},
            "h": 0.015625,
            "convection": {
                "kind": "semilinear",
                "rho": {"kind": "constant", "value": -1.0},
                "g": {"kind": "abs", "coeff": 1.0},
                "one_sided": {
                    "rho1": {"kind": "constant", "value": 1.0},
                    "rho2": {"kind": "constant", "value": 0.5},
                    "g1": {"kind": "poly", "coeffs": [0.0, 1.0]},
                    "g2": {"kind": "poly", "coeffs": [0.0, 1.0]},
                    "a_of_s": {"kind": "constant", "value": 0.0},
                    "s0": 20.0,
                    "k1": 0.9,
                },
            },
            "bracket": {"kind": "constants", "lower": -1.0, "upper": 0.0},
            "checks": {"sub_super": True, "sign": "negative", "hypothesis": True},
        },
    },
    "torsion-p2": {
        "description": "unit load on the interval with the quadratic; "
                       "closed-form parabola for error measurement",
        "config": {
            "name": "torsion-p2",
            "young": {"family": "power", "p": 2.0},
            "domain": {"dim": 1, "x": [-1.0, 1.0]},
            "h": 0.015625,
            "convection": {"kind": "constant", "value": 1.0},
            "bracket": {"kind": "constants", "lower": 0.0, "upper": 1.0},
            "checks": {"sign": "positive", "exact": {"name": "torsion_p2", "tol": 1e-3}},
        },
    },
    "torsion-p3": {
        "description": "unit load on the unit square with the cubic; "
                       "degenerate diffusion in two dimensions",
        "config": {
            "name": "torsion-p3",
            "young": {"family": "power", "p": 3.0},
            "domain": {"dim": 2, "x": [0.0, 1.0], "y": [0.0, 1.0]},
            "h": 0.125,
            "convection": {"kind": "constant", "value": 1.0},
            "bracket": {"kind": "constants", "lower": 0.0, "upper": 1.0},
            "checks": {"sign": "positive"},
        },
    },
    "plaplace-exact": {
        "description": "unit load on the interval with the cubic; the exact "
                       "solution has cube-root flux and a gradient kink at 0",
        "config": {
            "name": "plaplace-exact",
            "young": {"family": "power", "p": 3.0},
            "domain": {"dim": 1, "x": [-1.0, 1.0]},
            "h": 0.0078125,
            "convection": {"kind": "constant", "value": 1.0},
            "bracket": {"kind": "constants", "lower": 0.0, "upper": 1.0},
            "checks": {"sign": "positive", "exact": {"name": "plaplace_p3", "tol": 5e-3}},
        },
    },
}


def corpus_ids():
    return list(_CORPUS)


def corpus_entry(entry_id: str) -> dict:
    if entry_id not in _CORPUS:
        raise KeyError("unknown corpus id %r; known: %s" % (entry_id, ", ".join(_CORPUS)))
    entry = copy.deepcopy(_CORPUS[entry_id])
    entry["id"] = entry_id
    return entry
