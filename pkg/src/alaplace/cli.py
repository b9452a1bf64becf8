"""Command line front end.

Verbs:
  run CONFIG...            solve scenario files, optionally writing artifacts
  corpus list              show the built-in scenarios
  corpus run ID            solve a built-in scenario, with optional overrides
  check young CONFIG       estimate index and doubling constants
  check structure CONFIG   sample the ellipticity and growth margins

Exit status is 0 only if every requested solve converged and every requested
check passed.  Report artifacts are deterministic: the same invocation
produces byte-identical files.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .youngfn import make_young, estimate_index_bounds, doubling_constants
from .operators import make_operator, verify_structure
from .scenario import Scenario, ScenarioError, load_scenario, corpus_ids, corpus_entry, run_scenario

__all__ = ["main"]


def _merge(base: dict, override: dict) -> None:
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            _merge(base[key], val)
        else:
            base[key] = val


def _print_result(report: dict) -> None:
    tag = "PASS" if report["passed"] else "FAIL"
    solve = report["solve"]
    print("[%s] %s  converged=%s outer=%d residual=%.3g sup_norm=%.3g"
          % (tag, report["name"], solve["converged"], solve["outer_iterations"],
             solve["final_residual"], solve["sup_norm"]))
    for name, chk in sorted(report["checks"].items()):
        print("       check %-12s %s" % (name, "ok" if chk["passed"] else "FAILED"))
    for w in report["warnings"]:
        print("       warning: %s" % w)
    if solve["failure_reason"]:
        print("       failure: %s" % solve["failure_reason"])


def _run_one(source, out_dir):
    scenario = load_scenario(source)
    sub_dir = None if out_dir is None else "%s/%s" % (out_dir, scenario.name)
    return run_scenario(scenario, out_dir=sub_dir)


def _cmd_run(args) -> int:
    if args.jobs > 1 and len(args.config) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(lambda c: _run_one(c, args.out), args.config))
    else:
        reports = [_run_one(c, args.out) for c in args.config]
    for report in reports:
        _print_result(report)
    return 0 if all(r["passed"] for r in reports) else 1


def _cmd_corpus(args) -> int:
    if args.corpus_cmd == "list":
        for cid in corpus_ids():
            print("%-16s %s" % (cid, corpus_entry(cid)["description"]))
        return 0
    entry = corpus_entry(args.id)
    cfg = entry["config"]
    if args.overrides:
        with open(args.overrides) as fh:
            _merge(cfg, json.load(fh))
    if args.h is not None:
        cfg["h"] = args.h
    report = _run_one(cfg, args.out)
    _print_result(report)
    return 0 if report["passed"] else 1


def _load_young_section(path):
    with open(path) as fh:
        cfg = json.load(fh)
    spec = cfg.get("young", cfg)
    if "family" not in spec:
        raise ScenarioError("config has no young function section")
    A = make_young(spec["family"], **{k: v for k, v in spec.items() if k != "family"})
    return cfg, spec, A


def _cmd_check_young(args) -> int:
    _, spec, A = _load_young_section(args.config)
    bounds = estimate_index_bounds(A)
    K = doubling_constants(A)
    print("family      %s" % spec["family"])
    print("params      %s" % json.dumps({k: v for k, v in spec.items() if k != "family"}, sort_keys=True))
    print("delta       %.12g" % bounds.delta)
    print("g0          %.12g" % bounds.g0)
    print("p_A         %.12g" % bounds.p_A)
    print("q_A         %.12g" % bounds.q_A)
    print("K_delta2    %.12g" % K.K_delta2)
    print("K_nabla2    %.12g" % K.K_nabla2)
    # the cross relations hold exactly for the true indices; the estimates carry
    # slow-tail error of a few 1e-3, so the consistency gate allows that much
    ok = (bounds.delta + 1.0 <= bounds.p_A + 5e-3 and bounds.q_A <= bounds.g0 + 1.0 + 5e-3
          and K.K_delta2 >= 2.0 ** (bounds.delta + 1.0) - 1e-3
          and K.K_nabla2 <= 2.0 ** (bounds.g0 + 1.0) + 1e-3)
    print("consistency %s" % ("ok" if ok else "FAILED"))
    return 0 if ok else 1


def _cmd_check_structure(args) -> int:
    cfg, _, A = _load_young_section(args.config)
    dim = cfg.get("domain", {}).get("dim", 1)
    op = make_operator(A, dim)
    n = args.samples
    rng = np.random.default_rng(0)
    mags = np.geomspace(1e-6, 1e3, n)
    dirs = rng.standard_normal((n, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rep = verify_structure(op, dirs * mags[:, None], rng.standard_normal((n, dim)))
    for name, margin in sorted(rep.margins.items()):
        shown = "vacuous" if margin is None else "%.3g" % margin
        print("margin %-4s %s" % (name, shown))
    print("lambda      %.12g" % rep.lambda_struct)
    print("result      %s" % ("ok" if rep.all_passed else "FAILED"))
    return 0 if rep.all_passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="alaplace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="solve scenario config files")
    p_run.add_argument("config", nargs="+", help="scenario JSON files")
    p_run.add_argument("--out", default=None, help="directory for per-scenario artifacts")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel scenario solves")

    p_corpus = sub.add_parser("corpus", help="built-in scenarios")
    corpus_sub = p_corpus.add_subparsers(dest="corpus_cmd", required=True)
    corpus_sub.add_parser("list", help="list corpus ids")
    p_crun = corpus_sub.add_parser("run", help="solve one corpus scenario")
    p_crun.add_argument("id", choices=corpus_ids())
    p_crun.add_argument("--h", type=float, default=None, help="override mesh width")
    p_crun.add_argument("--overrides", default=None, help="JSON file merged over the config")
    p_crun.add_argument("--out", default=None, help="directory for artifacts")

    p_check = sub.add_parser("check", help="standalone verifications")
    check_sub = p_check.add_subparsers(dest="check_cmd", required=True)
    p_young = check_sub.add_parser("young", help="index and doubling constants")
    p_young.add_argument("config", help="scenario JSON, or a bare young section")
    p_struct = check_sub.add_parser("structure", help="ellipticity and growth margins")
    p_struct.add_argument("config", help="scenario JSON, or a bare young section")
    p_struct.add_argument("--samples", type=int, default=2000)

    args = parser.parse_args(argv)
    try:
        if args.cmd == "run":
            return _cmd_run(args)
        if args.cmd == "corpus":
            return _cmd_corpus(args)
        if args.check_cmd == "young":
            return _cmd_check_young(args)
        return _cmd_check_structure(args)
    except (ScenarioError, FileNotFoundError, KeyError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
