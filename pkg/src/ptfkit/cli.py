"""Command-line experiment driver.

Every experiment is a subcommand (``ptfkit tails --poly sum:4:1/2 --t 2``)
and can also be run from a JSON config (``ptfkit run --config file``)::

    {"experiment": "tails", "seed": 0, "params": {"poly": "sum:4:1/2", "t": "2"}}

Reports are deterministic JSON.  Exit status: 0 on success, 2 when some
``holds`` field in the report is false, 1 on usage errors or exceeded caps.
"""

import argparse
from fractions import Fraction
import os
import sys

from ptfkit import __version__
from ptfkit.concentration import q_norm, tail_prob, tail_prob_grid
from ptfkit.errors import PtfkitError
from ptfkit.families import fn_from_spec, poly_from_spec
from ptfkit.fourier import (
    BooleanFn,
    influences_real,
    max_influence,
    restrict,
    to_rational,
)
from ptfkit.io import boolfn_from_json, dumps, jsonable, poly_from_json, read_json
from ptfkit.kwise import (
    equidistributed,
    fooling_error,
    generate_kwise,
    load_distribution,
    sandwich_certificate,
    save_distribution,
    verify_kwise,
)
from ptfkit.ptf import (
    aspnes_parity_error,
    best_ptf_agreement,
    is_ptf,
    lower_bound_audit,
    make_f2_poly,
)
from ptfkit.regularize import budget_sufficient, build_tree, greedy_restrict, ptf_influence_audit

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Bad arguments or config."""


# -- input parsing ----------------------------------------------------------------

def _load_poly(value, seed):
    if isinstance(value, dict):
        return poly_from_json(value)
    if str(value).endswith(".json") or os.path.exists(str(value)):
        return poly_from_json(read_json(value))
    return poly_from_spec(str(value), seed)


def _load_fn(value, seed):
    if isinstance(value, dict):
        return boolfn_from_json(value) if "hex" in value else BooleanFn.sign_of(poly_from_json(value))
    if str(value).endswith(".json") or os.path.exists(str(value)):
        data = read_json(value)
        return boolfn_from_json(data) if "hex" in data else BooleanFn.sign_of(poly_from_json(data))
    return fn_from_spec(str(value), seed)


def _number(value):
    if value is None:
        return None
    if isinstance(value, float):
        return to_rational(value)
    return Fraction(str(value))


def _require(params, *names):
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise UsageError(f"missing required parameter(s): {', '.join(missing)}")


# -- experiments -------------------------------------------------------------------

def exp_influence(params, seed, jobs):
    if params.get("poly") is not None:
        p = _load_poly(params["poly"], seed)
        norm = params.get("normalization") or "l2"
        value, var = max_influence(p, norm)
        return {"kind": "polynomial", "n": p.n, "normalization": norm,
                "influences": influences_real(p, norm), "max": {"value": value, "variable": var}}
    _require(params, "fn")
    h = _load_fn(params["fn"], seed)
    value, var = max_influence(h)
    return {"kind": "boolean", "n": h.n, "influences": h.influences(),
            "max": {"value": value, "variable": var}}


def exp_regularize(params, seed, jobs):
    _require(params, "poly", "delta")
    p = _load_poly(params["poly"], seed)
    report, _ = greedy_restrict(p, _number(params["delta"]), _number(params.get("alpha")))
    decreases = [s.s_after <= s.s_before - report.alpha * s.influence for s in report.steps]
    return {
        "report": report.to_json(),
        "s_trace": [report.steps[0].s_before] + [s.s_after for s in report.steps] if report.steps else [],
        "checks": {
            "final_inf": {"value": report.final_inf, "delta": report.delta,
                          "holds": report.final_inf <= report.delta},
            "steps": {"value": report.k, "bound": report.step_bound,
                      "holds": report.k <= report.step_bound},
            "potential_drop": {"per_step": decreases, "holds": all(decreases)},
        },
    }


def exp_tree(params, seed, jobs):
    _require(params, "poly", "delta", "eps")
    p = _load_poly(params["poly"], seed)
    budget = params.get("depth_budget")
    tree = build_tree(p, _number(params["delta"]), _number(params["eps"]),
                      p.n if budget is None else int(budget))
    tree.validate()
    delta = tree.params["delta"]
    closed_ok = all(
        _leaf_regular(p, leaf.assignment, delta) for leaf in tree.leaves() if not leaf.is_open)
    return {
        "tree": tree.to_json(),
        "depth": tree.depth,
        "leaves": len(tree.leaves()),
        "open_mass": tree.open_mass(),
        "budget_sufficient": budget_sufficient(tree),
        "closed_leaves": {"holds": bool(closed_ok)},
        "open_mass_within_eps": tree.open_mass() <= tree.params["eps"],
    }


def _leaf_regular(p, assignment, delta):
    r = restrict(p, assignment)
    return r.is_zero() or r.n == 0 or max_influence(r)[0] <= delta


def exp_tails(params, seed, jobs):
    _require(params, "poly")
    p = _load_poly(params["poly"], seed)
    normalize = bool(params.get("normalize", False))
    out = {}
    if params.get("t") is not None:
        out.update(tail_prob(p, _number(params["t"]), normalize=normalize))
    else:
        out["grid"] = tail_prob_grid(p, normalize=normalize)
    for q in params.get("moments") or []:
        out.setdefault("moments", []).append({"q": int(q), **q_norm(p, int(q))})
    return out


def exp_kwise_gen(params, seed, jobs):
    _require(params, "n", "k")
    K = generate_kwise(int(params["n"]), int(params["k"]), seed=seed,
                       m=params.get("field_m"), sample=bool(params.get("sample", False)))
    ok, violator, bias = verify_kwise(K, K.k)
    if params.get("dist_out"):
        save_distribution(params["dist_out"], K)
    out = {"n": K.n, "k": K.k, "m": K.m, "size": K.size, "construction": K.construction,
           "exact": K.exact, "violator": violator, "bias": bias}
    if K.exact:
        out["independence"] = {"holds": ok}
        if params.get("equidistribution"):
            out["equidistribution"] = {"holds": equidistributed(K, K.k)}
    else:
        out["independence"] = {"verified": ok}
    return out


def exp_kwise_verify(params, seed, jobs):
    _require(params, "dist")
    K = load_distribution(params["dist"])
    k = int(params.get("k") or K.k)
    ok, violator, bias = verify_kwise(K, k)
    return {"n": K.n, "k": k, "size": K.size, "violator": violator, "bias": bias,
            "independence": {"holds": ok}}


def _distribution(params, seed, n, k_default):
    if params.get("dist"):
        return load_distribution(params["dist"])
    k = int(params.get("k") or k_default)
    return generate_kwise(n, k, seed=seed)


def exp_kwise_fool(params, seed, jobs):
    _require(params, "fn")
    h = _load_fn(params["fn"], seed)
    K = _distribution(params, seed, h.n, params.get("k"))
    err = fooling_error(h, K)
    out = {"n": h.n, "k": K.k, "size": K.size, "error": err}
    if params.get("eps") is not None:
        eps = _number(params["eps"])
        out["check"] = {"eps": eps, "holds": err <= eps}
    return out


def _decomposition(params):
    from ptfkit.sandwich import LinearFormDecomposition, decomposition_from_spec

    dec = params["decomp"]
    c_C = float(params.get("c_C") or 3.0)
    if isinstance(dec, dict):
        return LinearFormDecomposition.from_json(dec)
    if str(dec).endswith(".json") or os.path.exists(str(dec)):
        return LinearFormDecomposition.from_json(read_json(dec))
    return decomposition_from_spec(str(dec), c_C)


def exp_sandwich_build(params, seed, jobs):
    from ptfkit.sandwich import build_threshold_sandwich, pair_to_files

    _require(params, "decomp", "eps")
    dec = _decomposition(params)
    eps = float(_number(params["eps"]))
    clip = params.get("clip") or "cube"
    if clip not in ("cube", "theory"):
        clip = float(clip)
    pair = build_threshold_sandwich(dec, eps, clip=clip)
    if params.get("pair_out"):
        pair_to_files(pair, params["pair_out"])
    return {
        "degree": pair.degree,
        "gap": pair.measured_gap,
        "diagnostics": pair.diagnostics,
        "sandwich": {"pointwise": pair.pointwise_verified,
                     "holds": bool(pair.pointwise_verified and pair.measured_gap <= eps)},
    }


def exp_sandwich_verify(params, seed, jobs):
    from ptfkit.sandwich import load_pair

    _require(params, "pair", "eps")
    pair = load_pair(params["pair"])
    if params.get("fn") is not None:
        h = _load_fn(params["fn"], seed)
    else:
        _require(params, "decomp")
        h = _decomposition(params).sign_function()
    K = _distribution(params, seed, h.n, max(pair.p_l.degree, pair.p_u.degree, 1))
    cert = sandwich_certificate(h, pair, K, float(_number(params["eps"])))
    cert["certificate"] = {"holds": cert["valid"]}
    return cert


def exp_ptf_check(params, seed, jobs):
    _require(params, "fn", "d")
    h = _load_fn(params["fn"], seed)
    res = is_ptf(h, int(params["d"]))
    return {"n": h.n, "d": int(params["d"]), **res}


def exp_best_approx(params, seed, jobs):
    _require(params, "fn", "d")
    g = _load_fn(params["fn"], seed)
    d = int(params["d"])
    res = best_ptf_agreement(g, d, jobs=jobs)
    out = {"n": g.n, "d": d, "agreement": res["agreement"], "distance": res["distance"],
           "h": res["h"], "witness": res["witness"]}
    if str(params["fn"]).startswith("parity"):
        out["parity_formula_agreement"] = 1 - aspnes_parity_error(g.n, d)
    return out


def exp_audit(params, seed, jobs):
    allow = bool(params.get("allow_zeros", False))
    if params.get("f2") is not None:
        _require(params, "n")
        h, report = make_f2_poly(params["f2"], int(params["n"]))
        return {"kind": "f2", "table": h, **report}
    _require(params, "poly")
    p = _load_poly(params["poly"], seed)
    if params.get("fn") is None:
        delta = _number(params.get("delta"))
        return {"kind": "influence-transfer", **ptf_influence_audit(p, delta, allow_zeros=allow)}
    _require(params, "delta", "eps")
    g = _load_fn(params["fn"], seed)
    budget = params.get("depth_budget")
    res = lower_bound_audit(g, p, _number(params["delta"]), _number(params["eps"]),
                            p.n if budget is None else int(budget), _number(params.get("tau")),
                            allow_zeros=allow)
    return {"kind": "lower-bound", **res}


# name -> (function, {param: (type, help)})
EXPERIMENTS = {
    "influence": (exp_influence, {
        "poly": ("str", "polynomial spec or JSON file"),
        "fn": ("str", "boolean function spec or JSON file"),
        "normalization": ("str", "l2 or variance"),
    }),
    "regularize": (exp_regularize, {
        "poly": ("str", "polynomial spec or JSON file"),
        "delta": ("num", "influence threshold"),
        "alpha": ("num", "potential parameter (default 1/(d-1))"),
    }),
    "tree": (exp_tree, {
        "poly": ("str", "polynomial spec or JSON file"),
        "delta": ("num", "influence threshold"),
        "eps": ("num", "open-mass target"),
        "depth_budget": ("int", "maximum depth (default n)"),
    }),
    "tails": (exp_tails, {
        "poly": ("str", "polynomial spec or JSON file"),
        "t": ("num", "threshold (omit for the full grid)"),
        "normalize": ("bool", "divide by the L2 norm first"),
        "moments": ("intlist", "even q values for hypercontractivity checks"),
    }),
    "kwise-gen": (exp_kwise_gen, {
        "n": ("int", "number of bits"),
        "k": ("int", "independence"),
        "field_m": ("int", "field exponent (default smallest)"),
        "sample": ("bool", "sample seed polynomials instead of enumerating"),
        "equidistribution": ("bool", "also check every <= k subset's patterns"),
        "dist_out": ("str", "write the distribution to this file"),
    }),
    "kwise-verify": (exp_kwise_verify, {
        "dist": ("str", "distribution file"),
        "k": ("int", "independence to verify (default the file's k)"),
    }),
    "kwise-fool": (exp_kwise_fool, {
        "fn": ("str", "boolean function spec or JSON file"),
        "dist": ("str", "distribution file (else generated)"),
        "k": ("int", "independence of the generated distribution"),
        "eps": ("num", "allowed fooling error"),
    }),
    "sandwich-build": (exp_sandwich_build, {
        "decomp": ("str", "decomposition spec (sum:n, maj-product:b) or JSON file"),
        "eps": ("num", "target gap"),
        "clip": ("str", "cube, theory or a number"),
        "c_C": ("num", "cube radius constant"),
        "pair_out": ("str", "file prefix for the pair"),
    }),
    "sandwich-verify": (exp_sandwich_verify, {
        "pair": ("str", "file prefix written by sandwich-build"),
        "fn": ("str", "target boolean function"),
        "decomp": ("str", "decomposition whose sign is the target"),
        "c_C": ("num", "cube radius constant"),
        "eps": ("num", "allowed gap and fooling error"),
        "dist": ("str", "distribution file (else generated)"),
        "k": ("int", "independence of the generated distribution"),
    }),
    "ptf-check": (exp_ptf_check, {
        "fn": ("str", "boolean function spec or JSON file"),
        "d": ("int", "degree"),
    }),
    "best-approx": (exp_best_approx, {
        "fn": ("str", "boolean function spec or JSON file"),
        "d": ("int", "degree"),
    }),
    "audit": (exp_audit, {
        "poly": ("str", "polynomial spec or JSON file"),
        "fn": ("str", "target g for the lower-bound audit"),
        "delta": ("num", "influence threshold"),
        "eps": ("num", "open-mass target"),
        "tau": ("num", "influence level for g"),
        "depth_budget": ("int", "tree depth budget"),
        "allow_zeros": ("bool", "map sgn(0) to +1 instead of refusing"),
        "f2": ("json", "GF(2) monomial list, e.g. [[1,2],[3]]"),
        "n": ("int", "number of bits for f2"),
    }),
}


def _coerce(kind, value):
    if value is None:
        return None
    if kind == "int":
        return int(value)
    if kind == "bool":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
    if kind == "intlist":
        if isinstance(value, str):
            return [int(v) for v in value.split(",") if v]
        return [int(v) for v in value]
    if kind == "json":
        import json

        return json.loads(value) if isinstance(value, str) else value
    if kind == "num":
        return value if isinstance(value, (int, float)) else str(value)
    return value


def run_experiment(name, params, seed=0, jobs=1):
    """Run one experiment and return ``(report dict, exit code)``."""
    if name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {name!r}")
    fn, schema = EXPERIMENTS[name]
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise UsageError(f"unknown parameter(s) for {name}: {', '.join(unknown)}")
    clean = {k: _coerce(schema[k][0], v) for k, v in params.items()}
    result = jsonable(fn(clean, seed, jobs))
    failed = _has_false_holds(result)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "ptfkit",
        "version": __version__,
        "experiment": name,
        "seed": seed,
        "params": jsonable({k: v for k, v in clean.items() if v is not None}),
        "result": result,
        "holds": not failed,
    }
    return report, (2 if failed else 0)


def _has_false_holds(obj):
    if isinstance(obj, dict):
        return any((k == "holds" and v is False) or _has_false_holds(v) for k, v in obj.items())
    if isinstance(obj, list):
        return any(_has_false_holds(v) for v in obj)
    return False


def load_config(path):
    data = read_json(path)
    if not isinstance(data, dict) or "experiment" not in data:
        raise UsageError("config must be an object with an 'experiment' field")
    if "seed" not in data:
        raise UsageError("config must fix a 'seed'")
    extra = set(data) - {"experiment", "seed", "params", "jobs"}
    if extra:
        raise UsageError(f"unknown config field(s): {', '.join(sorted(extra))}")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise UsageError("'params' must be an object")
    return data["experiment"], params, int(data["seed"]), int(data.get("jobs", 1))


# -- argument parsing ----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for random inputs")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--max-n", type=int, help="override the enumeration cap")
    parser = argparse.ArgumentParser(prog="ptfkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ptfkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run an experiment from a JSON config")
    run.add_argument("--config", required=True, help="config file")
    for name, (_, schema) in EXPERIMENTS.items():
        sp = sub.add_parser(name, parents=[common], help=f"{name} experiment")
        for param, (kind, text) in schema.items():
            flag = "--" + param.replace("_", "-")
            if kind == "bool":
                sp.add_argument(flag, dest=param, action="store_true", default=None, help=text)
            else:
                sp.add_argument(flag, dest=param, help=text)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.max_n is not None:
        os.environ["PTFKIT_MAX_N"] = str(args.max_n)
    try:
        if args.command == "run":
            name, params, seed, jobs = load_config(args.config)
            jobs = args.jobs if args.jobs != 1 else jobs
        else:
            name, seed, jobs = args.command, args.seed, args.jobs
            schema = EXPERIMENTS[name][1]
            params = {k: getattr(args, k) for k in schema if getattr(args, k) is not None}
        report, code = run_experiment(name, params, seed, jobs)
    except (UsageError, PtfkitError, ValueError, KeyError, OSError) as exc:
        print(f"ptfkit: error: {exc}", file=sys.stderr)
        return 1
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
