"""Command-line front end.

Exit codes: 0 when the checked statement holds, 1 for a negative result
(the report carries the witness), 2 for bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import __version__
from .abelian import CircleValue
from .cocycle import (Cocycle, cl_solve, cl_to_type2_witness, ergodicity_test, extension_build,
                      mackey_reduce, type_test)
from .errors import ClabError, ConsistencyError, NegativeResult, SizeGuardError
from .examples import FAILED, bundle_by_name, example_tdK, match_bundle, verify_paper_claims
from .hostkra import host_kra_group, structure_report, translational_certificate
from .randomized import make_rng, random_observable
from .system import FiniteSystem, ergodic_components, gowers_norm, hkz_factor, kronecker_factor
from . import torus

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, (CircleValue, complex)):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2, default=_default) + "\n"


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".clab-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_cocycle(path, validate=True):
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise InputError("cocycle file must hold a JSON object")
    obj = obj.get("cocycle", obj)
    if validate:
        return Cocycle.from_json(obj)
    try:
        from .abelian import FinAbGroup
        base = FiniteSystem.from_json(obj["base"])
        K = FinAbGroup(tuple(obj["fiber"]["cyclic"]))
        circle = bool(obj["fiber"].get("circle", False))
        tables = _parse_tables(K, circle, obj["tables"], base)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed cocycle JSON: {exc}") from exc
    return Cocycle(base, K, tables, circle=circle, validate=False)


def _parse_tables(K, circle, tables, base):
    from .cocycle import _as_residues
    arr = np.array([[_as_residues(K, circle, v) for v in row] for row in tables], dtype=np.int64)
    if arr.shape[:2] != (base.gamma.rank, base.m):
        raise InputError(f"tables have shape {arr.shape[:2]}, expected {(base.gamma.rank, base.m)}")
    return arr


def _load_system(path):
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise InputError("system file must hold a JSON object")
    if "system" in obj:
        return FiniteSystem.from_json(obj["system"]), obj
    if isinstance(obj.get("cocycle"), dict):
        return extension_build(Cocycle.from_json(obj["cocycle"])), obj
    if "base" in obj and "tables" in obj:
        return extension_build(Cocycle.from_json(obj)), obj
    return FiniteSystem.from_json(obj), obj


# commands

def cmd_check(args):
    rho = _load_cocycle(args.input, validate=False)
    rep = {"command": "check", "claim_ids": ["cocycle"], "points": rho.base.m}
    try:
        rho.check()
    except ConsistencyError as exc:
        rep.update(consistent=False, error=str(exc), witness=exc.witness)
        return EXIT_NEGATIVE, rep
    rep["consistent"] = True
    return EXIT_OK, rep


def cmd_type(args):
    rho = _load_cocycle(args.input)
    rep = {"command": "type", "k": args.k, "claim_ids": [f"type.{args.k}"] + (["rho.ii"] if args.k == 2 else [])}
    try:
        F = type_test(rho, args.k)
    except NegativeResult as exc:
        rep.update(type_k=False, error=str(exc), witness=exc.witness)
        return EXIT_NEGATIVE, rep
    rep.update(type_k=True, witness_zero=bool(F.is_zero()), F=F.to_json())
    return EXIT_OK, rep


def cmd_cl_solve(args):
    rho = _load_cocycle(args.input)
    rep = {"command": "cl-solve", "claim_ids": ["rho.iii"]}
    try:
        w = cl_solve(rho)
    except NegativeResult as exc:
        rep.update(cl=False, error=str(exc), witness=exc.witness)
        return EXIT_NEGATIVE, rep
    F2 = cl_to_type2_witness(rho, w)
    rep.update(cl=True, witness=w.to_json(), type2_certificate=F2.to_json())
    return EXIT_OK, rep


def cmd_ergodic(args):
    rho = _load_cocycle(args.input)
    erg, cert = ergodicity_test(rho)
    rep = {"command": "ergodic", "claim_ids": ["rho.i"], **cert}
    return (EXIT_OK if erg else EXIT_NEGATIVE), rep


def cmd_mackey(args):
    rho = _load_cocycle(args.input)
    comps = ergodic_components(extension_build(rho))
    if not 0 <= args.component < len(comps):
        raise InputError(f"component must be in 0..{len(comps) - 1}")
    res = mackey_reduce(rho, comps[args.component])
    rep = {"command": "mackey", "claim_ids": ["rho.i", "mackey"], "components": len(comps),
           "component": args.component, "component_size": comps[args.component].m, **res.to_json()}
    return EXIT_OK, rep


def cmd_hk_group(args):
    rho = _load_cocycle(args.input)
    G = host_kra_group(rho)
    rep = {"command": "hk-group", "claim_ids": ["hk.order", "hk.commutator", "paper_law"], **structure_report(G)}
    b = match_bundle(rho)
    if b is not None and b.law_check is not None:
        law = b.law_check(G)
        rep["paper_law_check"] = {"example": b.name, "match": law["match"], "discrepancies": law["discrepancies"],
                                  "generic_verified": law["generic_verified"]}
    else:
        rep["paper_law_check"] = {"match": None, "discrepancies": [], "note": "no displayed law for this cocycle"}
    X = extension_build(rho)
    try:
        cert = translational_certificate(G, X, args.x0)
    except NegativeResult as exc:
        rep.update(translational=False, lambda_order=None, certificates={}, error=str(exc), witness=exc.witness)
        return EXIT_NEGATIVE, rep
    rep.update(translational=True, lambda_order=cert.report["lambda_order"], certificates={"translational": cert.report})
    return EXIT_OK, rep


def cmd_factors(args):
    X, _ = _load_system(args.input)
    P = hkz_factor(X, args.k)
    rep = {"command": "factors", "k": args.k, "claim_ids": [f"hkz.{args.k}"] + (["kroncalc"] if args.k == 1 else []),
           "blocks": P.block_of.tolist(), "n_blocks": P.n_blocks}
    if args.k == 1:
        chars, K = kronecker_factor(X)
        rep["kronecker_blocks"] = K.block_of.tolist()
        rep["agree"] = K == P
        if not rep["agree"]:
            return EXIT_NEGATIVE, rep
    return EXIT_OK, rep


def cmd_gowers(args):
    X, obj = _load_system(args.input)
    if "f" in obj:
        f = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in obj["f"]])
        if len(f) != X.m:
            raise InputError(f"f has {len(f)} values for {X.m} points")
        source = "file"
    else:
        f = random_observable(make_rng(args.seed), X)
        source = f"random(seed={args.seed})"
    norm = gowers_norm(X, f, args.k)
    rep = {"command": "gowers", "k": args.k, "claim_ids": ["gowers.characteristic"], "norm": float(norm),
           "f_source": source, "tol": args.tol}
    if args.k >= 1:
        P = hkz_factor(X, args.k - 1)
        ce = P.conditional_expectation(f)
        mass = float(np.max(np.abs(ce[X.positive]))) if X.positive.any() else 0.0
        rep["factor_projection_max"] = mass
        rep["characteristic_agrees"] = (norm < args.tol) == (mass < args.tol)
        if not rep["characteristic_agrees"]:
            return EXIT_NEGATIVE, rep
    return EXIT_OK, rep


def cmd_example(args):
    b = bundle_by_name(args.name, n=args.n, p=args.p)
    rep = {"command": "example", "example": b.name, "params": b.params,
           "cocycle": b.rho.to_json(), "expected": b.expected}
    code = EXIT_OK
    if args.verify:
        res = verify_paper_claims(b)
        rep.update(claim_ids=res["claim_ids"], claims=res["claims"])
        if any(c.get("status") == FAILED for c in res["claims"].values()):
            code = EXIT_NEGATIVE
    else:
        rep["claim_ids"] = []
    return code, rep


def cmd_torus(args):
    params = torus.TorusParams(args.alpha if args.alpha is not None else torus.DEFAULT_ALPHA,
                               args.beta if args.beta is not None else torus.DEFAULT_BETA)
    tol = args.tol
    if args.which == "skew":
        ids = [torus.verify_identity(k, params, args.samples, tol if tol else 1e-9, seed=args.seed)
               for k in ("cocycle-eq", "type-2", "cl")]
        weyl = torus.weyl_report(params, N=args.N, max_freq=3, threshold=0.05)
        law = torus.hk_law_check(params, seed=args.seed)
        rep = {"command": "torus skew", "identities": ids, "weyl": weyl, "hk_law": law,
               "claim_ids": ["skew.cocycle-eq", "skew.type-2", "skew.cl", "skew.weyl", "skew.hk_law"]}
        ok = all(r["passed"] for r in ids) and weyl["passed"] and law["generic_verified"]
    elif args.which == "heisenberg":
        rep = {"command": "torus heisenberg", **torus.heisenberg_check(params, args.samples, args.seed, tol if tol else 1e-9)}
        ok = rep["passed"]
    else:
        rep = {"command": "torus tdk", "claim_ids": ["tdK"],
               **example_tdK(args.samples, args.seed, tol if tol else 1e-12)}
        ok = rep["passed"]
    return (EXIT_OK if ok else EXIT_NEGATIVE), rep


def build_parser():
    p = argparse.ArgumentParser(prog="clab", description="Finite-scale cocycle and Host-Kra toolkit.")
    p.add_argument("--version", action="version", version=f"clab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, input_=True):
        sp = sub.add_parser(name, help=help_)
        if input_:
            sp.add_argument("input", help="JSON file")
        sp.add_argument("--out", help="write the report here (atomically) instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="64-bit seed for PCG64 draws")
        sp.set_defaults(fn=fn)
        return sp

    add("check", cmd_check, "cocycle consistency")
    add("type", cmd_type, "type-k test").add_argument("--k", type=int, required=True)
    add("cl-solve", cmd_cl_solve, "solve the Conze-Lesigne equation")
    add("ergodic", cmd_ergodic, "ergodicity of the extension")
    add("mackey", cmd_mackey, "Mackey reduction on one ergodic component").add_argument(
        "--component", type=int, default=0)
    add("hk-group", cmd_hk_group, "Host-Kra group and translational certificate").add_argument(
        "--x0", type=int, default=0)
    add("factors", cmd_factors, "Host-Kra-Ziegler factor Z^k").add_argument("--k", type=int, required=True)
    g = add("gowers", cmd_gowers, "Gowers norm of f (from the file or random)")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--tol", type=float, default=1e-9)
    e = add("example", cmd_example, "worked example bundle", input_=False)
    e.add_argument("name", choices=["char2", "oddp", "bilinear"])
    e.add_argument("--n", type=int)
    e.add_argument("--p", type=int)
    e.add_argument("--verify", action="store_true")
    t = add("torus", cmd_torus, "floating-point torus checks", input_=False)
    t.add_argument("which", choices=["skew", "heisenberg", "tdk"])
    t.add_argument("--alpha", type=float)
    t.add_argument("--beta", type=float)
    t.add_argument("--N", type=int, default=100_000)
    t.add_argument("--samples", type=int, default=10_000)
    t.add_argument("--tol", type=float)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for name in ("k",):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            print(f"error: --{name} must be non-negative", file=sys.stderr)
            return EXIT_INPUT
    try:
        code, rep = args.fn(args)
    except (InputError, SizeGuardError, ClabError) as exc:
        if isinstance(exc, NegativeResult):
            code, rep = EXIT_NEGATIVE, {"command": args.command, "error": str(exc), "witness": exc.witness,
                                        "claim_ids": []}
        else:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    rep["exit_code"] = code
    text = dumps(rep)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
