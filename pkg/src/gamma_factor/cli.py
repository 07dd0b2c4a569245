"""Command line front end: ``gamma-factor <command> [options]``.

Every run writes one JSON report (or a plain-text table) that records the
seed, budget and tolerances in effect, so a report can be reproduced from its
own header. Exit codes: 0 success, 1 refused certificate or failed check,
2 input or schema error, 3 no certificate within the budget.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from importlib import resources

import jsonschema

from . import _backend
from ._version import __version__
from .certificates import KwapienWitness, gamma_interval, lower_bound_from_witness, search_witness, tolerances
from .config import override
from .errors import CertificateRefused, InputError, UnsupportedError
from .gamma_norm import GammaRepresentation, assemble, gamma_lower_elementary, gamma_lower_via_operator, gamma_upper_details, greedy_split
from .operators import MultilinearOperator, hs_norm, operator_norm_bounds
from .polynomials import HomogeneousPolynomial, PolynomialWitness, poly_gamma_interval, poly_lower_bound
from .scenarios import PRESETS, interval_result, run_preset
from .serialize import dumps, to_plain
from .tensors import DenseTensor, hilbert_crossnorm, injective_norm_bounds, projective_norm_bounds

COMMANDS = ("norms", "certify", "search-witness", "gamma", "poly", "demo")
EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NO_CERT = 0, 1, 2, 3

# input kinds, most specific first; each is detected by its required keys
_KINDS = (
    ("certify_job", {"operator", "witness"}),
    ("poly_job", {"polynomial"}),
    ("gamma_job", {"representation"}),
    ("polynomial", {"degree", "space", "codomain", "coeffs"}),
    ("representation", {"spaces", "codomain", "terms"}),
    ("witness", {"xz", "st"}),
    ("operator", {"domain", "codomain", "coeffs"}),
    ("tensor", {"spaces", "coeffs"}),
)


class UsageError(Exception):
    """Bad input; reported with exit code 2."""


def _schema(name: str) -> dict:
    with resources.files("gamma_factor").joinpath("schemas", name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def detect_kind(obj) -> str:
    if not isinstance(obj, dict):
        raise UsageError("$: top-level value must be an object")
    for kind, keys in _KINDS:
        if keys <= set(obj):
            if kind == "witness" and _is_poly_witness(obj):
                return "poly_witness"
            return kind
    raise UsageError(f"$: cannot tell what this document is (keys: {sorted(obj)})")


def _is_poly_witness(obj) -> bool:
    for key in ("st", "xz"):
        for pr in obj.get(key) or []:
            if isinstance(pr, list) and pr:
                return not isinstance(pr[0], dict)
    return False


def validate(obj, kind: str, label: str) -> None:
    """Schema check against ``$defs/<kind>``; raises UsageError listing every violation."""
    schema = _schema("inputs.schema.json")
    sub = {"$schema": schema["$schema"], "$defs": schema["$defs"], "$ref": f"#/$defs/{kind}"}
    validator = jsonschema.Draft202012Validator(sub)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            field = e.absolute_path[-1] if e.absolute_path else "(root)"
            lines.append(f"{label}: {e.json_path}: field {field!r}: {e.message}")
        raise UsageError("\n".join(lines))


def load_inputs(paths):
    """Read, classify and schema-check each input; returns (docs by kind, provenance)."""
    docs, prov = {}, []
    for path in paths:
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise UsageError(f"{path}: cannot read ({exc.strerror})") from exc
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise UsageError(f"{path}: invalid JSON ({exc})") from exc
        kind = detect_kind(obj)
        validate(obj, kind, path)
        if kind in docs:
            raise UsageError(f"{path}: a second {kind} input was given")
        docs[kind] = obj
        prov.append({"path": str(path), "sha256": hashlib.sha256(raw).hexdigest(), "kind": kind})
    # separate operator + witness files form a certify job
    if "operator" in docs and "witness" in docs:
        docs["certify_job"] = {"operator": docs.pop("operator"), "witness": docs.pop("witness")}
    if "polynomial" in docs and "poly_witness" in docs:
        docs["poly_job"] = {"polynomial": docs.pop("polynomial"), "witness": docs.pop("poly_witness")}
    return docs, prov


def _need(docs, *kinds):
    for k in kinds:
        if k in docs:
            return k, docs[k]
    raise UsageError(f"this command needs an input of kind {' or '.join(kinds)}; got {sorted(docs) or 'none'}")


# -- commands ------------------------------------------------------------------------


def cmd_norms(docs, seed, budget):
    kind, obj = _need(docs, "tensor", "operator")
    results = []
    if kind == "tensor":
        u = DenseTensor.from_json(obj)
        results.append({"quantity": "injective norm", **injective_norm_bounds(u, budget, seed).to_json()})
        results.append({"quantity": "projective norm", **projective_norm_bounds(u, budget, seed).to_json()})
        if all(s.euclidean for s in u.spaces):
            results.append({"quantity": "Hilbert crossnorm", "value": hilbert_crossnorm(u)})
    else:
        T = MultilinearOperator.from_json(obj)
        results.append({"quantity": "operator norm", **operator_norm_bounds(T, budget, seed).to_json()})
        try:
            results.append({"quantity": "Hilbert-Schmidt norm", "value": hs_norm(T)})
        except UnsupportedError:
            pass
    status = "ok" if all(math.isfinite(r.get("upper", 0.0)) for r in results) else "no-certificate"
    return results, [], status, None


def cmd_certify(docs, seed, budget):
    _, job = _need(docs, "certify_job")
    T = MultilinearOperator.from_json(job["operator"])
    w = KwapienWitness.from_json(job["witness"], T.domain)
    try:
        cert = lower_bound_from_witness(T, w, budget, seed)
    except CertificateRefused as exc:
        return [{"quantity": "Gamma lower bound"}], [], "refused", str(exc)
    return [{"quantity": "Gamma lower bound", "value": cert.value, "certificate": cert.to_json()}], [], "ok", None


def cmd_search_witness(docs, seed, budget):
    _, obj = _need(docs, "operator", "certify_job")
    T = MultilinearOperator.from_json(obj.get("operator", obj))
    w, cert = search_witness(T, seed, budget)
    return [{"quantity": "Gamma lower bound", "value": cert.value, "certificate": cert.to_json(), "witness": w.to_json()}], [], "ok", None


def cmd_gamma(docs, seed, budget):
    kind, obj = _need(docs, "operator", "gamma_job", "representation", "tensor")
    if kind == "operator":
        ci = gamma_interval(MultilinearOperator.from_json(obj), seed, budget)
        status = "ok" if math.isfinite(ci.upper) else "no-certificate"
        return [interval_result("Gamma", ci)], [], status, None
    # the gamma tensor norm
    rep_obj = obj["representation"] if kind == "gamma_job" else obj if kind == "representation" else None
    if rep_obj is not None:
        rep = GammaRepresentation.from_json(rep_obj)
        u = assemble(rep)
    else:
        u = DenseTensor.from_json(obj)
        rep = greedy_split(u, budget, seed)
    try:
        up, detail = gamma_upper_details(rep, budget, seed)
    except CertificateRefused as exc:
        return [{"quantity": "gamma"}], [], "refused", str(exc)
    lower = gamma_lower_elementary(u, budget, seed)
    lo_route = "elementary"
    if kind == "gamma_job" and "operator" in obj:
        via = gamma_lower_via_operator(u, MultilinearOperator.from_json(obj["operator"]), seed=seed, budget=budget)
        if via > lower:
            lower, lo_route = via, "via-operator"
    lower = min(lower, up)
    res = {"quantity": "gamma", "lower": lower, "upper": up, "lower_route": lo_route, "upper_detail": detail}
    if rep_obj is None:
        res["representation"] = rep.to_json()
    return [res], [], "ok", None


def cmd_poly(docs, seed, budget):
    kind, obj = _need(docs, "poly_job", "polynomial")
    P = HomogeneousPolynomial.from_json(obj["polynomial"] if kind == "poly_job" else obj)
    results = []
    ci = poly_gamma_interval(P, seed, budget)
    results.append(interval_result("Gamma (polynomial)", ci))
    status, msg = ("ok" if math.isfinite(ci.upper) else "no-certificate"), None
    if kind == "poly_job" and "witness" in obj:
        w = PolynomialWitness.from_json(obj["witness"], P.space)
        try:
            cert = poly_lower_bound(P, w, budget, seed)
            results.append({"quantity": "Gamma lower bound (supplied witness)", "value": cert.value, "certificate": cert.to_json()})
        except CertificateRefused as exc:
            status, msg = "refused", str(exc)
    return results, [], status, msg


def cmd_demo(preset, seed, budget):
    results, checks = run_preset(preset, seed, budget)
    status = "ok" if all(c["passed"] for c in checks) else "checks-failed"
    return results, checks, status, None


_EXIT = {"ok": EXIT_OK, "refused": EXIT_FAILED, "checks-failed": EXIT_FAILED, "no-certificate": EXIT_NO_CERT}


# -- output --------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def render_table(report: dict) -> str:
    head = f"{report['command']}"
    if "preset" in report:
        head += f" {report['preset']}"
    lines = [f"gamma-factor {report['version']}  {head}  seed={report['seed']}  budget={report['budget']}  status={report['status']}"]
    if report.get("message"):
        lines.append(f"message: {report['message']}")
    for r in report["results"]:
        cols = [r["quantity"]]
        for key in ("value", "lower", "upper"):
            if key in r:
                cols.append(f"{key}={_fmt(r[key])}")
        for key in ("lower_cert", "upper_cert", "certificate"):
            if isinstance(r.get(key), dict):
                cols.append(f"{key}={r[key]['kind']}")
        lines.append("  ".join(cols))
    for c in report.get("checks", []):
        mark = "PASS" if c["passed"] else "FAIL"
        lines.append(f"{mark}  {c['name']}  ({_fmt(c['lhs'])} <= {_fmt(c['rhs'])} + {_fmt(c.get('tol', 0.0))})")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gamma-factor", description="Certified bounds for Hilbert-space factorization constants.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("preset", nargs="?", help="preset name (demo only): " + ", ".join(PRESETS))
    ap.add_argument("--input", "-i", action="append", default=[], help="JSON input file; repeatable")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=64, help="restart budget for the searches")
    ap.add_argument("--tol-psd", type=float, default=None, help="relative PSD tolerance of the domination check")
    ap.add_argument("--tol-norm", type=float, default=None, help="relative slack when comparing certified bounds")
    ap.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("json", "table"), default="json")
    ap.add_argument("--timing", action="store_true", help="add wall time to the report (breaks byte-identity)")
    return ap


def run(args) -> tuple[dict, int]:
    if args.budget < 1:
        raise UsageError(f"--budget must be positive, got {args.budget}")
    overrides = {}
    for name, val in (("psd_rel_tol", args.tol_psd), ("norm_rel_tol", args.tol_norm)):
        if val is not None:
            if not (math.isfinite(val) and val >= 0):
                raise UsageError(f"tolerance {name} must be a finite nonnegative number")
            overrides[name] = val
    if args.command == "demo":
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
        if args.input:
            raise UsageError("demo takes no --input")
        docs, prov = {}, []
    else:
        if args.preset is not None:
            raise UsageError(f"unexpected argument {args.preset!r}")
        docs, prov = load_inputs(args.input)

    t0 = time.perf_counter()
    with override(**overrides):
        tol = tolerances()
        try:
            if args.command == "demo":
                results, checks, status, msg = cmd_demo(args.preset, args.seed, args.budget)
            else:
                fn = {
                    "norms": cmd_norms,
                    "certify": cmd_certify,
                    "search-witness": cmd_search_witness,
                    "gamma": cmd_gamma,
                    "poly": cmd_poly,
                }[args.command]
                results, checks, status, msg = fn(docs, args.seed, args.budget)
        except InputError as exc:
            raise UsageError(str(exc)) from exc
    report = {
        "schema": "gamma-factor/report",
        "schema_version": 1,
        "version": __version__,
        "command": args.command,
    }
    if args.command == "demo":
        report["preset"] = args.preset
    report.update(
        seed=args.seed,
        budget=args.budget,
        tolerances=tol,
        backend=_backend.NAME,
        inputs=prov,
        status=status,
    )
    if msg:
        report["message"] = msg
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - t0
    report["results"] = results
    if checks:
        report["checks"] = checks
    return to_plain(report), _EXIT[status]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = run(args)
    except UsageError as exc:
        print(f"gamma-factor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = dumps(report) if args.format == "json" else render_table(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def report_schema() -> dict:
    return _schema("report.schema.json")


if __name__ == "__main__":
    sys.exit(main())
