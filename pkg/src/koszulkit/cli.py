"""`kk`: command-line front end.

Every command prints a versioned JSON run report (schema koszulkit.report/1)
except `module resolve`, whose stdout is the padded Betti TSV.  `--report`
writes the JSON report to a file as well.  Exit status: 0 when every
certificate passes, 1 when one fails, 2 on bad input or an undefined request.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from typing import Optional

import numpy as np

from .complexes import GradedComplex
from .corpus import koszul_side, standard_algebras
from .exactla import PrimeField
from .gradedmod import (
    GradedModule,
    ModuleError,
    WindowError,
    load_module,
    module_to_doc,
    regular_module,
    semisimple,
    simple,
    truncate_above,
)
from .koszuldual import (
    PipelineError,
    complex_from_doc,
    complex_to_doc,
    koszulity_via_phi,
    phi,
    phi_bounded_homology_check,
    phi_roundtrip,
    realize,
    resolution_complex,
    single_term,
    stable_hom_stabilized,
    totally_linear_approximation,
    weakly_koszul_via_ext_module,
)
from .localcoh import HypothesisError, koszul_truncation_index, regularity_report
from .presentation import (
    PresentationError,
    PresentedAlgebra,
    double_dual_certificate,
    load_algebra,
    quadratic_dual,
    structure_certificate,
)
from .resolve import betti_tsv, is_koszul, resolve, weakly_koszul_check, weakly_koszul_syzygy_index

SCHEMA = "koszulkit.report/1"

DEFAULTS = {"degree_bound": 12, "steps": 8, "tower_height": 8, "margin": 2}


class UsageError(ValueError):
    pass


# JSON ----------------------------------------------------------------------------


def jsonable(obj):
    """Plain JSON data: numpy scalars unwrapped, infinities as strings, tuple keys joined."""
    if isinstance(obj, dict):
        return {_key(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return int(x) if x.is_integer() else x
    return obj


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(jsonable(x)) for x in k)
    return str(jsonable(k))


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, ensure_ascii=False) + "\n"


def digest(*docs) -> str:
    h = hashlib.sha256()
    for doc in docs:
        h.update(json.dumps(jsonable(doc), sort_keys=True, separators=(",", ":")).encode())
        h.update(b"\0")
    return h.hexdigest()


# inputs --------------------------------------------------------------------------


def load_algebra_arg(text: str, degree_bound: int) -> PresentedAlgebra:
    """A JSON file, or the name of a built-in algebra."""
    if text.endswith(".json"):
        try:
            return load_algebra(text)
        except OSError as exc:
            raise UsageError(f"cannot read {text}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise PresentationError(f"{text} is not valid JSON: {exc}") from None
    algebras = standard_algebras(PrimeField.from_env(), degree_bound)
    if text not in algebras:
        raise UsageError(f"unknown algebra {text!r}; built-in names: {', '.join(algebras)}")
    return algebras[text]


def load_module_arg(text: str, A: PresentedAlgebra) -> GradedModule:
    """A JSON file or a spec: simple:V[:T], semisimple[:T], regular[:TOP], quotient:K."""
    if text.endswith(".json"):
        try:
            return load_module(text, A)
        except OSError as exc:
            raise UsageError(f"cannot read {text}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ModuleError(f"{text} is not valid JSON: {exc}") from None
    kind, _, rest = text.partition(":")
    try:
        args = [int(x) for x in rest.split(":")] if rest else []
        if kind == "simple":
            return simple(A, args[0], args[1] if len(args) > 1 else 0)
        if kind == "semisimple":
            return semisimple(A, args[0] if args else 0)
        if kind == "regular":
            return regular_module(A, args[0]) if args else regular_module(A)
        if kind == "quotient":
            return truncate_above(regular_module(A, args[0] - 1), args[0])
    except (IndexError, ValueError):
        raise UsageError(f"module spec {text!r} needs integer fields") from None
    raise UsageError(f"unknown module spec {text!r}")


def load_complex_arg(text: str, G: PresentedAlgebra, steps: int) -> GradedComplex:
    """A complex file, `single:<module spec>` or `resolution:<module spec>` over G."""
    if text.endswith(".json"):
        try:
            with open(text) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {text}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ModuleError(f"{text} is not valid JSON: {exc}") from None
        return complex_from_doc(doc, G)
    kind, _, rest = text.partition(":")
    if kind == "single":
        return single_term(load_module_arg(rest, G))
    if kind == "resolution":
        return resolution_complex(resolve(load_module_arg(rest, G), steps, cap=None))
    raise UsageError(f"unknown complex spec {text!r}")


# reports -------------------------------------------------------------------------


class Report:
    def __init__(self, command: str, bounds: dict):
        self.command = command
        self.bounds = bounds
        self.inputs: list = []
        self.results: dict = {}
        self.certificates: list = []

    def add_input(self, doc) -> None:
        self.inputs.append(doc)

    def certify(self, name: str, passed, exact: Optional[bool] = None, detail=None) -> None:
        entry = {"name": name, "pass": bool(passed)}
        if exact is not None:
            entry["exact"] = bool(exact)
        if detail is not None:
            entry["detail"] = detail
        self.certificates.append(entry)

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.certificates)

    def to_doc(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "field": PrimeField.from_env().p,
            "inputs_digest": digest(self.command, self.bounds, *self.inputs),
            "bounds": self.bounds,
            "results": self.results,
            "certificates": self.certificates,
            "failures": [c["name"] for c in self.certificates if not c["pass"]],
            "ok": self.ok,
        }


# commands ------------------------------------------------------------------------


def cmd_algebra_check(args, rep: Report) -> None:
    A = load_algebra_arg(args.algebra, args.degree_bound)
    rep.add_input(A.to_doc())
    cert = structure_certificate(A, args.check_degree)
    rep.results["hilbert_table"] = [h.tolist() for h in A.hilbert_table()]
    rep.results["dims"] = A.dims()
    rep.results["finite"] = A.finite
    rep.results["quadratic"] = A.is_quadratic
    rep.certify("associativity", cert["associative"], True,
                {"top_degree": cert["top_degree"], "checks": cert["associativity_checks"]})
    rep.certify("relations_vanish", cert["relations_vanish"], True)


def cmd_algebra_dual(args, rep: Report) -> None:
    A = load_algebra_arg(args.algebra, args.degree_bound)
    rep.add_input(A.to_doc())
    if not A.is_quadratic:
        raise UsageError("the quadratic dual needs quadratic relations")
    B = quadratic_dual(A)
    rep.results["dual"] = B.to_doc()
    rep.results["dual_dims"] = B.dims()
    dd = double_dual_certificate(A)
    rep.certify("double_dual", dd["ok"], True, {k: v for k, v in dd.items() if k != "ok"})
    kos = is_koszul(A, args.steps)
    rep.results["koszul"] = kos.to_json()
    if A.n_vertices == 1:
        from .suite import hilbert_identity

        hi = hilbert_identity(A, A.degree_bound)
        rep.results["hilbert_identity"] = hi
        if kos.value and kos.exact:
            rep.certify("hilbert_identity", hi["ok"], True)


def _module_inputs(args, rep: Report) -> tuple:
    A = load_algebra_arg(args.algebra, args.degree_bound)
    M = load_module_arg(args.module, A)
    rep.add_input(A.to_doc())
    rep.add_input(module_to_doc(M, algebra_doc="input"))
    if M.is_zero():
        raise UsageError("the module is zero")
    return A, M


def cmd_resolve(args, rep: Report) -> str:
    _, M = _module_inputs(args, rep)
    res = resolve(M, args.steps)
    tsv = betti_tsv(res)
    rep.results["betti"] = {f"{i},{j}": b for (i, j), b in sorted(res.betti().items())}
    rep.results["betti_tsv"] = tsv
    rep.results["terminated"] = res.terminated
    rep.results["horizon"] = res.horizon
    c = res.certify()
    for key in ("exact", "minimal", "subdiagonal"):
        rep.certify(f"resolution_{key}", c[key], True)
    return tsv


def cmd_regularity(args, rep: Report) -> None:
    _, M = _module_inputs(args, rep)
    r = regularity_report(M, args.tower_height, args.steps)
    rep.results.update(r)
    for key, chk in r["inequalities"].items():
        rep.certify(key, chk["holds"] and chk["exact"], chk["exact"], {"holds": chk["holds"]})


def cmd_weakly_koszul(args, rep: Report) -> None:
    _, M = _module_inputs(args, rep)
    direct = weakly_koszul_check(M, args.steps)
    via = weakly_koszul_via_ext_module(M, args.steps)
    index = weakly_koszul_syzygy_index(M, args.max_t, args.steps)
    rep.results["direct"] = direct.to_json()
    rep.results["ext_module"] = via.to_json()
    rep.results["syzygy_index"] = index.to_json()
    if via.value is not None:
        rep.certify("criteria_agree", direct.value == via.value, direct.exact and via.exact)


def cmd_truncate_koszul(args, rep: Report) -> None:
    _, M = _module_inputs(args, rep)
    t = koszul_truncation_index(M, args.tower_height, args.steps)
    rep.results.update(t)
    if t["hypotheses"] == "algebra Koszul":
        rep.certify("truncation_linear", t["linear"], t["s_exact"])


def cmd_complex_phi(args, rep: Report) -> None:
    _, M = _module_inputs(args, rep)
    L = phi(M)
    rep.results["complex"] = complex_to_doc(L.complex())
    rt = phi_roundtrip(M)
    for key, val in rt.items():
        rep.certify(f"phi_{key}", val, True)
    try:
        kv = koszulity_via_phi(M, args.steps)
        rep.results["koszul_via_phi"] = kv.to_json()
        rep.certify("koszulity_agreement", True, kv.exact)
    except PipelineError as exc:
        rep.certify("koszulity_agreement", False, True, str(exc))
    b = phi_bounded_homology_check(M, args.tower_height, args.steps, args.margin)
    rep.results["homology_bound"] = b
    rep.certify("homology_bounded_by_truncation_index", b["ok"], False)


def cmd_complex_realize(args, rep: Report) -> None:
    A = load_algebra_arg(args.algebra, args.degree_bound)
    G = koszul_side(A)
    B = load_complex_arg(args.complex, G, args.steps)
    rep.add_input(A.to_doc())
    rep.add_input(complex_to_doc(B))
    M, certs = realize(B, A, args.tower_height, args.steps, args.margin, args.max_length)
    rep.results["module"] = module_to_doc(M, algebra_doc="input")
    rep.results["certificates"] = certs
    rep.certify("realize", certs["ok"], None,
                {k: certs[k] for k in ("cone_exact", "qgr_zero", "discarded_total_dim") if k in certs})


def cmd_complex_approx(args, rep: Report) -> None:
    A = load_algebra_arg(args.algebra, args.degree_bound)
    C = load_complex_arg(args.complex, A, args.steps)
    rep.add_input(A.to_doc())
    rep.add_input(complex_to_doc(C))
    ap = totally_linear_approximation(C, args.max_length, args.margin, args.steps)
    rep.results["approximation"] = complex_to_doc(ap.P.complex())
    rep.results["complete"] = ap.complete
    for key in ("linear", "surjective", "chain_map", "d_squared", "cone_exact"):
        rep.certify(f"approximation_{key}", ap.certificates[key], None)
    rep.results["cone_homology_in_window"] = ap.certificates["cone_homology_in_window"]


def cmd_stable_hom(args, rep: Report) -> None:
    A = load_algebra_arg(args.algebra, args.degree_bound)
    M = load_module_arg(args.module, A)
    N = load_module_arg(args.other, A)
    for X in (M, N):
        if X.is_zero():
            raise UsageError("the module is zero")
    rep.add_input(A.to_doc())
    rep.add_input(module_to_doc(M, algebra_doc="input"))
    rep.add_input(module_to_doc(N, algebra_doc="input"))
    rep.results.update(stable_hom_stabilized(M, N, args.max_k))


def cmd_suite(args, rep: Report) -> None:
    from .suite import run_suite

    only = set(args.only) if args.only else None
    out = run_suite(args.corpus_dir, args.degree_bound, args.steps, args.tower_height, args.margin,
                    args.count, only)
    rep.add_input({"corpus_dir": bool(args.corpus_dir), "corpus": out["corpus"]})
    rep.results["suite"] = out
    for c in out["criteria"]:
        rep.certify(f"criterion_{c['criterion']}", c["pass"], None, c["title"])


# parser ----------------------------------------------------------------------------


def _bounds(p: argparse.ArgumentParser, steps: bool = True, tower: bool = False, margin: bool = False) -> None:
    p.add_argument("-D", "--degree-bound", type=int, default=DEFAULTS["degree_bound"],
                   help="degree bound for built-in algebras (default 12)")
    if steps:
        p.add_argument("--steps", type=int, default=DEFAULTS["steps"], help="resolution steps (default 8)")
    if tower:
        p.add_argument("-K", "--tower-height", type=int, default=DEFAULTS["tower_height"],
                       help="truncation tower height (default 8)")
    if margin:
        p.add_argument("--margin", type=int, default=DEFAULTS["margin"], help="window margin (default 2)")
    p.add_argument("--report", help="also write the JSON report to this file")
    p.add_argument("--timing", action="store_true", help="print wall time to stderr")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kk", description="Exact computations over graded quiver algebras.")
    sub = ap.add_subparsers(dest="group", required=True)

    alg = sub.add_parser("algebra", help="algebra certificates and duals").add_subparsers(dest="cmd", required=True)
    p = alg.add_parser("check", help="associativity and relation certificates, Hilbert table")
    p.add_argument("algebra", help="algebra JSON file or built-in name")
    p.add_argument("--check-degree", type=int, default=None, help="top total degree for the checks (default min(D, 6))")
    _bounds(p, steps=False)
    p.set_defaults(func=cmd_algebra_check)
    p = alg.add_parser("dual", help="quadratic dual with the double-dual check")
    p.add_argument("algebra")
    _bounds(p)
    p.set_defaults(func=cmd_algebra_dual)

    mod = sub.add_parser("module", help="module invariants").add_subparsers(dest="cmd", required=True)
    for name, func, tower, extra in (
        ("resolve", cmd_resolve, False, None),
        ("regularity", cmd_regularity, True, None),
        ("weakly-koszul", cmd_weakly_koszul, False, "max_t"),
        ("truncate-koszul", cmd_truncate_koszul, True, None),
    ):
        p = mod.add_parser(name)
        p.add_argument("algebra")
        p.add_argument("module", help="module JSON file or spec: simple:V[:T], semisimple[:T], regular[:TOP], quotient:K")
        _bounds(p, tower=tower)
        if extra:
            p.add_argument("--max-t", type=int, default=6, help="largest syzygy index searched (default 6)")
        p.set_defaults(func=func)

    cx = sub.add_parser("complex", help="linearization pipelines").add_subparsers(dest="cmd", required=True)
    p = cx.add_parser("phi", help="Φ of a module with round-trip certificates")
    p.add_argument("algebra")
    p.add_argument("module")
    _bounds(p, tower=True, margin=True)
    p.set_defaults(func=cmd_complex_phi)
    p = cx.add_parser("realize", help="module whose Φ matches a complex over the Koszul side of ALGEBRA")
    p.add_argument("algebra")
    p.add_argument("complex", help="complex JSON file, single:<module spec> or resolution:<module spec>")
    _bounds(p, tower=True, margin=True)
    p.add_argument("--max-length", type=int, default=6)
    p.set_defaults(func=cmd_complex_realize)
    p = cx.add_parser("approx", help="totally linear approximation of a complex over ALGEBRA")
    p.add_argument("algebra")
    p.add_argument("complex")
    _bounds(p, margin=True)
    p.add_argument("--max-length", type=int, default=6)
    p.set_defaults(func=cmd_complex_approx)

    p = sub.add_parser("stable-hom", help="stable Hom between syzygies")
    p.add_argument("algebra")
    p.add_argument("module")
    p.add_argument("other")
    p.add_argument("--max-k", type=int, default=4)
    _bounds(p, steps=False)
    p.set_defaults(func=cmd_stable_hom)

    p = sub.add_parser("suite", help="run the acceptance suite")
    p.add_argument("corpus_dir", nargs="?", default=None,
                   help="corpus directory (written from the built-in corpus when it has no manifest)")
    p.add_argument("--count", type=int, default=10, help="random modules per algebra (default 10)")
    p.add_argument("--only", type=int, nargs="*", help="run only these criteria")
    _bounds(p, tower=True, margin=True)
    p.set_defaults(func=cmd_suite)
    return ap


def _bounds_of(args) -> dict:
    keys = ("degree_bound", "steps", "tower_height", "margin", "max_length", "max_t", "max_k", "count", "check_degree")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.group if args.group in ("suite", "stable-hom") else f"{args.group} {args.cmd}"
    rep = Report(command, _bounds_of(args))
    start = time.perf_counter()
    stdout = None
    status = 0
    try:
        stdout = args.func(args, rep)
        status = 0 if rep.ok else 1
    except (UsageError, PresentationError, ModuleError, WindowError, HypothesisError, PipelineError, ValueError) as exc:
        rep.results["error"] = {"type": type(exc).__name__, "message": str(exc)}
        rep.certify("input", False)
        print(f"kk: error: {exc}", file=sys.stderr)
        status = 2
    text = dumps(rep.to_doc())
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    sys.stdout.write(stdout if isinstance(stdout, str) and status != 2 else text)
    if args.timing:
        print(f"wall time {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return status


__all__ = ["build_parser", "dumps", "jsonable", "main"]


if __name__ == "__main__":
    sys.exit(main())
