"""The acceptance suite behind `kk suite`.

Every criterion returns a JSON-ready record with a pass flag and the data it
was decided on.  Nothing time- or machine-dependent enters the report, so two
runs with the same inputs and flags serialize to identical bytes.
"""

from __future__ import annotations

import json
import os
from typing import Optional

import numpy as np

from .corpus import corpus_modules, koszul_side, standard_algebras
from .exactla import PrimeField
from .gradedmod import (
    FreeModule,
    GradedModule,
    generated_submodule,
    module_from_doc,
    module_to_doc,
    quotient_module,
    regular_module,
    semisimple,
    simple,
)
from .koszuldual import (
    PipelineError,
    koszulity_via_phi,
    phi,
    phi_roundtrip,
    realize,
    resolution_complex,
    single_term,
    weakly_koszul_via_ext_module,
)
from .localcoh import local_duality_crosscheck, regularity_report
from .presentation import PresentedAlgebra, algebra_from_doc, opposite, quadratic_dual, serialize_doc
from .resolve import (
    ext_regularity,
    is_koszul,
    resolve,
    weakly_koszul_check,
    weakly_koszul_syzygy_index,
)

SCHEMA = "koszulkit.suite/1"
MANIFEST = "manifest.json"

KOSZUL_EXPECTED = ("exterior(2)", "exterior(3)", "k[x]/(x^2)")
NON_KOSZUL = "k[x]/(x^3)"
EXTERIOR = ("exterior(2)", "exterior(3)")
POLYNOMIAL = ("k[y]", "k[x,y]", "k[x,y,z]")


# corpus ------------------------------------------------------------------------


def _slug(name: str) -> str:
    keep = "".join(c if c.isalnum() else "_" for c in name)
    return "_".join(part for part in keep.split("_") if part)


def export_corpus(directory: str, field: Optional[PrimeField] = None, degree_bound: int = 12,
                  count: int = 10) -> None:
    """Write the built-in corpus as algebra and module documents plus a manifest."""
    os.makedirs(directory, exist_ok=True)
    algebras = standard_algebras(field, degree_bound)
    manifest = {"algebras": {}, "modules": {}}
    for name, A in algebras.items():
        slug = _slug(name)
        afile = f"{slug}.algebra.json"
        with open(os.path.join(directory, afile), "w") as fh:
            fh.write(serialize_doc(A.to_doc()))
        manifest["algebras"][name] = afile
        files = []
        for k, M in enumerate(corpus_modules(A, count)):
            mfile = f"{slug}.module{k}.json"
            with open(os.path.join(directory, mfile), "w") as fh:
                fh.write(serialize_doc(module_to_doc(M, algebra_doc=afile)))
            files.append(mfile)
        manifest["modules"][name] = files
    with open(os.path.join(directory, MANIFEST), "w") as fh:
        fh.write(serialize_doc(manifest))


def _link_koszul_sides(algebras: dict) -> None:
    """Let koszul_side(A) return the loaded algebra with the same presentation."""
    by_doc = {json.dumps(B.to_doc(), sort_keys=True): B for B in algebras.values()}
    for A in algebras.values():
        if not A.is_quadratic:
            continue
        G = koszul_side(A)
        twin = by_doc.get(json.dumps(G.to_doc(), sort_keys=True))
        if twin is not None:
            A._koszul_side = twin


def load_corpus(directory: str) -> tuple:
    """(algebras, modules) from a corpus directory written by export_corpus."""
    with open(os.path.join(directory, MANIFEST)) as fh:
        manifest = json.load(fh)
    algebras, modules = {}, {}
    for name, afile in manifest["algebras"].items():
        with open(os.path.join(directory, afile)) as fh:
            algebras[name] = algebra_from_doc(json.load(fh))
    _link_koszul_sides(algebras)
    for name, files in manifest["modules"].items():
        mods = []
        for mfile in files:
            with open(os.path.join(directory, mfile)) as fh:
                mods.append(module_from_doc(json.load(fh), algebras[name]))
        modules[name] = mods
    return algebras, modules


def builtin_corpus(field: Optional[PrimeField] = None, degree_bound: int = 12, count: int = 10) -> tuple:
    algebras = standard_algebras(field, degree_bound)
    return algebras, {name: corpus_modules(A, count) for name, A in algebras.items()}


# helpers -----------------------------------------------------------------------


def _num(x):
    if isinstance(x, float) and np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _record(number: int, title: str, ok: bool, details) -> dict:
    return {"criterion": number, "title": title, "pass": bool(ok), "details": details}


def hilbert_identity(A: PresentedAlgebra, upto: int = 12) -> dict:
    """Coefficients of H_A(-t) H_{A^!}(t) up to t^upto (one-vertex algebras)."""
    B = quadratic_dual(A, degree_bound=max(upto, A.degree_bound))
    a = [A.dim(d) if d <= A.degree_bound else 0 for d in range(upto + 1)]
    b = [B.dim(d) for d in range(upto + 1)]
    coeffs = [sum((-1) ** i * a[i] * b[n - i] for i in range(n + 1)) for n in range(upto + 1)]
    return {"A": a, "dual": b, "product": coeffs, "ok": coeffs == [1] + [0] * upto}


def point_module(G: PresentedAlgebra, arrow: str) -> GradedModule:
    """G / G·arrow at the first vertex."""
    F = FreeModule(G, [(0, 0)], hi=None if G.finite else G.degree_bound)
    _, inc = generated_submodule(F, [(1, 0, G.normal_form((arrow,)))])
    bases = {key: m.T for key, m in inc.mats.items() if m.shape[1]}
    return quotient_module(F, bases)[0]


# criteria ----------------------------------------------------------------------


def criterion_koszulity(algebras: dict, steps: int) -> dict:
    rows = {}
    ok = True
    for name in KOSZUL_EXPECTED:
        v = is_koszul(algebras[name], steps)
        rows[name] = v.to_json()
        ok = ok and v.value is True and v.exact
    v = is_koszul(algebras[NON_KOSZUL], steps)
    beta = resolve(semisimple(algebras[NON_KOSZUL]), steps).betti().get((2, 3), 0)
    rows[NON_KOSZUL] = dict(v.to_json(), beta_2_3=beta)
    ok = ok and v.value is False and v.exact and beta != 0
    return _record(1, "Koszulity verdicts", ok, rows)


def criterion_betti(algebras: dict, steps: int) -> dict:
    res = resolve(simple(algebras["exterior(2)"], 0), steps)
    betti = res.betti()
    diag = [betti.get((i, i), 0) for i in range(steps + 1)]
    off = sorted([i, j] for (i, j) in betti if i != j)
    ok = diag == [i + 1 for i in range(steps + 1)] and not off
    return _record(2, "Betti numbers of the exterior(2) simple", ok, {"diagonal": diag, "off_diagonal": off})


def criterion_hilbert(algebras: dict, degree_bound: int) -> dict:
    rows = {name: hilbert_identity(algebras[name], degree_bound) for name in EXTERIOR}
    return _record(3, "Dual Hilbert series identity", all(r["ok"] for r in rows.values()), rows)


def criterion_symmetry(algebras: dict, steps: int) -> dict:
    rows = {}
    ok = True
    for name, A in algebras.items():
        left = ext_regularity(semisimple(A), steps)
        right = ext_regularity(semisimple(opposite(A)), steps)
        agree = left.value == right.value
        rows[name] = {"left": _num(left.value), "right": _num(right.value), "agree": agree,
                      "exact": left.exact and right.exact}
        ok = ok and agree and left.exact and right.exact
    return _record(4, "Ext-regularity of the semisimple on both sides", ok, rows)


def _regularity_rows(algebras: dict, modules: dict, K: int, steps: int) -> dict:
    return {name: [regularity_report(M, K, steps) for M in modules[name]] for name in algebras}


def criterion_inequalities(reports: dict) -> dict:
    rows = {}
    ok = True
    for name, reps in reports.items():
        failures, inexact, equal = [], [], []
        for k, r in enumerate(reps):
            for key, chk in r["inequalities"].items():
                if not chk["holds"]:
                    failures.append([k, key])
                elif not chk["exact"]:
                    inexact.append([k, key])
            if "equality_when_cm_A_zero" in r["inequalities"]:
                equal.append(r["inequalities"]["equality_when_cm_A_zero"]["holds"])
        row = {"modules": len(reps), "failures": failures, "inexact": inexact,
               "ext_reg": [r["ext_reg"]["value"] for r in reps], "cm_reg": [r["cm_reg"]["value"] for r in reps]}
        if name in POLYNOMIAL:
            row["equality_observed"] = len(equal) == len(reps) and all(equal)
            ok = ok and row["equality_observed"]
        rows[name] = row
        ok = ok and not failures and not inexact
    return _record(5, "Regularity inequalities", ok, rows)


def criterion_truncation(reports: dict) -> dict:
    rows = {}
    ok = True
    for name, reps in reports.items():
        if name == NON_KOSZUL:
            rows[name] = {"excluded": "algebra not Koszul",
                          "linear": [r["truncation"]["linear"] for r in reps]}
            continue
        lin = [r["truncation"]["linear"] for r in reps]
        rows[name] = {"s": [r["truncation"]["s"] for r in reps], "linear": lin}
        ok = ok and all(lin)
    return _record(6, "Linear resolution of the truncation at the CM-regularity", ok, rows)


def criterion_phi(algebras: dict, modules: dict, steps: int) -> dict:
    rows = {}
    ok = True
    for name, A in algebras.items():
        if not A.is_quadratic:
            rows[name] = {"excluded": "not quadratic"}
            continue
        trips, agree = [], []
        for M in modules[name]:
            rt = phi_roundtrip(M)
            trips.append(all(rt.values()))
            try:
                koszulity_via_phi(M, steps)
                agree.append(True)
            except PipelineError:
                agree.append(False)
        rows[name] = {"roundtrips": trips, "koszulity_agreement": agree}
        ok = ok and all(trips) and all(agree)
    return _record(7, "Linearization round trips", ok, rows)


def criterion_weakly_koszul(algebras: dict, modules: dict) -> dict:
    rows = {}
    ok = True
    for name in algebras:
        direct, via_f, index = [], [], []
        for M in modules[name]:
            w = weakly_koszul_check(M, 6)
            F = weakly_koszul_via_ext_module(M, 6)
            direct.append(w.value)
            via_f.append(F.value)
            if name in EXTERIOR:
                index.append(weakly_koszul_syzygy_index(M).value)
        compared = [(a, b) for a, b in zip(direct, via_f) if b is not None]
        row = {"direct": direct, "ext_module": via_f, "compared": len(compared),
               "agree": all(a == b for a, b in compared)}
        ok = ok and row["agree"]
        if name in EXTERIOR:
            row["syzygy_index"] = index
            found = all(t is not None and t <= 6 for t in index)
            row["index_found"] = found
            ok = ok and found
        rows[name] = row
    return _record(8, "Weakly Koszul criteria", ok, rows)


def density_complexes(algebras: dict, modules: dict, steps: int) -> list:
    """Five complexes over the Koszul side of exterior(2), with labels."""
    E2 = algebras["exterior(2)"]
    G = koszul_side(E2)
    out = []
    for k in (0, 1):
        out.append((f"phi(exterior(2) module {k})", phi(modules["exterior(2)"][k]).complex()))
    out.append(("simple", single_term(simple(G, 0))))
    star = [a.id for a in G.quiver.arrows][-1]
    out.append((f"resolution of G/({star})", resolution_complex(resolve(point_module(G, star), steps))))
    if modules.get("k[x,y]") and modules["k[x,y]"][0].algebra is G:
        out.append(("k[x,y] module 0", single_term(modules["k[x,y]"][0])))
    else:
        out.append(("regular truncated", single_term(regular_module(G, 4))))
    return out


def criterion_density(algebras: dict, modules: dict, K: int, steps: int, margin: int) -> dict:
    E2 = algebras["exterior(2)"]
    rows = []
    ok = True
    for label, B in density_complexes(algebras, modules, steps):
        try:
            M, certs = realize(B, E2, K, steps, margin)
            row = {"complex": label, "ok": certs["ok"], "cone_exact": certs.get("cone_exact"),
                   "discarded_total_dim": certs["discarded_total_dim"], "shift": certs.get("shift", 0),
                   "module_dims": [int(M.total_dim)] if not M.is_zero() else [0]}
        except PipelineError as exc:
            row = {"complex": label, "ok": False, "error": str(exc)}
        rows.append(row)
        ok = ok and row["ok"]
    return _record(9, "Density witnesses for the linearization pipeline", ok, rows)


def criterion_local_duality(algebras: dict, K: int) -> dict:
    E2 = algebras["exterior(2)"]
    G = koszul_side(E2)
    rows = []
    for v in range(E2.n_vertices):
        for i in (0, 1):
            r = local_duality_crosscheck(simple(E2, v), i, K)
            rows.append({"algebra": "exterior(2)", "module": f"simple {v}", "i": i, "ok": r["ok"], "cells": r["cells"]})
    for i in (0, 1, 2):
        r = local_duality_crosscheck(regular_module(G), i, K)
        rows.append({"algebra": "k[x,y]", "module": "regular", "i": i, "ok": r["ok"], "cells": r["cells"]})
    return _record(10, "Local duality cross-check", all(r["ok"] for r in rows), rows)


# driver ------------------------------------------------------------------------


def run_suite(corpus_dir: Optional[str] = None, degree_bound: int = 12, steps: int = 8, K: int = 8,
              margin: int = 2, count: int = 10, only: Optional[set] = None, progress=None) -> dict:
    """Run criteria 1-10 (criterion 11 compares two runs and lives outside).

    With `corpus_dir`, the corpus is read from the manifest there; a missing
    manifest is first created from the built-in corpus.
    """
    field = PrimeField.from_env()
    if corpus_dir is not None:
        if not os.path.exists(os.path.join(corpus_dir, MANIFEST)):
            export_corpus(corpus_dir, field, degree_bound, count)
        algebras, modules = load_corpus(corpus_dir)
    else:
        algebras, modules = builtin_corpus(field, degree_bound, count)

    def want(n):
        return only is None or n in only

    def note(n):
        if progress is not None:
            progress(n)

    criteria = []
    if want(1):
        note(1)
        criteria.append(criterion_koszulity(algebras, steps))
    if want(2):
        note(2)
        criteria.append(criterion_betti(algebras, steps))
    if want(3):
        note(3)
        criteria.append(criterion_hilbert(algebras, degree_bound))
    if want(4):
        note(4)
        criteria.append(criterion_symmetry(algebras, steps))
    if want(5) or want(6):
        note(5)
        reports = _regularity_rows(algebras, modules, K, steps)
        if want(5):
            criteria.append(criterion_inequalities(reports))
        if want(6):
            criteria.append(criterion_truncation(reports))
    if want(7):
        note(7)
        criteria.append(criterion_phi(algebras, modules, steps))
    if want(8):
        note(8)
        criteria.append(criterion_weakly_koszul(algebras, modules))
    if want(9):
        note(9)
        criteria.append(criterion_density(algebras, modules, K, steps, margin))
    if want(10):
        note(10)
        criteria.append(criterion_local_duality(algebras, K))
    return {
        "schema": SCHEMA,
        "field": field.p,
        "bounds": {"degree_bound": degree_bound, "steps": steps, "tower_height": K, "margin": margin,
                   "modules_per_algebra": count},
        "corpus": {name: len(mods) for name, mods in modules.items()},
        "criteria": criteria,
        "ok": all(c["pass"] for c in criteria),
    }


__all__ = ["builtin_corpus", "export_corpus", "hilbert_identity", "load_corpus", "run_suite"]
