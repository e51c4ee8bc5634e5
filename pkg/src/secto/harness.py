"""Scenario loading, dispatch and report emission.

A scenario is a JSON object with ``kind``, optional ``seed`` and
``tolerances``, and the kind-specific payload keys at the top level. Reports
are plain JSON, serialized with sorted keys so that a re-run with the same
scenario and seed is byte-identical.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import numpy as np

from . import __version__
from .flow import integral_indices, integrate, lax_residual, poisson_bracket
from .holonomy import verify_realization
from .linalg import BilinearForm, JordanSpec, MatrixPolynomial, commutator, realize_jordan
from .projective import (
    MetricField,
    bmk_check,
    comparison_tensor,
    corollary_feasibility,
    curvature_operator,
    gbar_roundtrip,
    geodesic_coincidence,
)
from .randomgen import random_g_skew, random_jordan_spec, random_polynomial
from .sectional import (
    SectionalRep,
    bianchi_residual,
    build_rep,
    express_polynomial,
    sectional_residual,
    solution_space,
    spectrum_verify,
    uniqueness_test,
)

__all__ = [
    "KINDS",
    "TOLERANCES",
    "Scenario",
    "ScenarioError",
    "dumps_report",
    "load_scenario",
    "run",
]

KINDS = ("sectional-verify", "spectrum", "flow", "holonomy", "projective", "uniqueness")

# Every tolerance used by a scenario kind: default value and meaning.
TOLERANCES: dict[str, dict[str, tuple[float, str]]] = {
    "sectional-verify": {
        "sectional": (1e-10, "max over the so(g) basis of |[R(X),A] - [X,B]| / (1 + |A| + |B|)"),
        "bianchi": (1e-10, "cyclic sum |R(u^v)w + R(v^w)u + R(w^u)v| relative to |R| |u||v||w|"),
        "symmetry": (1e-10, "trace-pairing self-adjointness defect of R"),
        "commutator": (1e-10, "|[A,B]| / (1 + |A||B|) for operators passing the sectional test"),
        "express": (1e-9, "|q(A) - B| / (1 + |B|) for the recovered polynomial q"),
    },
    "spectrum": {
        "match": (1e-8, "distance of each predicted eigenvalue to the dense spectrum, relative to 1 + |R|"),
        "cluster": (1e-5, "radius used to group defective eigenvalues before averaging"),
    },
    "flow": {
        "integral_drift": (1e-6, "max relative drift of every shift integral"),
        "energy_drift": (1e-8, "relative drift of H = 1/2 <R(x), x>"),
        "casimir_drift": (1e-8, "relative drift of <x, x>"),
        "skew": (1e-9, "max g-skewness defect along the trajectory"),
        "bracket": (1e-9, "Poisson bracket of integral pairs relative to |x||grad f||grad h|"),
        "lax": (1e-11, "normalized Lax residual on the lambda grid"),
    },
    "holonomy": {
        "algebraic": (1e-12, "extension-tensor conditions relative to their scale"),
        "nabla": (1e-8, "covariant constancy of A at sample points"),
        "curvature": (1e-8, "|curvature at 0 - formal curvature|"),
        "fd": (1e-6, "finite-difference curvature against the formal curvature"),
    },
    "projective": {
        "g_symmetry": (1e-12, "g-symmetry defect of the comparison tensor"),
        "roundtrip": (1e-10, "relative error of gbar reconstructed from g and A"),
        "compatibility": (1e-6, "normalized residual of the linear compatibility system"),
        "bmk": (1e-6, "sectional residual of the curvature for A and the Hessian operator"),
        "hausdorff": (1e-4, "Hausdorff distance between geodesics of the two metrics"),
    },
    "uniqueness": {
        "solve": (1e-9, "least-squares residual of the stacked sectional systems"),
    },
}


class ScenarioError(ValueError):
    """Schema or semantic violation; ``errors`` holds ``(json_path, message)``."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p}: {m}" for p, m in self.errors))


@dataclass
class Scenario:
    kind: str
    payload: dict
    seed: int = 0
    tolerances: dict = field(default_factory=dict)

    def effective_tolerances(self) -> dict[str, float]:
        out = {k: v for k, (v, _) in TOLERANCES[self.kind].items()}
        out.update(self.tolerances)
        return out

    def echo(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "tolerances": dict(self.tolerances), **self.payload}


# ------------------------------------------------------------------ schema

_NUM = {"type": "number"}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _NUM}}
_VECTOR = {"type": "array", "minItems": 1, "items": _NUM}
_POLY = {"type": "array", "minItems": 1, "items": _NUM}
_JORDAN = {
    "type": "object",
    "additionalProperties": False,
    "required": ["blocks"],
    "properties": {
        "blocks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["lambda", "size"],
                "properties": {
                    "lambda": _NUM,
                    "size": {"type": "integer", "minimum": 1},
                    "sign": {"enum": [1, -1]},
                },
            },
        },
        "order": {"const": "as-listed"},
    },
}
_REP = {
    "type": "object",
    "additionalProperties": False,
    "required": ["n", "matrix"],
    "properties": {"n": {"type": "integer", "minimum": 1}, "basis": {"const": "lex-wedge"}, "matrix": _MATRIX},
}
_METRIC = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {
            "additionalProperties": False,
            "required": ["kind", "coords", "coeffs"],
            "properties": {
                "kind": {"enum": ["rational", "symbolic"]},
                "coords": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                "coeffs": {"type": "array", "items": {"type": "array", "items": {"type": ["string", "number"]}}},
            },
        },
        {
            "additionalProperties": False,
            "required": ["kind", "g0", "Bq"],
            "properties": {"kind": {"const": "quadratic"}, "g0": _MATRIX, "Bq": {"type": "array"}},
        },
    ],
}
_MATRIX_SOURCE = {
    "n": {"type": "integer", "minimum": 1},
    "jordan_spec": _JORDAN,
    "A": _MATRIX,
    "g": _MATRIX,
}

_PAYLOADS: dict[str, dict] = {
    "sectional-verify": {
        **_MATRIX_SOURCE,
        "p": _POLY,
        "B": _MATRIX,
        "R": _REP,
        "bianchi_random": {"type": "integer", "minimum": 0},
        "random_cases": {
            "type": "object",
            "additionalProperties": False,
            "required": ["count"],
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "max_n": {"type": "integer", "minimum": 2},
                "max_degree": {"type": "integer", "minimum": 1},
                "max_block": {"type": "integer", "minimum": 1},
            },
        },
    },
    "spectrum": {**_MATRIX_SOURCE, "p": _POLY, "use_spec": {"type": "boolean"}},
    "flow": {
        **_MATRIX_SOURCE,
        "p": _POLY,
        "x0": _MATRIX,
        "x0_coords": _VECTOR,
        "h": {"type": "number", "exclusiveMinimum": 0},
        "T": {"type": "number", "exclusiveMinimum": 0},
        "lambda_grid": {"type": "array", "items": _NUM},
        "kmax": {"type": "integer", "minimum": 2},
        "subsample": {"type": "integer", "minimum": 1},
        "bracket_points": {"type": "integer", "minimum": 0},
        "convergence_study": {"type": "boolean"},
        "series": {"type": "boolean"},
    },
    "holonomy": {
        "n": {"type": "integer", "minimum": 1},
        "jordan_spec": _JORDAN,
        "sample_points": {"oneOf": [{"type": "integer", "minimum": 1}, {"type": "array", "items": _VECTOR}]},
        "fd_check": {"type": "boolean"},
    },
    "projective": {
        "metric_g": _METRIC,
        "metric_gbar": _METRIC,
        "domain_box": {"type": "array", "minItems": 1,
                       "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NUM}},
        "points": {"oneOf": [{"type": "integer", "minimum": 1}, {"type": "array", "items": _VECTOR}]},
        "geodesics": {
            "type": "object",
            "additionalProperties": False,
            "required": ["start"],
            "properties": {
                "start": _VECTOR,
                "directions": {"type": "integer", "minimum": 1},
                "length": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "corollary": {"type": "boolean"},
    },
    "uniqueness": {"g": _MATRIX, "A": _MATRIX, "B": _MATRIX, "A2": _MATRIX, "B2": _MATRIX},
}

_REQUIRED = {
    "sectional-verify": [],
    "spectrum": ["p"],
    "flow": ["p"],
    "holonomy": ["jordan_spec"],
    "projective": ["metric_g", "metric_gbar"],
    "uniqueness": ["g", "A", "B", "A2", "B2"],
}


def schema_for(kind: str) -> dict:
    tol = {
        "type": "object",
        "additionalProperties": False,
        "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in TOLERANCES[kind]},
    }
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", *_REQUIRED[kind]],
        "properties": {
            "kind": {"const": kind},
            "seed": {"type": "integer", "minimum": 0},
            "tolerances": tol,
            **_PAYLOADS[kind],
        },
    }


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ScenarioError([("$", f"duplicate key {k!r}")])
        out[k] = v
    return out


def _semantic_errors(kind: str, data: dict) -> list[tuple[str, str]]:
    errs = []
    if "jordan_spec" in data and "A" in data:
        errs.append(("$", "give either jordan_spec or A/g, not both"))
    if kind in ("sectional-verify", "spectrum", "flow"):
        has_matrix = "jordan_spec" in data or "A" in data
        if kind != "sectional-verify" or "random_cases" not in data:
            if not has_matrix:
                errs.append(("$", "one of jordan_spec or A is required"))
        if "A" in data and "g" not in data:
            errs.append(("$", "A requires the form g"))
    if "jordan_spec" in data and "n" in data:
        total = sum(b["size"] for b in data["jordan_spec"]["blocks"])
        if total != data["n"]:
            errs.append(("$.jordan_spec.blocks", f"block sizes sum to {total}, expected n={data['n']}"))
    for key in ("A", "g", "B", "A2", "B2", "x0"):
        if key in data:
            M = data[key]
            if any(len(row) != len(M) for row in M):
                errs.append((f"$.{key}", "matrix must be square"))
    if "A" in data and "g" in data and len(data["A"]) != len(data["g"]):
        errs.append(("$.g", "form and A have different sizes"))
    if kind == "sectional-verify":
        if "R" in data and "B" not in data and "p" not in data:
            errs.append(("$.R", "a user-supplied R needs B or p"))
        if "R" not in data and "p" not in data and "random_cases" not in data:
            errs.append(("$", "one of p, R or random_cases is required"))
    if kind == "flow" and "x0" in data and "x0_coords" in data:
        errs.append(("$", "give either x0 or x0_coords"))
    return errs


def load_scenario(text: str, kind: str | None = None) -> Scenario:
    """Parse and validate a scenario; raises :class:`ScenarioError` listing
    every violation with its JSON path."""
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ScenarioError([("$", f"invalid JSON: {exc}")]) from None
    if not isinstance(data, dict):
        raise ScenarioError([("$", "scenario must be a JSON object")])
    if kind is not None:
        if data.setdefault("kind", kind) != kind:
            raise ScenarioError([("$.kind", f"scenario kind {data['kind']!r} does not match subcommand {kind!r}")])
    k = data.get("kind")
    if k not in KINDS:
        raise ScenarioError([("$.kind", f"unknown kind {k!r}; expected one of {', '.join(KINDS)}")])
    validator = jsonschema.Draft202012Validator(schema_for(k))
    errs = [(e.json_path, e.message) for e in sorted(validator.iter_errors(data), key=lambda e: e.json_path)]
    if not errs:
        errs = _semantic_errors(k, data)
    if errs:
        raise ScenarioError(errs)
    payload = {key: v for key, v in data.items() if key not in ("kind", "seed", "tolerances")}
    return Scenario(k, payload, int(data.get("seed", 0)), dict(data.get("tolerances", {})))


# ------------------------------------------------------------------ running


def _operator_source(payload):
    if "jordan_spec" in payload:
        spec = JordanSpec.from_json(payload["jordan_spec"])
        A, g = realize_jordan(spec)
        return A, g, spec
    return np.asarray(payload["A"], float), BilinearForm(np.asarray(payload["g"], float)), None


def _verify_case(A, g, p, tol, B=None, R=None, bianchi_random=200, seed=0):
    if R is None:
        R = build_rep(A, p, g)
    if B is None:
        B = p(A)
    out = {
        "n": g.n,
        "sectional_residual": sectional_residual(R, A, B),
        "bianchi_residual": bianchi_residual(R, n_random=bianchi_random, seed=seed),
        "symmetry_residual": R.symmetry_residual(),
    }
    out["freedom_dimension"] = solution_space(A, B, g)[1]
    if out["sectional_residual"] <= tol["sectional"]:
        out["commutator_residual"] = float(np.linalg.norm(commutator(A, B)) / (1 + np.linalg.norm(A) * np.linalg.norm(B)))
        q = express_polynomial(A, B)
        out["polynomial"] = q.coeffs.tolist()
        out["express_residual"] = float(np.linalg.norm(q(A) - B) / (1 + np.linalg.norm(B)))
    checks = {
        "sectional": out["sectional_residual"] <= tol["sectional"],
        "bianchi": out["bianchi_residual"] <= tol["bianchi"],
        "symmetry": out["symmetry_residual"] <= tol["symmetry"],
    }
    if "express_residual" in out:
        checks["commutator"] = out["commutator_residual"] <= tol["commutator"]
        checks["express"] = out["express_residual"] <= tol["express"]
    out["checks"] = checks
    return out


def _run_verify(sc: Scenario, tol) -> tuple[dict, dict]:
    P = sc.payload
    cases = []
    verdicts = {}
    if "jordan_spec" in P or "A" in P:
        A, g, _ = _operator_source(P)
        p = MatrixPolynomial(P["p"]) if "p" in P else None
        R = SectionalRep.from_json(P["R"], g) if "R" in P else None
        B = np.asarray(P["B"], float) if "B" in P else None
        case = _verify_case(A, g, p, tol, B, R, P.get("bianchi_random", 200), sc.seed)
        cases.append({"label": "input", **case})
    if "random_cases" in P:
        rc = P["random_cases"]
        rng = np.random.default_rng(sc.seed)
        for i in range(rc["count"]):
            spec = random_jordan_spec(rng, rc.get("max_n", 8), rc.get("max_block", 3))
            p = random_polynomial(rng, rc.get("max_degree", 5))
            A, g = realize_jordan(spec)
            case = _verify_case(A, g, p, tol, bianchi_random=P.get("bianchi_random", 200), seed=sc.seed + i)
            cases.append({"label": f"random-{i}", "jordan_spec": spec.to_json(), "p": p.coeffs.tolist(), **case})
    for c in cases:
        for name, ok in c["checks"].items():
            verdicts[name] = verdicts.get(name, True) and ok
    worst = {key: max(c.get(key, 0.0) for c in cases)
             for key in ("sectional_residual", "bianchi_residual", "symmetry_residual")}
    return {"cases": cases, "worst": worst}, verdicts


def _run_spectrum(sc: Scenario, tol) -> tuple[dict, dict]:
    P = sc.payload
    A, g, spec = _operator_source(P)
    p = MatrixPolynomial(P["p"])
    rep = spectrum_verify(A, p, g, spec if P.get("use_spec", True) else None,
                          tol=tol["match"], cluster_tol=tol["cluster"])
    return rep, {"spectrum": rep["ok"]}


def _run_flow(sc: Scenario, tol) -> tuple[dict, dict]:
    P = sc.payload
    A, g, _ = _operator_source(P)
    p = MatrixPolynomial(P["p"])
    R = build_rep(A, p, g)
    B = p(A)
    basis = R.basis
    rng = np.random.default_rng(sc.seed)
    if "x0" in P:
        x0 = np.asarray(P["x0"], float)
    elif "x0_coords" in P:
        x0 = basis.matrix(np.asarray(P["x0_coords"], float))
    else:
        x0 = random_g_skew(rng, g)
    h, T = P.get("h", 1e-3), P.get("T", 10.0)
    kmax = P.get("kmax")
    res = integrate(x0, R, h, T, A=A, kmax=kmax, subsample=P.get("subsample", 100))
    d = res.diagnostics
    out = {"diagnostics": d}
    if P.get("series", True):
        out["series"] = {"times": res.times.tolist(), "states": [basis.coords(x).tolist() for x in res.states]}
    verdicts = {
        "integral_drift": d["max_integral_drift"] <= tol["integral_drift"],
        "energy_drift": d["energy_drift"] <= tol["energy_drift"],
        "casimir_drift": d["casimir_drift"] <= tol["casimir_drift"],
        "skew": d["skew_residual"] <= tol["skew"],
    }
    if P.get("convergence_study", False):
        half = integrate(x0, R, h / 2, T, A=A, kmax=kmax, subsample=1).diagnostics
        ratio = d["max_integral_drift"] / max(half["max_integral_drift"], np.finfo(float).tiny)
        out["convergence"] = {"drift_h": d["max_integral_drift"], "drift_half_h": half["max_integral_drift"],
                              "ratio": ratio}
        verdicts["convergence"] = 12.0 <= ratio <= 20.0
    lam_grid = P.get("lambda_grid", [-2, -1, -0.5, 0.5, 1, 2])
    if lam_grid:
        lax = max(lax_residual(random_g_skew(rng, g), R, A, B, lam) for lam in lam_grid)
        out["lax_residual"] = lax
        verdicts["lax"] = lax <= tol["lax"]
    npts = P.get("bracket_points", 50)
    if npts:
        idx = integral_indices(g.n, kmax)
        worst = 0.0
        for _ in range(npts):
            x = random_g_skew(rng, g)
            for a in range(len(idx)):
                for b in range(a + 1, len(idx)):
                    val, scale = poisson_bracket(idx[a], idx[b], x, A, g, basis)
                    worst = max(worst, abs(val) / scale if scale > 0 else abs(val))
        out["bracket_relative"] = worst
        verdicts["bracket"] = worst <= tol["bracket"]
    return out, verdicts


def _run_holonomy(sc: Scenario, tol) -> tuple[dict, dict]:
    P = sc.payload
    spec = JordanSpec.from_json(P["jordan_spec"])
    sp = P.get("sample_points", 20)
    points = None if isinstance(sp, int) else np.asarray(sp, float)
    rep = verify_realization(spec, n_points=sp if isinstance(sp, int) else len(sp), seed=sc.seed,
                             fd_check=P.get("fd_check", True), tol_alg=tol["algebraic"],
                             tol_nabla=tol["nabla"], tol_curv=tol["curvature"], tol_fd=tol["fd"], points=points)
    return rep, dict(rep["checks"])


def _run_projective(sc: Scenario, tol) -> tuple[dict, dict]:
    P = sc.payload
    box = P.get("domain_box")
    g = MetricField.from_json(P["metric_g"], box)
    gbar = MetricField.from_json(P["metric_gbar"], box)
    pts = P.get("points", 5)
    if isinstance(pts, int):
        if box is None:
            raise ScenarioError([("$.points", "random points need a domain_box")])
        lo, hi = np.asarray(box, float).T
        rng = np.random.default_rng(sc.seed)
        pad = 0.05 * (hi - lo)
        pts = rng.uniform(lo + pad, hi - pad, (pts, len(lo)))
    pts = np.asarray(pts, float)
    rows = []
    for x in pts:
        row = bmk_check(g, gbar, x)
        A = comparison_tensor(g, gbar, x)
        Gb = gbar.metric(x)
        row["roundtrip_error"] = float(np.linalg.norm(gbar_roundtrip(g, A, x) - Gb) / np.linalg.norm(Gb))
        row["curvature_operator"] = curvature_operator(g, x).to_json()
        rows.append(row)
    verdicts = {
        "g_symmetry": all(r["A_g_symmetry"] <= tol["g_symmetry"] for r in rows),
        "roundtrip": all(r["roundtrip_error"] <= tol["roundtrip"] for r in rows),
        "compatibility": all(r["compatibility_residual"] <= tol["compatibility"] for r in rows),
        "bmk": all(r["sectional_residual"] <= tol["bmk"] for r in rows),
    }
    out = {"points": rows}
    if "geodesics" in P:
        geo = P["geodesics"]
        res = geodesic_coincidence(g, gbar, geo["start"], geo.get("directions", 20), geo.get("length", 0.3),
                                   seed=sc.seed)
        out["geodesics"] = res
        verdicts["hausdorff"] = res["max_hausdorff"] <= tol["hausdorff"]
    if P.get("corollary", False):
        out["corollary"] = [corollary_feasibility(g, x) for x in pts]
    return out, verdicts


def _run_uniqueness(sc: Scenario, tol) -> tuple[dict, dict]:
    P = sc.payload
    g = BilinearForm(np.asarray(P["g"], float))
    A, B, A2, B2 = (np.asarray(P[k], float) for k in ("A", "B", "A2", "B2"))
    v = uniqueness_test(A, B, A2, B2, g, tol=tol["solve"])
    _, freedom = solution_space(A, B, g)
    out = {
        "dimension": v.dimension,
        "residual": v.residual,
        "fitted_k": v.fitted_k,
        "scalar_residual": v.scalar_residual,
        "certified_scalar": v.certified_scalar,
        "single_constraint_freedom": freedom,
        "particular": v.particular.to_json(),
    }
    return out, {"solve": v.residual <= tol["solve"]}


_RUNNERS = {
    "sectional-verify": _run_verify,
    "spectrum": _run_spectrum,
    "flow": _run_flow,
    "holonomy": _run_holonomy,
    "projective": _run_projective,
    "uniqueness": _run_uniqueness,
}


def run(sc: Scenario) -> dict:
    """Dispatch to the module checks; errors raised by a module end up in
    the report with their type and message, and fail the scenario."""
    tol = sc.effective_tolerances()
    report: dict[str, Any] = {
        "library": {"name": "secto", "version": __version__},
        "kind": sc.kind,
        "seed": sc.seed,
        "scenario": sc.echo(),
        "tolerances": tol,
    }
    try:
        results, verdicts = _RUNNERS[sc.kind](sc, tol)
    except ScenarioError:
        raise
    except Exception as exc:  # surfaced verbatim
        report["error"] = {"type": type(exc).__name__, "message": str(exc), "context": sc.kind}
        report["verdicts"] = {}
        report["pass"] = False
        return report
    report["results"] = results
    report["verdicts"] = {k: bool(v) for k, v in verdicts.items()}
    report["pass"] = all(report["verdicts"].values())
    return report


def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps_report(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_plain) + "\n"
