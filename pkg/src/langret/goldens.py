"""Golden outputs, regenerated from the reference oracles.

Retraction goldens come from the exhaustive subset search, coweight and
envelope goldens from the upper-hull majorant.  Each golden file
``<set>.json`` has a sidecar ``<set>.provenance.json`` naming its generator.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from . import exact_linalg as la
from .coweights import coroot_coefficients, make_gl
from .envelope import StepFunction, concave_envelope_hull, coweight_to_function, function_to_coweight, pool_slopes
from .retraction import certificate_ok, retract_oracle, RetractionResult
from .root_data import make_system, pairing

RETRACT_CASES = {
    "A2": [
        "0,0", "1,-1", "-1,-1", "2/3,1/3", "1/3,2/3", "-1,1", "1,1",
        "3,-5", "-5/2,4", "-1,0", "7,2", "1/2,-7/3",
    ],
    "B2": ["0,0", "1,-1", "-1,-1", "1/2,1/2", "-3,1", "2,-5/3", "1,3", "-1/4,-2"],
    "G2": ["0,0", "1,-1", "-1,-1", "2,1", "-3,1", "1,3", "5/2,-1/2", "-2,7"],
}

COWEIGHT_CASES = {
    "GL4": ["0,0,0,0", "0,2,1,3", "3,2,2,1", "0,1,0,0", "1,1/2,-1,0", "-2,5,-1,3", "4,-4,4,-4", "1/3,0,2/3,5"],
}

ENVELOPE_CASES = [
    ("gl", "0,2,1,3"), ("sl", "0,1,-1,0"), ("gl", "0,0"), ("gl", "0,-1,-3,-6"),
    ("sl", "0,5,-2,3,0"), ("gl", "0,1/2,1/3,1/4,1/5"), ("gl", "0,0,2,3,6"), ("sl", "0,-4,0"),
]

GOLDEN_SETS = ("A2", "B2", "G2", "GL4", "envelope")


def _strs(v) -> list[str]:
    return [la.format_rational(x) for x in v]


def _retract_golden(name: str) -> dict:
    B = make_system(name)
    cases = []
    for text in RETRACT_CASES[name]:
        x = la.parse_vector(text)
        y = retract_oracle(B, x).value
        # report the same active set the CLI reports: indices where y pairs to zero
        if any(x):
            p = pairing(B, y)
            J = tuple(j for j in range(B.rank) if p[j] == 0)
        else:
            J = ()
        r = RetractionResult(y, J, {j: x[j] - y[j] for j in J})
        cases.append({
            "input": {"system": name, "vector": text},
            "expected": {
                "system": name,
                "value": _strs(y),
                "active_set": [j + 1 for j in J],
                "residual_coeffs": {str(j + 1): la.format_rational(c) for j, c in sorted(r.residual_coeffs.items())},
                "certificate_ok": certificate_ok(B, x, r),
                "used_fallback": False,
            },
        })
    return {"set": name, "kind": "retract", "cases": cases}


def _coweight_golden(name: str) -> dict:
    D = make_gl(int(name[2:]))
    cases = []
    for text in COWEIGHT_CASES[name]:
        lam = la.parse_vector(text)
        mu = function_to_coweight(concave_envelope_hull(coweight_to_function(lam)))
        d = coroot_coefficients(D, la.sub(mu, lam))
        cases.append({
            "input": {"group": name.lower(), "coweight": text},
            "expected": {"group": name, "value": _strs(mu), "d": _strs(d), "certificate_ok": True},
        })
    return {"set": name, "kind": "coweight-retract", "cases": cases}


def _envelope_golden() -> dict:
    cases = []
    for variant, text in ENVELOPE_CASES:
        f = StepFunction(la.parse_vector(text), variant)
        env = concave_envelope_hull(f)
        cases.append({
            "input": {"values": text, "variant": variant},
            "expected": {
                "variant": variant,
                "envelope": _strs(env.values),
                "pools": [{"start": a, "stop": b, "slope": la.format_rational(m)} for a, b, m in pool_slopes(f.slopes())],
                "hull_pav_agree": True,
            },
        })
    return {"set": "envelope", "kind": "envelope", "cases": cases}


PROVENANCE = {
    "retract": "values from the exhaustive subset search (retract_oracle); active set = indices where the value pairs to zero",
    "coweight-retract": "values from the upper-hull majorant of the partial sums; d from the coroot expansion of value - input",
    "envelope": "values from the upper-hull majorant; pools from pooled adjacent slopes",
}


def golden(name: str) -> dict:
    if name in RETRACT_CASES:
        return _retract_golden(name)
    if name in COWEIGHT_CASES:
        return _coweight_golden(name)
    if name == "envelope":
        return _envelope_golden()
    raise KeyError(f"unknown golden set {name!r}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def regenerate_goldens(out_dir: str | Path, sets: Iterable[str] = GOLDEN_SETS) -> list[Path]:
    """Write every requested golden set and its provenance sidecar; return the paths written."""
    out = Path(out_dir)
    written = []
    for name in sets:
        data = golden(name)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{name}.json"
        path.write_text(_dump(data))
        side = out / f"{name}.provenance.json"
        side.write_text(_dump({"set": name, "cases": len(data["cases"]), "generator": PROVENANCE[data["kind"]]}))
        written += [path, side]
    return written
