"""Structured text formats for tensors, polynomials, families and reports.

Everything is JSON with explicit dimensions and a `kind` discriminator, field
order fixed by construction so identical inputs serialize byte-identically.
Report bodies never contain wall-clock data; timings travel in a sibling
section that diff tools can ignore.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .balls import BaseNorm
from .bracket import Bracket
from .polynomials import HomPoly
from .summability import PairFamily, PietschCertificate

ARTIFACT_VERSION = "0.1.0"


class FormatError(ValueError):
    """Malformed input file; message carries location diagnostics."""


def _flat(a: np.ndarray) -> list:
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def tensor_to_dict(t: np.ndarray) -> dict:
    t = np.asarray(t, dtype=float)
    return {"kind": "tensor", "dims": list(t.shape), "data": _flat(t)}


def poly_to_dict(P: HomPoly) -> dict:
    return {"kind": "poly", "codim": P.codim, "dim": P.dim,
            "degree": P.degree, "data": _flat(P.coeffs)}


def family_to_dict(fam: PairFamily) -> dict:
    return {"kind": "family", "k": fam.k, "dim": fam.dim,
            "x": [[float(v) for v in row] for row in fam.X],
            "y": [[float(v) for v in row] for row in fam.Y]}


def bracket_to_dict(b: Bracket) -> dict:
    return {"lower": float(b.lower), "upper": float(b.upper),
            "lower_method": b.lower_method, "upper_method": b.upper_method}


def certificate_to_dict(cert: PietschCertificate) -> dict:
    """Full audit payload: every functional, weight, and residual."""
    G = np.asarray(cert.gram)
    resid = cert.constant ** cert.q * (G @ cert.weights) - cert.increments
    return {
        "kind": "pietsch-certificate",
        "q": float(cert.q),
        "constant": float(cert.constant),
        "violation": float(cert.violation),
        "weights": _flat(cert.weights),
        "functionals": [poly_to_dict(f.poly) | {"norm_upper": float(f.norm_upper)}
                        for f in cert.functionals],
        "pairs": family_to_dict(cert.pairs),
        "gram": [[float(v) for v in row] for row in G],
        "increments": _flat(cert.increments),
        "slacks": _flat(resid),
    }


def _expect(cond: bool, msg: str):
    if not cond:
        raise FormatError(msg)


def _load_kind(obj: Any, kind: str) -> dict:
    _expect(isinstance(obj, dict), f"expected a JSON object, got {type(obj).__name__}")
    _expect(obj.get("kind") == kind,
            f"expected kind={kind!r}, found {obj.get('kind')!r}")
    return obj


def tensor_from_dict(obj) -> np.ndarray:
    obj = _load_kind(obj, "tensor")
    dims = obj.get("dims")
    _expect(isinstance(dims, list) and all(isinstance(v, int) and v > 0 for v in dims),
            "field 'dims' must be a list of positive integers")
    data = obj.get("data")
    want = int(np.prod(dims))
    _expect(isinstance(data, list) and len(data) == want,
            f"field 'data' must hold {want} numbers for dims {dims}, "
            f"found {len(data) if isinstance(data, list) else type(data).__name__}")
    try:
        return np.asarray(data, dtype=float).reshape(dims)
    except (TypeError, ValueError) as e:
        raise FormatError(f"field 'data' has a non-numeric entry: {e}") from None


def poly_from_dict(obj) -> HomPoly:
    obj = _load_kind(obj, "poly")
    m, n, d = obj.get("codim"), obj.get("dim"), obj.get("degree")
    for name, v in (("codim", m), ("dim", n), ("degree", d)):
        _expect(isinstance(v, int) and v > 0, f"field {name!r} must be a positive integer")
    data = obj.get("data")
    want = m * n ** d
    _expect(isinstance(data, list) and len(data) == want,
            f"field 'data' must hold {want} numbers, found "
            f"{len(data) if isinstance(data, list) else type(data).__name__}")
    try:
        coeffs = np.asarray(data, dtype=float).reshape((m,) + (n,) * d)
    except (TypeError, ValueError) as e:
        raise FormatError(f"field 'data' has a non-numeric entry: {e}") from None
    return HomPoly(coeffs)


def family_from_dict(obj) -> PairFamily:
    obj = _load_kind(obj, "family")
    k, n = obj.get("k"), obj.get("dim")
    for name, v in (("k", k), ("dim", n)):
        _expect(isinstance(v, int) and v > 0, f"field {name!r} must be a positive integer")
    out = []
    for side in ("x", "y"):
        rows = obj.get(side)
        _expect(isinstance(rows, list) and len(rows) == k,
                f"field {side!r} must hold {k} rows")
        for i, row in enumerate(rows):
            _expect(isinstance(row, list) and len(row) == n,
                    f"{side}[{i}] must hold {n} numbers")
        try:
            out.append(np.asarray(rows, dtype=float))
        except (TypeError, ValueError) as e:
            raise FormatError(f"field {side!r} has a non-numeric entry: {e}") from None
    return PairFamily(out[0], out[1])


_LOADERS = {"tensor": tensor_from_dict, "poly": poly_from_dict,
            "family": family_from_dict}


def load_json(path: str):
    """Load any known object kind from a JSON file, with diagnostics."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as e:
        raise FormatError(f"{path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    _expect(isinstance(obj, dict) and "kind" in obj,
            f"{path}: top level must be an object with a 'kind' field")
    loader = _LOADERS.get(obj["kind"])
    _expect(loader is not None,
            f"{path}: unknown kind {obj['kind']!r}; expected one of "
            f"{sorted(_LOADERS)}")
    try:
        return loader(obj)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from None


def dump_json(obj: dict, path: str):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def dumps(obj: dict) -> str:
    """Canonical serialization: insertion order kept, stable float repr."""
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False)


def report_body(command: str, config: dict, results) -> dict:
    """Deterministic report body: everything except timings."""
    return {"artifact": "veronese", "version": ARTIFACT_VERSION,
            "command": command, "config": config, "results": results}


def report_to_text(body: dict, timings: dict | None = None,
                   fmt: str = "json") -> str:
    if fmt == "csv":
        return _report_csv(body)
    full = dict(body)
    if timings is not None:
        full["timings"] = {k: round(float(v), 6) for k, v in timings.items()}
    return dumps(full) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)


def _report_csv(body: dict) -> str:
    """Flat table of the result rows; config travels as comment lines."""
    lines = [f"# veronese {ARTIFACT_VERSION} {body['command']}"]
    for key, val in body["config"].items():
        lines.append(f"# {key}={val}")
    rows = body["results"]
    if isinstance(rows, dict):
        rows = [rows]
    keys: list[str] = []
    for row in rows:
        for k, v in row.items():
            if isinstance(v, (dict, list)):
                continue
            if k not in keys:
                keys.append(k)
    lines.append(",".join(keys))
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(k, "")) for k in keys))
    return "\n".join(lines) + "\n"


def base_from_name(name: str) -> BaseNorm:
    try:
        return BaseNorm[name.upper()]
    except KeyError:
        raise FormatError(f"unknown base norm {name!r}; expected one of "
                          f"{[b.name.lower() for b in BaseNorm]}") from None
