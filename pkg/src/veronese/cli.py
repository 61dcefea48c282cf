"""Command-line front end: run computations and checks, emit reports.

One command per process.  Reports are JSON (or CSV tables) with the fully
resolved configuration echoed, every numeric result carried as a bracket
with its method tags, and timings kept outside the deterministic body.

Exit codes: 0 success, 1 a check suite failed (report still written),
2 configuration or input-file problem, 3 numerical failure,
4 Pietsch dictionary refinement budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .balls import BaseNorm, vector_norm
from .cone import ConeMetricSpace, bilipschitz_experiment, cone_distance
from .config import DEFAULTS, Settings, thread_cap
from .errors import (BudgetExhausted, DegenerateFamily, DimensionMismatch,
                     FamilyTooLarge, NotSymmetric, NumericalFailure,
                     PietschInfeasible, UnsupportedNorm)
from .norms import NormSelector, sandwich_check, tensor_norm
from .polynomials import (HomPoly, cone_lipschitz_constant,
                          factorization_check, poly_norm)
from .rng import child_rng
from .serialize import (FormatError, base_from_name, bracket_to_dict,
                        certificate_to_dict, dump_json, family_to_dict,
                        load_json, poly_to_dict, report_body, report_to_text)
from .summability import (PairFamily, SummingMode, benchmark_instances,
                          estimate_pi_q, lip_denominator, pair_increments,
                          pietsch_measure, poly_denominator,
                          sample_dictionary, summing_ratio)
from .tensors import ConePoint, same_cone_point

_CONFIG_ERRORS = (FormatError, DimensionMismatch, NotSymmetric,
                  UnsupportedNorm, FamilyTooLarge, ValueError)

_DEFAULTS = {
    "norm": {"seed": 0, "format": "json", "out": None, "tol": None,
             "tensor": None, "dims": "2,2", "random": "elementary",
             "base": "l2", "selectors": "injective,projective"},
    "distance": {"seed": 0, "format": "json", "out": None, "tol": None,
                 "x": None, "y": None, "degree": 2, "base": "l2",
                 "selector": "sym-projective"},
    "poly": {"seed": 0, "format": "json", "out": None, "tol": None,
             "poly": None, "n": 2, "d": 2, "m": 1, "base": "l2",
             "selector": "sym-projective", "samples": 100},
    "summing": {"seed": 0, "format": "json", "out": None, "tol": None,
                "budget": 64, "poly": None, "family": None, "n": 2, "d": 2,
                "m": 1, "k": 2, "base": "l2", "q": 1.0, "mode": "both",
                "estimate": False},
    "pietsch": {"seed": 0, "format": "json", "out": None, "tol": 1e-6,
                "budget": 16, "poly": None, "family": None, "n": 2, "d": 2,
                "m": 1, "k": 3, "base": "l2", "q": 1.0, "constant": None,
                "refinements": 2, "cert": "pietsch_certificate.json"},
    "check": {"seed": 0, "format": "json", "out": None, "tol": 1e-3,
              "budget": 40, "suite": None, "dims": None, "ns": "2,3",
              "bases": None, "samples": 40},
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="veronese",
        description="Tensor-power cone metrics, polynomial norms, summing "
                    "constants and Pietsch certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file; flags override")
        sp.add_argument("--seed", type=int, help="RNG seed, echoed verbatim")
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--tol", type=float, help="target relative gap")

    sp = sub.add_parser("norm", help="tensor norm brackets + sandwich check")
    common(sp)
    sp.add_argument("--tensor", help="tensor file (JSON)")
    sp.add_argument("--dims", help="comma-separated slot dims for random input")
    sp.add_argument("--random", choices=("elementary", "generic"))
    sp.add_argument("--base", help="base norm: l1, l2, linf")
    sp.add_argument("--selectors", help="comma list: injective, projective, "
                                        "sym-projective")

    sp = sub.add_parser("distance", help="cone distance between two points")
    common(sp)
    sp.add_argument("--x", help="comma-separated vector")
    sp.add_argument("--y", help="comma-separated vector")
    sp.add_argument("--degree", type=int, help="tensor power degree")
    sp.add_argument("--base", help="base norm")
    sp.add_argument("--selector", help="norm selector for the metric")

    sp = sub.add_parser("poly", help="polynomial norm and cone Lipschitz "
                                     "constant")
    common(sp)
    sp.add_argument("--poly", help="polynomial file (JSON)")
    sp.add_argument("-n", type=int, help="variables for random instance")
    sp.add_argument("-d", type=int, help="degree for random instance")
    sp.add_argument("-m", type=int, help="outputs for random instance")
    sp.add_argument("--base", help="base norm")
    sp.add_argument("--selector", help="cone metric selector")
    sp.add_argument("--samples", type=int, help="factorization check samples")

    sp = sub.add_parser("summing", help="summing ratios or constant estimates")
    common(sp)
    sp.add_argument("--budget", type=int, help="family evaluations for "
                                               "estimation")
    sp.add_argument("--poly", help="polynomial file (JSON)")
    sp.add_argument("--family", help="pair family file (JSON)")
    sp.add_argument("-n", type=int)
    sp.add_argument("-d", type=int)
    sp.add_argument("-m", type=int)
    sp.add_argument("-k", type=int, help="pairs in a random family")
    sp.add_argument("--base", help="base norm")
    sp.add_argument("--q", type=float, help="summing exponent (>= 1)")
    sp.add_argument("--mode", choices=("poly", "lip", "both"))
    sp.add_argument("--estimate", action="store_true", default=None,
                    help="search families instead of rating a fixed one")

    sp = sub.add_parser("pietsch", help="recover a discrete dominating "
                                        "measure")
    common(sp)
    sp.add_argument("--budget", type=int, help="functional dictionary size")
    sp.add_argument("--poly", help="polynomial file (JSON)")
    sp.add_argument("--family", help="pair family file (JSON)")
    sp.add_argument("-n", type=int)
    sp.add_argument("-d", type=int)
    sp.add_argument("-m", type=int)
    sp.add_argument("-k", type=int)
    sp.add_argument("--base", help="base norm")
    sp.add_argument("--q", type=float)
    sp.add_argument("--constant", type=float, help="dominating constant C "
                                                   "(default: auto)")
    sp.add_argument("--refinements", type=int, help="dictionary growth "
                                                    "rounds before giving up")
    sp.add_argument("--cert", help="certificate output path")

    sp = sub.add_parser("check", help="run a theorem-check suite")
    common(sp)
    sp.add_argument("--budget", type=int, help="per-instance search budget")
    sp.add_argument("--suite", choices=("metrics", "factorization",
                                        "summing"))
    sp.add_argument("--dims", help="comma list of degrees d")
    sp.add_argument("--ns", help="comma list of dimensions n")
    sp.add_argument("--bases", help="comma list of base norms")
    sp.add_argument("--samples", type=int, help="pairs / instances per combo")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    defaults = _DEFAULTS[args.command]
    cfg = dict(defaults)
    if args.config:
        try:
            import json as _json
            with open(args.config) as fh:
                file_cfg = _json.load(fh)
        except OSError as e:
            raise FormatError(f"{args.config}: {e.strerror or e}")
        except ValueError as e:
            raise FormatError(f"{args.config}: {e}")
        if not isinstance(file_cfg, dict):
            raise FormatError(f"{args.config}: top level must be an object")
        for key, val in file_cfg.items():
            if key not in defaults:
                raise FormatError(
                    f"{args.config}: unknown config key {key!r} for command "
                    f"{args.command!r}; known: {sorted(defaults)}")
            cfg[key] = val
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if "suite" in cfg and cfg["suite"] not in ("metrics", "factorization",
                                               "summing"):
        raise FormatError("check needs --suite metrics|factorization|summing")
    return cfg


def _vector(text, name: str) -> np.ndarray:
    if text is None:
        raise FormatError(f"missing required vector {name!r}")
    if isinstance(text, (list, tuple)):
        vals = text
    else:
        vals = [t for t in str(text).split(",") if t.strip()]
    try:
        v = np.asarray([float(t) for t in vals])
    except ValueError:
        raise FormatError(f"vector {name!r}: expected comma-separated "
                          f"numbers, got {text!r}") from None
    if v.size == 0:
        raise FormatError(f"vector {name!r} is empty")
    return v


def _int_list(text, name: str) -> list:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise FormatError(f"{name}: expected comma-separated integers, "
                          f"got {text!r}") from None


def _selector(name) -> NormSelector:
    try:
        return NormSelector(str(name).strip().lower())
    except ValueError:
        raise FormatError(f"unknown selector {name!r}; expected one of "
                          f"{[s.value for s in NormSelector]}") from None


def _settings(cfg: dict) -> Settings:
    if cfg.get("tol"):
        return DEFAULTS.with_(gap_target=float(cfg["tol"]))
    return DEFAULTS


def _config_echo(cfg: dict) -> dict:
    echo = {k: cfg[k] for k in sorted(cfg)}
    echo["threads"] = thread_cap()
    return echo


# ---------------------------------------------------------------------------
# commands


def cmd_norm(cfg: dict):
    base = base_from_name(cfg["base"])
    selectors = [_selector(s) for s in str(cfg["selectors"]).split(",")]
    settings = _settings(cfg)
    seed = int(cfg["seed"])
    results = []
    if cfg["tensor"]:
        t = load_json(cfg["tensor"])
        if not isinstance(t, np.ndarray):
            raise FormatError(f"{cfg['tensor']}: expected kind 'tensor'")
        results.append({"item": "input", "source": cfg["tensor"],
                        "dims": list(t.shape)})
    else:
        dims = _int_list(cfg["dims"], "dims")
        rng = child_rng(seed, 0xC11, *dims)
        if cfg["random"] == "elementary":
            factors = [rng.standard_normal(ni) for ni in dims]
            t = factors[0]
            for f in factors[1:]:
                t = np.multiply.outer(t, f)
            prod = 1.0
            for f in factors:
                prod *= vector_norm(f, base)
            results.append({"item": "input", "source": "random-elementary",
                            "dims": dims, "factor_norm_product": float(prod)})
        else:
            from .tensors import symmetrize
            if len(set(dims)) != 1:
                raise FormatError("generic random input needs equal dims")
            t = symmetrize(rng.standard_normal(tuple(dims)))
            results.append({"item": "input", "source": "random-generic",
                            "dims": dims})
    for sel in selectors:
        b = tensor_norm(t, sel, base, settings, seed=seed)
        results.append({"item": "norm", "selector": sel.value,
                        "bracket": bracket_to_dict(b)})
    sw = sandwich_check(t, base, settings, seed=seed)
    results.append({"item": "sandwich", "consistent": sw.consistent,
                    "margin": float(sw.margin),
                    "injective": bracket_to_dict(sw.injective),
                    "projective": bracket_to_dict(sw.projective)})
    return results, 0


def cmd_distance(cfg: dict):
    x = _vector(cfg["x"], "x")
    y = _vector(cfg["y"], "y")
    if x.size != y.size:
        raise FormatError("x and y must share a dimension")
    d = int(cfg["degree"])
    base = base_from_name(cfg["base"])
    sel = _selector(cfg["selector"])
    space = ConeMetricSpace(x.size, d, base, sel, _settings(cfg))
    b = cone_distance(ConePoint(x, d), ConePoint(y, d), space)
    results = [{"item": "distance", "degree": d, "selector": sel.value,
                "bracket": bracket_to_dict(b),
                "identified": same_cone_point(x, y, d)}]
    return results, 0


def _load_poly(cfg: dict) -> HomPoly:
    if cfg["poly"]:
        P = load_json(cfg["poly"])
        if not isinstance(P, HomPoly):
            raise FormatError(f"{cfg['poly']}: expected kind 'poly'")
        return P
    return HomPoly.random(int(cfg["n"]), int(cfg["d"]), int(cfg["m"]),
                          seed=int(cfg["seed"]))


def _load_family(cfg: dict, n: int) -> PairFamily:
    if cfg["family"]:
        fam = load_json(cfg["family"])
        if not isinstance(fam, PairFamily):
            raise FormatError(f"{cfg['family']}: expected kind 'family'")
        return fam
    rng = child_rng(int(cfg["seed"]), 0xFA81, n, int(cfg["k"]))
    return PairFamily(rng.standard_normal((int(cfg["k"]), n)),
                      rng.standard_normal((int(cfg["k"]), n)))


def cmd_poly(cfg: dict):
    P = _load_poly(cfg)
    base = base_from_name(cfg["base"])
    sel = _selector(cfg["selector"])
    settings = _settings(cfg)
    seed = int(cfg["seed"])
    space = ConeMetricSpace(P.dim, P.degree, base, sel, settings)
    nb = poly_norm(P, base, settings=settings, tol=cfg["tol"], strict=False,
                   seed=seed)
    lb = cone_lipschitz_constant(P, space, settings=settings, tol=cfg["tol"],
                                 seed=seed)
    fc = factorization_check(P, samples=int(cfg["samples"]), seed=seed)
    results = [
        {"item": "instance", "n": P.dim, "d": P.degree, "m": P.codim,
         "source": cfg["poly"] or "random"},
        {"item": "poly_norm", "bracket": bracket_to_dict(nb)},
        {"item": "cone_lipschitz", "selector": sel.value,
         "bracket": bracket_to_dict(lb)},
        {"item": "factorization_check", "samples": fc.samples,
         "max_residual": float(fc.max_residual), "passed": fc.passed},
    ]
    return results, 0


def cmd_summing(cfg: dict):
    P = _load_poly(cfg)
    base = base_from_name(cfg["base"])
    settings = _settings(cfg)
    seed = int(cfg["seed"])
    q = float(cfg["q"])
    space = ConeMetricSpace(P.dim, P.degree, base,
                            NormSelector.SYM_PROJECTIVE, settings)
    modes = {"poly": [SummingMode.POLY], "lip": [SummingMode.LIP],
             "both": [SummingMode.POLY, SummingMode.LIP]}[cfg["mode"]]
    results = [{"item": "instance", "n": P.dim, "d": P.degree, "m": P.codim,
                "q": q, "source": cfg["poly"] or "random"}]
    if cfg["estimate"]:
        for mode in modes:
            est = estimate_pi_q(P, q, mode, space, budget=int(cfg["budget"]),
                                seed=seed)
            results.append({"item": "estimate", "mode": mode.value,
                            "value": float(est.value),
                            "bracket": bracket_to_dict(est.bracket),
                            "evaluations": est.evaluations,
                            "note": est.note,
                            "family": family_to_dict(est.family)})
    else:
        fam = _load_family(cfg, P.dim)
        results.append({"item": "family", "k": fam.k,
                        "source": cfg["family"] or "random"})
        for mode in modes:
            if mode is SummingMode.POLY:
                den = poly_denominator(fam, P.degree, base, q, settings,
                                       tol=cfg["tol"], seed=seed)
            else:
                den = lip_denominator(fam, space, q, settings, seed=seed)
            ratio = summing_ratio(P, fam, q, mode, space, settings=settings,
                                  tol=cfg["tol"], seed=seed)
            results.append({"item": "ratio", "mode": mode.value,
                            "denominator": bracket_to_dict(den),
                            "bracket": bracket_to_dict(ratio)})
    return results, 0


def cmd_pietsch(cfg: dict):
    P = _load_poly(cfg)
    base = base_from_name(cfg["base"])
    settings = DEFAULTS  # tol gates the violation here, not bracket gaps
    seed = int(cfg["seed"])
    q = float(cfg["q"])
    tol = float(cfg["tol"]) if cfg["tol"] is not None else 1e-6
    fam = _load_family(cfg, P.dim)
    space = ConeMetricSpace(P.dim, P.degree, base,
                            NormSelector.SYM_PROJECTIVE, settings)
    if cfg["constant"] is not None:
        C = float(cfg["constant"])
        c_source = "config"
    else:
        # smallest C any measure could certify is the worst single-pair
        # ratio; pad it and let refinement handle the rest
        worst = 0.0
        num = pair_increments(P, fam, BaseNorm.L2)
        for i, (x, y) in enumerate(fam):
            dist = cone_distance(ConePoint(x, P.degree),
                                 ConePoint(y, P.degree), space)
            if dist.lower > 1e-12:
                worst = max(worst, float(num[i]) / dist.lower)
        C = 1.1 * worst if worst > 0 else 1.0
        c_source = "auto"
    anchors = list(fam.X) + list(fam.Y)
    count = int(cfg["budget"])
    results = [{"item": "instance", "n": P.dim, "d": P.degree, "m": P.codim,
                "q": q, "k": fam.k, "constant": float(C),
                "constant_source": c_source}]
    cert = None
    best_violation = np.inf
    rounds = int(cfg["refinements"]) + 1
    for attempt in range(rounds):
        dico = sample_dictionary(P.dim, P.degree, base, count,
                                 seed=seed + attempt, settings=settings,
                                 anchors=anchors)
        try:
            cert = pietsch_measure(P, fam, q, C, dico, settings=settings)
            best_violation = cert.violation
            results.append({"item": "attempt", "round": attempt,
                            "dictionary": len(dico),
                            "violation": float(cert.violation),
                            "accepted": bool(cert.violation <= tol)})
            if cert.violation <= tol:
                break
            cert = None
        except PietschInfeasible as e:
            best_violation = min(best_violation, float(e.violation))
            results.append({"item": "attempt", "round": attempt,
                            "dictionary": len(dico),
                            "violation": float(e.violation),
                            "accepted": False})
        count *= 2
    if cert is None:
        results.append({"item": "outcome", "accepted": False,
                        "best_violation": float(best_violation),
                        "tolerance": tol})
        return results, 4
    dump_json(certificate_to_dict(cert), cfg["cert"])
    results.append({"item": "outcome", "accepted": True,
                    "violation": float(cert.violation), "tolerance": tol,
                    "support": int(np.sum(cert.weights > 1e-9)),
                    "certificate": cfg["cert"]})
    return results, 0


def _check_metrics(cfg, settings, seed):
    d_values = _int_list(cfg["dims"], "dims") if cfg["dims"] else [2]
    n_values = _int_list(cfg["ns"], "ns")
    exact_bases = {1: ("l1", "l2", "linf"), 2: ("l1", "l2", "linf"),
                   3: ("l1", "linf")}
    rows = []
    ok = True
    for d in d_values:
        bases = (str(cfg["bases"]).split(",") if cfg["bases"]
                 else exact_bases.get(d, ("l1", "linf")))
        for n in n_values:
            for bname in bases:
                base = base_from_name(bname)
                rep = bilipschitz_experiment(
                    n, d, base, (NormSelector.INJECTIVE,
                                 NormSelector.PROJECTIVE),
                    samples=int(cfg["samples"]), seed=seed,
                    settings=settings, slack=float(cfg["tol"]))
                ok = ok and rep.passed
                rows.append({"item": "band", "n": n, "d": d,
                             "base": base.value, "samples": rep.samples,
                             "max_ratio": rep.max_ratio,
                             "min_ratio": rep.min_ratio,
                             "bound": rep.bound, "passed": rep.passed})
    return rows, ok


def _check_factorization(cfg, settings, seed):
    d_values = _int_list(cfg["dims"], "dims") if cfg["dims"] else [1, 2, 3]
    n_values = _int_list(cfg["ns"], "ns")
    rows = []
    ok = True
    for d in d_values:
        for n in n_values:
            for m in (1, 2):
                P = HomPoly.random(n, d, m, seed=seed)
                rep = factorization_check(P, samples=int(cfg["samples"]),
                                          seed=seed)
                ok = ok and rep.passed
                rows.append({"item": "factorization", "n": n, "d": d, "m": m,
                             "max_residual": float(rep.max_residual),
                             "passed": rep.passed})
    return rows, ok


def _check_summing(cfg, settings, seed):
    rows = []
    ok = True
    for label, P, n, d, q in benchmark_instances():
        space = ConeMetricSpace(n, d, BaseNorm.L2,
                                NormSelector.SYM_PROJECTIVE, settings)
        ep = estimate_pi_q(P, q, SummingMode.POLY, space,
                           budget=int(cfg["budget"]), seed=seed)
        el = estimate_pi_q(P, q, SummingMode.LIP, space,
                           budget=int(cfg["budget"]), seed=seed)
        gap = abs(ep.value - el.value) / max(ep.value, el.value, 1e-12)
        passed = gap <= 0.05
        ok = ok and passed
        rows.append({"item": "agreement", "instance": label, "q": q,
                     "poly": float(ep.value), "lip": float(el.value),
                     "gap": float(gap), "passed": passed})
    return rows, ok


def cmd_check(cfg: dict):
    settings = _settings(cfg)
    seed = int(cfg["seed"])
    suite = {"metrics": _check_metrics, "factorization": _check_factorization,
             "summing": _check_summing}[cfg["suite"]]
    rows, ok = suite(cfg, settings, seed)
    rows.append({"item": "suite", "name": cfg["suite"], "passed": ok})
    return rows, 0 if ok else 1


_COMMANDS = {"norm": cmd_norm, "distance": cmd_distance, "poly": cmd_poly,
             "summing": cmd_summing, "pietsch": cmd_pietsch,
             "check": cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        results, code = _COMMANDS[args.command](cfg)
    except _CONFIG_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DegenerateFamily as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NumericalFailure, BudgetExhausted) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    body = report_body(args.command, _config_echo(cfg), results)
    text = report_to_text(body, {"total_s": time.perf_counter() - t0},
                          cfg["format"])
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
