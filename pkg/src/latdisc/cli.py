"""Command-line front end: ``latdisc <command> [flags]``.

Every command writes CSV (or JSON for ``ft``) to stdout and, with
``--json PATH``, a summary document.  A JSON config file may supply any
flag; flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, LatdiscError

SCHEMA_VERSION = 1


def _version():
    try:
        from importlib.metadata import version
        return version("artifact")
    except Exception:  # pragma: no cover - only when run from a source tree
        return "0.1.0"


# ---------------------------------------------------------------------------
# parameter tables: name -> (parser, default, help)
# ---------------------------------------------------------------------------

def _float_list(v):
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    v = str(v)
    if ":" in v:
        a, b = (float(x) for x in v.split(":"))
        if not 0 < a <= b:
            raise ValueError(f"range {v!r} needs 0 < a <= b")
        # a, 2a, 4a, ... up to b
        return [a * 2.0 ** k for k in range(int(math.floor(math.log2(b / a) + 1e-9)) + 1)]
    return [float(x) for x in v.split(",") if x]


def _int_list(v):
    return [int(x) for x in _float_list(v)]


def _p(v):
    return math.inf if str(v).lower() in ("inf", "infinity") else float(v)


def _body(v):
    return json.loads(v) if isinstance(v, str) else v


COMMANDS = {
    "count": {
        "body": (_body, None, "body spec as JSON"),
        "R": (float, None, "dilation"),
        "rot": (float, 0.0, "rotation angle"),
        "tx": (float, 0.0, "translation x"),
        "ty": (float, 0.0, "translation y"),
    },
    "disc": {
        "body": (_body, None, "body spec as JSON"),
        "R": (float, None, "dilation"),
        "n": (int, 16, "translation grid size n (n x n)"),
        "rot": (float, 0.0, "rotation angle"),
    },
    "ft": {
        "body": (_body, None, "body spec as JSON"),
        "rho": (float, None, "radial frequency"),
        "theta": (float, 0.0, "direction angle"),
        "method": (str, "auto", "analytic|boundary|chord|polygon|phase|auto"),
    },
    "decay": {
        "body": (_body, None, "body spec as JSON"),
        "mode": (str, "directional", "directional|spherical"),
        "theta": (float, None, "direction (default: flat normal, or 0)"),
        "p": (_p, 2.0, "exponent for spherical mode"),
        "rho_min": (float, 16.0, "smallest rho (power of 2)"),
        "rho_max": (float, 1024.0, "largest rho (power of 2)"),
    },
    "norms": {
        "body": (_body, None, "body spec as JSON"),
        "p": (_p, 2.0, "exponent (inf allowed for mc)"),
        "R": (_float_list, None, "list 'a,b,c' or dyadic range 'a:b'"),
        "method": (str, "mc", "mc|parseval|rotation"),
        "samples": (int, 10_000, "Monte Carlo samples"),
        "M": (int, 64, "Parseval cutoff"),
        "rot": (float, 0.0, "fixed rotation for mc"),
    },
    "hv": {
        "R": (float, None, "radius (R^2 must not be an integer)"),
        "K": (int, 10_000, "number of terms"),
    },
    "cassels": {
        "N": (int, 64, "number of points"),
        "L": (int, 9, "L"),
        "H": (int, 2, "H"),
        "pointset": (str, "uniform", "uniform|jittered|grid"),
    },
    "irreg": {
        "gamma": (float, 3.0, "flatness exponent"),
        "N": (_int_list, [16, 64, 256, 1024], "point counts"),
        "pointset": (str, "jittered", "uniform|jittered|grid"),
        "tau_nodes": (int, 32, "Gauss nodes in tau"),
        "t_grid": (int, 64, "t grid size"),
    },
    "selftest": {},
}

GLOBAL_KEYS = {"command", "seed", "threads", "csv", "json"}


@dataclass
class ExperimentConfig:
    command: str
    params: dict
    seed: int = 0
    threads: int | None = None
    csv_path: str | None = None
    json_path: str | None = None
    body: dict | None = field(default=None)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else ("inf" if f > 0 else "-inf" if f < 0 else "nan")
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return v


def _json_text(doc):
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _need(params, *keys):
    for k in keys:
        if params.get(k) is None:
            raise ConfigError(f"missing required parameter '{k}'")


def _get_body(params):
    from .geometry import body_from_spec
    _need(params, "body")
    return body_from_spec(params["body"])


def cmd_count(cfg):
    from .geometry import RigidMotion
    from .lattice import discrepancy
    p = cfg.params
    _need(p, "R")
    body = _get_body(p)
    rec = discrepancy(body, p["R"], RigidMotion(p["rot"], (p["tx"], p["ty"])))
    header = ["body", "R", "rot", "tx", "ty", "count", "area_term", "discrepancy"]
    rows = [[rec.body, rec.R, p["rot"], p["tx"], p["ty"], rec.count, rec.area_term, rec.value]]
    return header, rows, {"count": rec.count, "area_term": rec.area_term, "discrepancy": rec.value}


def cmd_disc(cfg):
    from .lattice import discrepancy_profile
    p = cfg.params
    _need(p, "R")
    body = _get_body(p)
    recs = discrepancy_profile(body, p["R"], p["n"], p["rot"], cfg.threads)
    header = ["body", "R", "rot", "tx", "ty", "count", "area_term", "discrepancy"]
    rows = [[r.body, r.R, p["rot"], r.motion.translation[0], r.motion.translation[1], r.count,
             r.area_term, r.value] for r in recs]
    vals = np.array([r.value for r in recs])
    return header, rows, {"mean": float(vals.mean()), "max_abs": float(np.abs(vals).max()),
                          "records": len(recs)}


def cmd_ft(cfg):
    from .fourier import DEFAULT_QUAD, spectral_sample
    p = cfg.params
    _need(p, "rho")
    body = _get_body(p)
    s = spectral_sample(body, p["rho"], p["theta"], p["method"])
    method = p["method"]
    if method == "auto":
        method = {"disc": "analytic", "polygon": "polygon"}.get(body.kind, "boundary")
    nodes = 0
    if method in ("boundary", "chord") and s.rho > 0:
        nodes = body.node_count(s.rho, DEFAULT_QUAD.nodes_per_wavelength, DEFAULT_QUAD.panel_order)
    out = {"rho": s.rho, "theta": s.theta, "re": s.value.real, "im": s.value.imag,
           "method": method, "nodes": int(nodes)}
    return None, None, out


def cmd_decay(cfg):
    from .decay import directional_decay_scan, dyadic_grid, spherical_decay
    p = cfg.params
    body = _get_body(p)
    a, b = int(round(math.log2(p["rho_min"]))), int(round(math.log2(p["rho_max"])))
    grid = dyadic_grid(a, b)
    if p["mode"] == "directional":
        theta = p["theta"]
        if theta is None:
            theta = getattr(body, "flat_normal", 0.0)
        fit = directional_decay_scan(body, theta, grid, seed=cfg.seed, threads=cfg.threads)
        extra = {"theta": theta}
    elif p["mode"] == "spherical":
        fit = spherical_decay(body, [p["p"]], grid, seed=cfg.seed, threads=cfg.threads)[p["p"]]
        extra = {"p": p["p"]}
    else:
        raise ConfigError(f"unknown decay mode {p['mode']!r} (key 'mode')")
    rows = [list(pt) for pt in fit.points]
    return ["rho", "value"], rows, {"fit": fit.as_dict(), **extra}


def cmd_norms(cfg):
    from .decay import fit_exponent
    from .norms import (l2_translation_parseval, lp_rotation_translation_norm,
                        lp_translation_norm)
    p = cfg.params
    _need(p, "R")
    body = _get_body(p)
    rows, ests = [], []
    for R in p["R"]:
        if p["method"] == "mc":
            est = lp_translation_norm(body, R, p["p"], p["samples"], cfg.seed, p["rot"], cfg.threads)
        elif p["method"] == "parseval":
            if p["p"] != 2:
                raise ConfigError("parseval method needs p = 2 (key 'p')")
            est = l2_translation_parseval(body, R, p["M"], cfg.threads)
        elif p["method"] == "rotation":
            n_rot = max(8, int(math.isqrt(p["samples"])))
            est = lp_rotation_translation_norm(body, R, p["p"], n_rot, max(1, p["samples"] // n_rot),
                                               cfg.seed, cfg.threads)
        else:
            raise ConfigError(f"unknown norms method {p['method']!r} (key 'method')")
        ests.append(est)
        rows.append([R, p["p"], est.method, est.value, est.stderr])
    summary = {"estimates": [e.as_dict() for e in ests]}
    if len(ests) >= 4:
        summary["fit"] = fit_exponent([[e.R, e.value] for e in ests]).as_dict()
    return ["R", "p", "method", "value", "stderr"], rows, summary


def cmd_hv(cfg):
    from .distribution import hardy_voronoi_partial
    p = cfg.params
    _need(p, "R")
    h = hardy_voronoi_partial(p["R"], p["K"])
    rows = [[h.R, h.K, h.partial, h.cesaro, h.target]]
    return ["R", "K", "partial", "cesaro", "target"], rows, {
        "partial": h.partial, "cesaro": h.cesaro, "target": h.target,
        "cesaro_error": abs(h.cesaro - h.target)}


def cmd_cassels(cfg):
    from .distribution import CasselsConfig, PointSet, cassels_check
    p = cfg.params
    ps = PointSet.make(p["pointset"], p["N"], cfg.seed)
    lhs, rhs, holds = cassels_check(ps, CasselsConfig(p["N"], p["L"], p["H"]))
    rows = [[p["N"], p["L"], p["H"], cfg.seed, lhs, rhs, holds]]
    return ["N", "L", "H", "seed", "lhs", "rhs", "holds"], rows, {"lhs": lhs, "rhs": rhs,
                                                                   "holds": holds}


def cmd_irreg(cfg):
    from .decay import fit_exponent
    from .distribution import PointSet, irregularities_experiment
    p = cfg.params
    rows = []
    for N in p["N"]:
        ps = PointSet.make(p["pointset"], N, cfg.seed)
        rows.append([N, irregularities_experiment(p["gamma"], ps, p["tau_nodes"], p["t_grid"])])
    summary = {"values": [{"N": n, "value": v} for n, v in rows]}
    if len(rows) >= 4:
        summary["fit"] = fit_exponent(rows).as_dict()
    return ["N", "value"], rows, summary


def cmd_selftest(cfg):
    report = selftest()
    rows = [[r["criterion"], r["passed"], r["detail"]] for r in report["criteria"]]
    return ["criterion", "passed", "detail"], rows, report


HANDLERS = {"count": cmd_count, "disc": cmd_disc, "ft": cmd_ft, "decay": cmd_decay,
            "norms": cmd_norms, "hv": cmd_hv, "cassels": cmd_cassels, "irreg": cmd_irreg,
            "selftest": cmd_selftest}


# ---------------------------------------------------------------------------
# selftest: the fast acceptance subset
# ---------------------------------------------------------------------------

def _check(name, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return {"criterion": name, "passed": bool(ok), "detail": detail}


def _st_counting():
    from .geometry import ConvexPolygon, Disc, RigidMotion, build_cgamma
    from .lattice import brute_force_count, count_integer_points
    rng = np.random.default_rng(0)
    bodies = [Disc(), ConvexPolygon.davenport_square(), build_cgamma(3)]
    bad = 0
    for i in range(60):
        b = bodies[i % 3]
        R = rng.uniform(1, 30)
        m = RigidMotion(rng.uniform(0, 2 * math.pi), tuple(rng.uniform(-0.5, 0.5, 2)))
        bad += count_integer_points(b, R, m) != brute_force_count(b, R, m)
    return bad == 0, f"{bad} mismatches in 60 cases"


def _st_ft_disc():
    from .fourier import ft_boundary_integral, ft_disc
    from .geometry import Disc, unit
    worst = 0.0
    for rho in (2.0, 5.0, 10.0, 50.0):
        for th in np.linspace(0, 2 * math.pi, 4, endpoint=False):
            ref = ft_disc(rho * unit(th))
            worst = max(worst, abs(ft_boundary_integral(Disc(), rho, th) - ref) / abs(ref))
    zero = abs(ft_disc(np.zeros(2)) - math.pi)
    return worst < 1e-8 and zero < 1e-12, f"max relative error {worst:.2e}"


def _st_kendall():
    from .geometry import Disc
    from .norms import l2_translation_parseval, lp_translation_norm
    mc = lp_translation_norm(Disc(), 10, 2, 20_000, seed=0)
    ps = l2_translation_parseval(Disc(), 10, 256)
    z = abs(mc.value - ps.extra["corrected"]) / mc.stderr
    return z < 3, f"|MC - Parseval| = {z:.2f} standard errors"


def _st_cassels():
    from .distribution import CasselsConfig, PointSet, cassels_check
    bad = 0
    for seed in range(10):
        ps = PointSet.uniform(64, seed)
        for L, H in ((4, 1), (9, 2), (16, 3)):
            bad += not cassels_check(ps, CasselsConfig(64, L, H))[2]
    return bad == 0, f"{bad} violations in 30 checks"


def _st_hv():
    from .distribution import hardy_voronoi_partial
    h = hardy_voronoi_partial(3.5, 10_000)
    return abs(h.cesaro - h.target) < 0.1, f"Cesaro {h.cesaro:.5f} vs target {h.target:.5f}"


def _st_determinism():
    from .geometry import build_cgamma
    from .norms import lp_translation_norm
    a = lp_translation_norm(build_cgamma(3), 20, 2, 2000, seed=5)
    b = lp_translation_norm(build_cgamma(3), 20, 2, 2000, seed=5)
    return a == b, "repeat run identical" if a == b else "repeat run differs"


SELFTEST = [("counting_exactness", _st_counting), ("ft_disc", _st_ft_disc),
            ("kendall_parseval", _st_kendall), ("cassels", _st_cassels),
            ("hardy_voronoi", _st_hv), ("determinism", _st_determinism)]


def run_selftest():
    return [_check(name, fn) for name, fn in SELFTEST]


def selftest():
    """Fast acceptance subset as a report dict."""
    results = run_selftest()
    return {"criteria": results, "all_passed": all(r["passed"] for r in results)}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _add_common(p, top):
    d = {} if top else {"default": argparse.SUPPRESS}
    p.add_argument("--config", help="JSON config file", **d)
    p.add_argument("--seed", type=int, help="random seed (default 0)", **d)
    p.add_argument("--threads", type=int, help="worker threads (default LATDISC_THREADS or 1)", **d)
    p.add_argument("--csv", help="write CSV here instead of stdout", **d)


def build_parser():
    ap = argparse.ArgumentParser(prog="latdisc", description="Lattice-point discrepancy laboratory.")
    _add_common(ap, True)
    ap.add_argument("--json", help="write the JSON summary here")
    sub = ap.add_subparsers(dest="command")
    for name, table in COMMANDS.items():
        sp = sub.add_parser(name)
        _add_common(sp, False)
        for key, (_, default, help_) in table.items():
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=key, default=None, help=f"{help_} (default {default})")
        if name == "selftest":
            sp.add_argument("--json", dest="selftest_json", action="store_true",
                            help="print a machine-readable report")
        else:
            sp.add_argument("--json", default=argparse.SUPPRESS, help="write the JSON summary here")
    return ap


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def resolve(args) -> ExperimentConfig:
    """Merge config file and flags into an ExperimentConfig (flags win)."""
    doc = _load_config(args.config) if args.config else {}
    command = args.command or doc.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"unknown or missing command {command!r} (key 'command')")
    if args.command and doc.get("command") not in (None, args.command):
        raise ConfigError("config 'command' disagrees with the command line (key 'command')")
    table = COMMANDS[command]
    unknown = set(doc) - GLOBAL_KEYS - set(table)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    params = {}
    for key, (conv, default, _) in table.items():
        raw = getattr(args, key, None)
        if raw is None:
            raw = doc.get(key)
        if raw is None:
            params[key] = default
            continue
        try:
            params[key] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for '{key}': {exc}") from None
    seed = args.seed
    if seed is None:
        seed = doc.get("seed", 0)
    threads = args.threads if args.threads is not None else doc.get("threads")
    return ExperimentConfig(command, params, int(seed), threads,
                            args.csv or doc.get("csv"), args.json or doc.get("json"),
                            body=params.get("body"))


def _summary(cfg, outputs):
    return {"schema": SCHEMA_VERSION, "command": cfg.command,
            "inputs": {"params": cfg.params, "seed": cfg.seed},
            "outputs": outputs,
            "versions": {"latdisc": _version(), "numpy": np.__version__,
                         "python": ".".join(map(str, sys.version_info[:3]))}}


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: ExperimentConfig, selftest_json=False) -> int:
    header, rows, outputs = HANDLERS[cfg.command](cfg)
    summary = _summary(cfg, outputs)
    if cfg.command == "ft":
        _emit(_json_text(outputs), cfg.csv_path)
    elif cfg.command == "selftest" and selftest_json:
        _emit(_json_text(summary), cfg.csv_path)
    elif cfg.command == "selftest":
        lines = [f"{'PASS' if r['passed'] else 'FAIL'} {r['criterion']}: {r['detail']}"
                 for r in outputs["criteria"]]
        _emit("\n".join(lines) + "\n", cfg.csv_path)
    else:
        _emit(_csv_text(header, rows), cfg.csv_path)
    if cfg.json_path:
        _emit(_json_text(summary), cfg.json_path)
    if cfg.command == "selftest" and not outputs["all_passed"]:
        return 1
    return 0


def _error(exc, code):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return run(cfg, getattr(args, "selftest_json", False))
    except LatdiscError as exc:
        return _error(exc, exc.exit_code)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
