"""Command-line entry point.

Every run prints one envelope holding the command with its full effective
config, plus a status word, the exit code and a result object. Rationals are always "p/q"
strings in json and csv output. Exit codes: 0 for a definitive answer, 2 when
the run gave up (Inconclusive, Unknown, BudgetExceeded), 1 for usage or input
errors.

Option values are resolved as built-in defaults, then the ZONALBOUND_BUDGET
environment variable (for --budget), then a --config JSON file, then flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction
from typing import Any, Callable, Optional

from . import codes, delsarte, hamming, preservers, psdcomp
from .errors import BudgetExceeded, InfeasibleCap, InvalidCode, ZonalBoundError
from .rational import fmt_q, parse_list, to_q

BUDGET_ENV = "ZONALBOUND_BUDGET"
GAVE_UP = {"Inconclusive", "Unknown", "BudgetExceeded"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def output_schema() -> dict:
    """The JSON schema every json-mode envelope validates against."""
    from importlib.resources import files

    return json.loads(files("zonalbound").joinpath("schema/cli_output.schema.json").read_text())


# --- serialization ---------------------------------------------------------

def jsonable(x: Any) -> Any:
    """Convert results to JSON-native values with rationals as strings."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, float):
        raise TypeError("floats are not allowed in machine-readable output")
    if isinstance(x, dict):
        return {fmt_q(k) if isinstance(k, Fraction) else str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (psdcomp.SymMatrix, psdcomp.PartialSymMatrix)):
        return psdcomp.matrix_to_json(x)
    if isinstance(x, delsarte.AngleSet):
        return [fmt_q(v) for v in x]
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


_RATIONAL = re.compile(r"^-?\d+/\d+$")


def _human_value(v: Any) -> str:
    if isinstance(v, str) and _RATIONAL.match(v):
        return f"{v} (≈ {float(Fraction(v)):.10g})"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return "null" if v is None else str(v)


def render(envelope: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if fmt == "human":
        lines = [f"command: {envelope['command']}"]
        lines += [f"config.{k}: {_human_value(v)}" for k, v in sorted(envelope["config"].items())]
        lines.append(f"status: {envelope['status']}")
        lines += [f"{k}: {_human_value(v)}" for k, v in sorted(envelope["result"].items())]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["#command", envelope["command"]])
    for k, v in sorted(envelope["config"].items()):
        w.writerow([f"#config.{k}", json.dumps(v) if isinstance(v, (dict, list)) else v])
    w.writerow(["#status", envelope["status"]])
    table = envelope["result"].get("table")
    if table:
        w.writerow(list(table[0].keys()))
        for row in table:
            w.writerow(list(row.values()))
    else:
        w.writerow(["key", "value"])
        for k, v in sorted(envelope["result"].items()):
            w.writerow([k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v])
    return buf.getvalue()


# --- argument parsing ------------------------------------------------------

def _angles(s):
    return [fmt_q(v) for v in parse_list(s)]


def _rational(s):
    return fmt_q(to_q(s))


def _pos_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


# name -> (type, default, help); default None means required unless stated
OPTIONS: dict[str, dict[str, tuple]] = {
    "bound": {
        "dim": (int, None, "sphere S^{dim-1} lives in R^dim"),
        "angles": (_angles, None, 'allowed inner products, e.g. "-1,-1/2,1/2"'),
        "degree": (_pos_int, "optional", "fixed degree cap"),
        "stabilize": ("flag", False, "raise the degree cap until gbar stabilizes"),
        "n_start": (_pos_int, "optional", "first cap of the stabilization schedule"),
        "n_step": (_pos_int, delsarte.DEFAULT_N_STEP, "cap increment"),
        "window": (_pos_int, delsarte.DEFAULT_WINDOW, "equal caps needed to stop"),
        "hard_cap": (_pos_int, delsarte.DEFAULT_HARD_CAP, "largest cap tried"),
    },
    "interval-bound": {
        "dim": (int, None, "ambient dimension"),
        "cos_theta": (_rational, None, "upper end of [-1, cos theta]"),
        "degree": (_pos_int, 8, "degree cap"),
        "grid": (_pos_int, 32, "initial grid size"),
        "retries": (_pos_int, 2, "grid refinements before the shifted fallback"),
    },
    "theta": {
        "dim": (int, None, "ambient dimension"),
        "t": (_rational, None, "inner product t in (-1, 1)"),
        "kmax": (_pos_int, 50, "largest degree scanned"),
    },
    "probe": {
        "dim": (int, None, "ambient dimension"),
        "angles": (_angles, None, "allowed inner products"),
        "budget": (_pos_int, codes.DEFAULT_BUDGET, "search node budget"),
    },
    "verify-code": {
        "dim": (int, None, "ambient dimension"),
        "gram": (str, None, "Gram matrix JSON file"),
        "angles": (_angles, "optional", "angle set; also reports sharpness against the bound"),
    },
    "complete": {
        "matrix": (str, None, "partial matrix JSON file"),
        "apply": (_angles, "optional", "polynomial coefficients applied entrywise first"),
    },
    "cube-pd": {
        "n": (_pos_int, None, "cube dimension"),
        "values": (_angles, None, "f at Hamming distance 0..n"),
    },
    "kraw-limit": {
        "j": (_pos_int, None, "Krawtchouk degree"),
        "u": (_rational, None, "limit point in [-1, 1]"),
        "n": (_pos_int, "optional", "single cube dimension"),
        "sweep": (str, "optional", 'range "start:stop:step" of dimensions (inclusive)'),
    },
    "cone": {
        "points": (_angles, None, "finite point set X (must contain 1)"),
        "target": (str, None, 'target values on X, or "auto:K" for the degree-K zonal function'),
        "gens": (str, None, '"auto:N" for degrees 0..N, or value lists separated by ";"'),
        "dim": (int, "optional", "dimension for auto generators"),
        "hull": ("flag", False, "require coefficients summing to 1"),
    },
    "fit-preserver": {
        "points": (_angles, None, "finite point set X (must contain 1)"),
        "values": (_angles, None, "function values on X"),
        "degree": (_pos_int, None, "polynomial degree D"),
    },
    "fuzz": {
        "coeffs": (_angles, None, "polynomial coefficients c_0, c_1, ..."),
        "trials": (_pos_int, 500, "number of random matrices"),
        "size": (_pos_int, 3, "matrix size"),
        "seed": (int, 42, "base seed"),
        "negative_control": ("flag", False, "allow negative coefficients"),
    },
}


def build_parser() -> _Parser:
    parser = _Parser(prog="zonalbound", description=__doc__.split("\n")[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, opts in OPTIONS.items():
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS, allow_abbrev=False)
        p.add_argument("--format", choices=("json", "csv", "human"))
        p.add_argument("--config", help="JSON file of option values (flags win)")
        for key, (typ, _default, help_) in opts.items():
            flag = "--" + key.replace("_", "-")
            if typ == "flag":
                p.add_argument(flag, dest=key, action="store_true", help=help_)
            else:
                p.add_argument(flag, dest=key, type=typ, help=help_)
    return parser


def resolve_config(command: str, given: dict) -> dict:
    opts = OPTIONS[command]
    cfg = {k: d for k, (_t, d, _h) in opts.items() if d not in (None, "optional")}
    cfg["format"] = "json"
    if "budget" in opts and os.environ.get(BUDGET_ENV):
        cfg["budget"] = _pos_int(os.environ[BUDGET_ENV])
    path = given.pop("config", None)
    if path is not None:
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        data.pop("command", None)
        for key, raw in data.items():
            key = key.replace("-", "_")
            if key == "format":
                cfg[key] = raw
                continue
            if key not in opts:
                raise UsageError(f"unknown config key {key!r} for {command}")
            typ = opts[key][0]
            cfg[key] = bool(raw) if typ == "flag" else typ(str(raw))
    cfg.update(given)
    if cfg["format"] not in ("json", "csv", "human"):
        raise UsageError(f"unknown format {cfg['format']!r}")
    missing = [k for k, (_t, d, _h) in opts.items() if d is None and k not in cfg]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return cfg


# --- command handlers ------------------------------------------------------

def _cert_fields(cert: delsarte.DelsarteCertificate) -> dict:
    out = {
        "dim": cert.n,
        "angles": cert.X,
        "degree_cap": cert.degree_cap,
        "gbar": cert.gbar,
        "bound_raw": cert.bound_raw,
        "bound_floor": cert.bound_floor,
        "coefficients": {str(k): f for k, f in zip(cert.degrees, cert.coeffs)},
        "residuals": cert.residuals,
    }
    for key in ("schedule", "stabilized", "stability_window", "certified", "certification", "attempts", "grid_size"):
        if key in cert.metadata:
            out[key] = cert.metadata[key]
    return out


def cmd_bound(cfg):
    if "degree" in cfg and cfg.get("stabilize"):
        raise UsageError("--degree and --stabilize are mutually exclusive")
    cfg["stabilize"] = "degree" not in cfg
    X = [to_q(a) for a in cfg["angles"]]
    if "degree" in cfg:
        try:
            cert = delsarte.delsarte_constant(cfg["dim"], X, cfg["degree"])
        except InfeasibleCap:
            return "Infeasible", {"bound_floor": None, "degree_cap": cfg["degree"]}
        return "Optimal", _cert_fields(cert)
    try:
        cert = delsarte.delsarte_bound(
            cfg["dim"], X, cfg.get("n_start"), cfg["n_step"], cfg["window"], cfg["hard_cap"]
        )
    except BudgetExceeded as exc:
        res = _cert_fields(exc.best) if exc.best is not None else {"bound_floor": None}
        res["reason"] = str(exc)
        return "BudgetExceeded", res
    return "Optimal", _cert_fields(cert)


def cmd_interval_bound(cfg):
    cert = delsarte.interval_delsarte(
        cfg["dim"], cfg["cos_theta"], cfg["degree"], grid=cfg["grid"], retries=cfg["retries"]
    )
    res = _cert_fields(cert)
    return ("Certified" if cert.metadata["certified"] else "Inconclusive"), res


def cmd_theta(cfg):
    r = delsarte.theta_min(cfg["dim"], cfg["t"], cfg["kmax"])
    res = {
        "min_value": r.m,
        "argmin_degree": r.k_argmin,
        "theta_ratio": r.theta_ratio,
        "tail_envelope": r.tail_envelope,
        "heuristic_cutoff": r.heuristic_cutoff,
    }
    return ("Captured" if r.status == "ok" else "Inconclusive"), res


def cmd_probe(cfg):
    v = codes.hallucination_probe(cfg["dim"], [to_q(a) for a in cfg["angles"]], budget=cfg["budget"])
    res = {"bound_floor": v.bound_floor, "search": v.search_stats}
    if v.certificate is not None:
        res["certificate"] = _cert_fields(v.certificate)
    if v.witness is not None:
        res["witness"] = v.witness.gram
    return v.outcome, res


def cmd_verify_code(cfg):
    with open(cfg["gram"]) as fh:
        gram = psdcomp.sym_from_json(json.load(fh))
    angles = cfg.get("angles")
    if angles is None:
        angles = sorted({gram[i, j] for i in range(gram.dim) for j in range(i + 1, gram.dim)})
    X = delsarte.AngleSet([to_q(a) for a in angles])
    cand = codes.GramCandidate(gram, X)
    ok = codes.realizable(cand, cfg["dim"])
    res = {"size": gram.dim, "psd": psdcomp.is_psd_exact(gram), "angles": X}
    if res["psd"]:
        res["rank"] = psdcomp.psd_rank(gram)
    if ok and "angles" in cfg:
        cert = delsarte.delsarte_bound(cfg["dim"], X)
        res["bound_floor"] = cert.bound_floor
        res["sharpness"] = delsarte.sharpness_verdict(cert, cand)
    return ("Realizable" if ok else "NotRealizable"), res


def cmd_complete(cfg):
    with open(cfg["matrix"]) as fh:
        P = psdcomp.partial_from_json(json.load(fh))
    res = {}
    if "apply" in cfg:
        P = psdcomp.apply_entrywise(P, [to_q(c) for c in cfg["apply"]])
        res["image"] = P
    r = psdcomp.complete_psd(P)
    res["method"] = r.method
    if r.witness is not None:
        res["witness"] = r.witness
    if r.certificate_indices is not None:
        res["certificate_indices"] = list(r.certificate_indices)
    return r.status, res


def cmd_cube_pd(cfg):
    f = hamming.CubeFunction(cfg["n"], [to_q(v) for v in cfg["values"]])
    pd, exp = hamming.is_pd_on_cube(f)
    return ("PositiveDefinite" if pd else "NotPositiveDefinite"), {"coefficients": list(exp.coefficients)}


ENVELOPE_CONSTANT = 10


def cmd_kraw_limit(cfg):
    if ("n" in cfg) == ("sweep" in cfg):
        raise UsageError("give exactly one of --n and --sweep")
    if "n" in cfg:
        ns = [cfg["n"]]
    else:
        try:
            start, stop, step = (int(p) for p in cfg["sweep"].split(":"))
        except ValueError:
            raise UsageError('--sweep expects "start:stop:step"') from None
        if start < 1 or step < 1:
            raise UsageError("--sweep needs positive start and step")
        ns = list(range(start, stop + 1, step))
    rows = hamming.convergence_table(cfg["j"], cfg["u"], ns)
    table = [
        {"n": n, "d": d, "scaled": s, "error": e, "n_times_error": n * e, "within_envelope": e <= Fraction(ENVELOPE_CONSTANT, n)}
        for n, d, s, e in rows
    ]
    res = {"table": table, "max_n_times_error": max(r["n_times_error"] for r in table)}
    return "Computed", res


def _values_or_auto(text: str, dim: Optional[int]):
    if text.startswith("auto:"):
        if dim is None:
            raise UsageError("auto generators need --dim")
        return ("auto", int(text[5:]))
    return [[to_q(v) for v in part.split(",") if v.strip()] for part in text.split(";") if part.strip()]


def cmd_cone(cfg):
    X = [to_q(p) for p in cfg["points"]]
    dim = cfg.get("dim")
    g = _values_or_auto(cfg["gens"], dim)
    if isinstance(g, tuple):
        gens = [preservers.gegenbauer_restriction(X, dim, k) for k in range(g[1] + 1)]
    else:
        gens = [preservers.FiniteFunction(X, vals) for vals in g]
    t = _values_or_auto(cfg["target"], dim)
    if isinstance(t, tuple):
        target = preservers.gegenbauer_restriction(X, dim, t[1])
    else:
        if len(t) != 1:
            raise UsageError("--target takes a single value list")
        target = preservers.FiniteFunction(X, t[0])
    fn = preservers.hull_membership if cfg["hull"] else preservers.cone_membership
    m = fn(target, gens)
    res = {"points": list(target.X)}
    if m.status == preservers.MEMBER:
        res["coefficients"] = m.coefficients
    else:
        res["farkas"] = m.certificate
    return m.status, res


def cmd_fit_preserver(cfg):
    f = preservers.FiniteFunction([to_q(p) for p in cfg["points"]], [to_q(v) for v in cfg["values"]])
    m = preservers.fit_preserver_form(f, cfg["degree"])
    res = {"points": list(f.X)}
    if m.status == preservers.MEMBER:
        form = preservers.form_from_fit(m)
        res.update(a=form.a, b=form.b, c=list(form.c))
    else:
        res["farkas"] = m.certificate
    return m.status, res


def cmd_fuzz(cfg):
    form = preservers.PreserverForm(0, 0, tuple(to_q(c) for c in cfg["coeffs"]))
    rep = preservers.preserver_fuzz(form, cfg["trials"], cfg["size"], cfg["seed"], cfg["negative_control"])
    res = {
        "trials": rep.trials,
        "completable": rep.completable,
        "unknown": rep.unknown,
        "violations": rep.violations,
    }
    if rep.first_violation is not None:
        fv = rep.first_violation
        res["first_violation"] = {
            "trial": fv["trial"],
            "input": fv["input"],
            "image": fv["image"],
            "certificate_indices": list(fv["certificate_indices"]),
        }
    return ("Violation" if rep.violations else "NoViolation"), res


HANDLERS: dict[str, Callable[[dict], tuple[str, dict]]] = {
    "bound": cmd_bound,
    "interval-bound": cmd_interval_bound,
    "theta": cmd_theta,
    "probe": cmd_probe,
    "verify-code": cmd_verify_code,
    "complete": cmd_complete,
    "cube-pd": cmd_cube_pd,
    "kraw-limit": cmd_kraw_limit,
    "cone": cmd_cone,
    "fit-preserver": cmd_fit_preserver,
    "fuzz": cmd_fuzz,
}


_NEGATIVE_VALUE = re.compile(r"^[-−][\d/,;:\s−-]*$")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse mistakes "-1,-1/2" for an option; attach such values to their flag
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
            and _NEGATIVE_VALUE.match(argv[i + 1])
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def dispatch(argv: list[str]) -> tuple[int, str, str]:
    """Run one command; returns (exit code, stdout text, stderr text)."""
    try:
        ns = build_parser().parse_args(_glue_negative_values(list(argv)))
        if ns.command is None:
            raise UsageError("a subcommand is required\n" + build_parser().format_usage())
        given = {k: v for k, v in vars(ns).items() if k != "command"}
        cfg = resolve_config(ns.command, given)
        status, result = HANDLERS[ns.command](cfg)
    except UsageError as exc:
        return 1, "", f"usage error: {exc}\n"
    except (ZonalBoundError, InvalidCode, ValueError, TypeError, OSError, KeyError) as exc:
        return 1, "", f"input error: {exc}\n"
    code = 2 if status in GAVE_UP else 0
    fmt = cfg.pop("format")
    envelope = {
        "command": ns.command,
        "config": jsonable(cfg),
        "status": status,
        "exit_code": code,
        "result": jsonable(result),
    }
    return code, render(envelope, fmt), ""


def main(argv: Optional[list[str]] = None) -> int:
    code, out, err = dispatch(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
