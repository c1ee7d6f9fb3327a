"""Command-line runner: one JSON config in, one report out.

Usage::

    cflevels --config run.json [--out report.json] [--seed N] [--threads T]

Exit codes: 0 success, 1 config error, 2 refusal (budget or hypothesis gate),
3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
import traceback
from dataclasses import replace
from fractions import Fraction

import jsonschema
import numpy as np

from . import __version__
from . import constructions, dimension, growth, verify
from .cf import digit_stats
from .errors import BudgetExceeded, RefusalError

EXIT_OK, EXIT_CONFIG, EXIT_REFUSAL, EXIT_INTERNAL = 0, 1, 2, 3
COMMANDS = ("classify", "dim", "construct", "verify", "pressure")

_NUM = {"type": ["number", "string"]}
_POS_INT = {"type": "integer", "minimum": 1}

_PHI = {
    "type": "object",
    "properties": {
        "family": {"enum": list(growth.FAMILIES)},
        "params": {"type": "object"},
        "scale": _NUM,
    },
    "required": ["family"],
    "additionalProperties": False,
}

_PRESSURE = {
    "type": "object",
    "properties": {
        "B": _NUM,
        "M": {"type": ["integer", "null"], "minimum": 1},
        "depth": _POS_INT,
        "method": {"enum": list(dimension.METHODS)},
        "collocation_order": {"type": "integer", "minimum": 8},
        "weight": {"enum": list(dimension.WEIGHTS)},
        "min_depth": _POS_INT,
    },
    "additionalProperties": False,
}

_HINTS = {
    "type": "object",
    "properties": {name: {"type": ["number", "string", "null"]} for name in growth.AsymptoticHints.FIELDS},
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "threads": _POS_INT,
        "budgets": {
            "type": "object",
            "properties": {"max_depth": _POS_INT, "max_words": _POS_INT, "max_digits": _POS_INT},
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"path": {"type": "string"}, "format": {"enum": ["json", "csv"]}},
            "additionalProperties": False,
        },
        "classify": {
            "type": "object",
            "properties": {
                "phi": _PHI,
                "window": {
                    "type": "object",
                    "properties": {"n_lo": _POS_INT, "n_hi": _POS_INT},
                    "required": ["n_hi"],
                    "additionalProperties": False,
                },
                "hints": {"oneOf": [{"enum": ["family", "none"]}, _HINTS]},
            },
            "required": ["phi", "window"],
            "additionalProperties": False,
        },
        "dim": {
            "type": "object",
            "properties": {
                "mode": {"enum": ["solve", "ww", "flww", "lr", "cv_gap"]},
                "pressure": _PRESSURE,
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "bracket": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "B": _NUM,
                "b": _NUM,
                "s_seq": _PHI,
                "log_t_minus_one": {"type": "number"},
                "depth": _POS_INT,
                "limit_hint": {"type": "number"},
                "alpha": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            },
            "required": ["mode"],
            "additionalProperties": False,
        },
        "construct": {
            "type": "object",
            "properties": {
                "kind": {"enum": list(constructions.KINDS)},
                "params": {"type": "object"},
                "policy": {"enum": list(constructions.POLICIES)},
                "seed": {"type": "integer", "minimum": 0},
                "n": _POS_INT,
                "deletion_epsilon": {"type": "number", "minimum": 0},
            },
            "required": ["kind", "params", "n"],
            "additionalProperties": False,
        },
        "verify": {
            "type": "object",
            "properties": {
                "check": {"enum": ["ratio_bounds", "comparison", "interval_bounds", "cf_algebra"]},
                "max_len": _POS_INT,
                "max_digit": _POS_INT,
                "count": _POS_INT,
                "n_max": {"type": "integer", "minimum": 2},
                "digit_max": {"type": "integer", "minimum": 2},
            },
            "required": ["check"],
            "additionalProperties": False,
        },
        "pressure": {
            "type": "object",
            "properties": {"config": _PRESSURE, "s": {"type": "number", "minimum": 0}},
            "required": ["config", "s"],
            "additionalProperties": False,
        },
    },
    "required": ["command"],
    "additionalProperties": False,
    "allOf": [{"if": {"properties": {"command": {"const": c}}}, "then": {"required": [c]}}
              for c in COMMANDS],
}


class ConfigError(Exception):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = errors


def validate_config(config: dict) -> None:
    """Raise ConfigError listing every offending field."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError([f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}" for e in errors])
    extra = set(config) - {"command", "seed", "threads", "budgets", "output", config["command"]}
    if extra:
        raise ConfigError([f"{name}: not used by command {config['command']!r}" for name in sorted(extra)])


def _params(raw):
    """JSON numbers plus rational strings such as ``"1/2"``."""
    out = {}
    for k, v in raw.items():
        if isinstance(v, str) and k not in ("family",):
            try:
                v = Fraction(v)
                v = int(v) if v.denominator == 1 else v
            except ValueError:
                pass
        out[k] = v
    return out


def _phi(raw):
    return growth.GrowthSequence.from_json({**raw, "params": _params(raw.get("params", {}))})


def _pressure_cfg(raw, budgets, threads):
    kw = dict(raw)
    if "B" in kw:
        kw["B"] = dimension.parse_extended(kw["B"], "B")
    if "max_words" in budgets:
        kw["max_words"] = budgets["max_words"]
    cfg = dimension.PressureConfig(**kw, threads=threads)
    if "max_depth" in budgets and cfg.depth > budgets["max_depth"]:
        raise BudgetExceeded("max_depth", f"depth={cfg.depth} exceeds max_depth={budgets['max_depth']}")
    return cfg


def _series_log_phi(seq, n_lo, n_hi, points=200):
    ns = np.unique(np.geomspace(n_lo, n_hi, num=min(points, n_hi - n_lo + 1)).round().astype(np.int64))
    return [(int(n), float(v)) for n, v in zip(ns, seq.log_phi_array(ns))]


# ---------------------------------------------------------------------------
# commands; each returns (result dict, csv header, csv rows)


def run_classify(cfg, seed, threads, budgets):
    c = cfg["classify"]
    seq = _phi(c["phi"])
    n_lo, n_hi = c["window"].get("n_lo", 1), c["window"]["n_hi"]
    if n_lo > n_hi:
        raise ValueError(f"window n_lo={n_lo} > n_hi={n_hi}")
    hints_cfg = c.get("hints", "family")
    if hints_cfg == "family":
        hints = seq.hints()
    elif hints_cfg == "none":
        hints = None
    else:
        vals = {k: (dimension.parse_extended(v, k) if v is not None else None) for k, v in hints_cfg.items()}
        hints = growth.AsymptoticHints(**{f: vals.get(f) for f in growth.AsymptoticHints.FIELDS},
                                       source="config")
    report = growth.growth_exponents(seq, n_lo, n_hi)
    verdict = growth.classify_necessary(report, hints)
    result = {"phi": seq.to_json(), "exponents": report.to_json(), "verdict": verdict.to_json(),
              "hints": hints.to_json() if hints is not None else None}
    return result, ("n", "value"), _series_log_phi(seq, n_lo, n_hi)


def run_dim(cfg, seed, threads, budgets):
    c = cfg["dim"]
    mode = c["mode"]
    tol = c.get("tol", dimension.DEFAULT_TOL)
    if mode == "solve":
        pcfg = _pressure_cfg(c.get("pressure", {}), budgets, threads)
        est = dimension.solve_root(pcfg, tol, tuple(c["bracket"]) if "bracket" in c else None)
        return {"estimate": est.to_json()}, ("depth", "root", "bracket_lo", "bracket_hi"), est.csv_rows()
    if mode == "ww":
        if "B" not in c:
            raise ValueError("dim/ww needs B")
        solver = _pressure_cfg(c["pressure"], budgets, threads) if "pressure" in c else None
        est = dimension.ww_dimension(c["B"], c.get("b"), solver, tol)
        return {"estimate": est.to_json()}, ("depth", "root", "bracket_lo", "bracket_hi"), est.csv_rows()
    if mode in ("flww", "lr"):
        if "s_seq" not in c or "depth" not in c:
            raise ValueError(f"dim/{mode} needs s_seq and depth")
        seq = _phi(c["s_seq"])
        if mode == "flww":
            est = dimension.flww_dimension(seq, c["depth"], c.get("limit_hint"))
        else:
            log_t = c.get("log_t_minus_one")
            if log_t is None:
                raise ValueError("dim/lr needs log_t_minus_one")
            est = dimension.lr_dimension(seq, [log_t] * c["depth"], c["depth"], c.get("limit_hint"))
        rows = [(r["n"], r["value"]) for r in est.extrapolation]
        return {"estimate": est.to_json()}, ("n", "value"), rows
    alphas = c.get("alpha", list(range(11)))
    rows = [(a, dimension.cv_gap(a)) for a in alphas]
    return {"cv_gap": [{"alpha": a, "value": v} for a, v in rows]}, ("n", "value"), rows


def run_construct(cfg, seed, threads, budgets):
    c = cfg["construct"]
    params = _params(c["params"])
    if "phi" in params:
        params["phi"] = _phi(params["phi"]).to_json()
    policy = c.get("policy", "all_ones")
    spec = constructions.ConstructionSpec(c["kind"], params, policy,
                                          c.get("seed", seed) if policy == "random_uniform" else None)
    max_digits = budgets.get("max_digits", constructions.DEFAULT_MAX_DIGITS)
    pw = constructions.generate(spec, c["n"], max_digits=max_digits)
    stats = digit_stats(pw.word)
    result = {"spec": {**spec.to_json(), "params": c["params"]}, "word": pw.to_json(),
              "s_n": str(stats.s[-1]), "t_max": str(stats.t_max[-1])}
    if "deletion_epsilon" in c:
        result["deletion"] = verify.check_deletion_inequality(pw, c["deletion_epsilon"]).to_json()
    rows = [(i, str(a)) for i, a in enumerate(pw.word, 1)]
    return result, ("n", "value"), rows


def run_verify(cfg, seed, threads, budgets):
    c = cfg["verify"]
    check = c["check"]
    if check == "ratio_bounds":
        rep = verify.sweep_ratio_bounds(c.get("max_len", 5), c.get("max_digit", 3), threads, keep=True)
        reports = {"ratio_bounds": rep}
    elif check == "cf_algebra":
        rep = verify.sweep_cf_algebra(c.get("max_len", 8), c.get("max_digit", 4), threads, keep=True)
        reports = {"cf_algebra": rep}
    elif check == "interval_bounds":
        rep = verify.SweepReport("interval_bounds", {"max_len": c.get("max_len", 8),
                                                     "max_digit": c.get("max_digit", 4)})
        for n in range(1, c.get("max_len", 8) + 1):
            for w in verify.iter_words(n, c.get("max_digit", 4)):
                rep.add(verify.check_interval_bounds(w), keep=True)
        reports = {"interval_bounds": rep}
    else:
        reports = verify.sweep_comparison(c.get("count", 1000), seed, c.get("n_max", 20),
                                          c.get("digit_max", 8), keep=True)
    result = {name: r.to_json() for name, r in reports.items()}
    rows = []
    for r in reports.values():
        rows += [(i, x.hypothesis_satisfied, x.conclusion_holds, verify._jsonable(x.margin))
                 for i, x in enumerate(r.reports, len(rows))]
    if any(r.counterexamples for r in reports.values()):
        result["counterexamples_found"] = True
    return result, ("instance_id", "hypothesis", "conclusion", "margin"), rows


def run_pressure(cfg, seed, threads, budgets):
    c = cfg["pressure"]
    pcfg = _pressure_cfg(c["config"], budgets, threads)
    s = float(c["s"])
    value = dimension.pressure(s, pcfg)
    rows = []
    if pcfg.method == "cylinder_sum":
        logs = dimension.log_partition_sums(s, pcfg)
        rows = [(k, float(z / k - s * pcfg.log_B)) for k, z in enumerate(logs, 1)]
    return {"s": s, "pressure": value, "config": pcfg.to_json()}, ("n", "value"), rows


RUNNERS = {"classify": run_classify, "dim": run_dim, "construct": run_construct,
           "verify": run_verify, "pressure": run_pressure}


# ---------------------------------------------------------------------------
# output


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, int):
        return str(x)
    return str(x)


def _clean(x):
    """Non-finite floats as strings and very large ints as decimal strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int) and abs(x) >= 2**53:
        return str(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def dumps_report(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, default=_json_default, allow_nan=False) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_clean(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(config: dict, seed: int | None = None, threads: int | None = None):
    """Execute one configured run. Returns ``(exit_code, report, csv_text)``."""
    start = time.perf_counter()
    report = {"tool": "cflevels", "version": __version__, "config": config}
    csv_text = None
    try:
        validate_config(config)
        seed = seed if seed is not None else config.get("seed", 0)
        threads = threads if threads is not None else config.get("threads", 1)
        report["seed"] = seed
        result, header, rows = RUNNERS[config["command"]](config, seed, threads, config.get("budgets", {}))
        report.update(status="ok", result=result)
        csv_text = _csv_text(header, rows)
        code = EXIT_OK
    except ConfigError as exc:
        report.update(status="config_error", errors=exc.errors)
        code = EXIT_CONFIG
    except RefusalError as exc:
        report.update(status="refused", refusal={"gate": exc.gate, "message": exc.message})
        code = EXIT_REFUSAL
    except (ValueError, TypeError, KeyError) as exc:
        report.update(status="config_error", errors=[f"{type(exc).__name__}: {exc}"])
        code = EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        report.update(status="internal_error", error=f"{type(exc).__name__}: {exc}",
                      traceback=traceback.format_exc())
        code = EXIT_INTERNAL
    report["wall_time"] = time.perf_counter() - start
    return code, report, csv_text


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cflevels", description="Continued-fraction level-set experiments.")
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="report path (overrides output.path)")
    parser.add_argument("--seed", type=int, help="64-bit seed (overrides config seed)")
    parser.add_argument("--threads", type=int, help="worker threads (overrides config threads)")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise ValueError("config must be a JSON object")
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("config error: --seed must be a 64-bit unsigned integer", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads is not None and args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    code, report, csv_text = run(config, args.seed, args.threads)
    output = config.get("output", {}) if isinstance(config.get("output"), dict) else {}
    path = args.out or output.get("path")
    fmt = output.get("format", "json")
    text = dumps_report(report)
    if path:
        if fmt == "csv" and csv_text is not None:
            write_atomic(path, csv_text)
            write_atomic(path + ".json", text)
        else:
            write_atomic(path, text)
    else:
        sys.stdout.write(text)
    if code == EXIT_CONFIG:
        for err in report.get("errors", []):
            print(f"config error: {err}", file=sys.stderr)
    elif code == EXIT_REFUSAL:
        print(f"refused at gate {report['refusal']['gate']}: {report['refusal']['message']}", file=sys.stderr)
    elif code == EXIT_INTERNAL:
        print(report["error"], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
