"""Command-line entry point: ``oppenheim <command> [options]``.

Every run prints (or writes) a JSON run record with ``"schema": 1``, the
merged configuration, the seed and a command-specific payload.  Options may
come from a JSON config file (``--config``); flags given on the command line
win.  Exit status: 0 ok, 1 violated precondition, 2 parse error, 3 partial
result because the budget ran out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import Undecided, Violation
from .forms import PadicForm, QuadraticForm, rationality_test
from .scalars import QuadExt, Real, format_scalar, mode_label, parse_scalar

SCHEMA = 1
EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_PARTIAL = 0, 1, 2, 3


class ParseError(Exception):
    pass


# numbers with their arithmetic mode ----------------------------------------------------

def num(x):
    """A JSON-ready number tagged with how it was computed."""
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, np.integer)):
        return {"value": int(x), "mode": "exact"}
    if isinstance(x, (Fraction, QuadExt)):
        return {"value": format_scalar(x), "float": float(x), "mode": "exact"}
    if isinstance(x, Real):
        return {"value": format_scalar(x), "float": float(x), "mode": mode_label(x)}
    if isinstance(x, (float, np.floating)):
        return {"value": float(x), "mode": "float-53"}
    raise TypeError(f"cannot annotate {type(x).__name__}")


def vec(x):
    return [int(v) for v in x]


# form specifications -------------------------------------------------------------------

PRESETS = {
    "lorentz": lambda n: QuadraticForm.diag(*([1] * (n - 1) + [-1])),
    "sqrt2": lambda n: QuadraticForm.diag(*([1] * (n - 1) + [-QuadExt.sqrt(2)])),
    "hyperbolic": lambda n: QuadraticForm(((0, 1), (1, 0))),
}


def load_form(spec: str, n: int = 3, prec: int = 256) -> QuadraticForm:
    """A form from a file path, a preset name, ``diag:a,b,c`` or rows split by ``;``."""
    try:
        if spec in PRESETS:
            return PRESETS[spec](n)
        if spec.startswith("diag:"):
            return QuadraticForm.diag(*(parse_scalar(c, prec) for c in spec[5:].split(",")))
        if os.path.exists(spec):
            with open(spec) as fh:
                return QuadraticForm.parse(fh.read(), prec)
        return QuadraticForm.parse(spec.replace(";", "\n"), prec)
    except Violation:
        raise
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"form {spec!r}: {exc}") from exc


def _to_int(v) -> int:
    """int from 12, "12" or "1e4" (integral values only)."""
    try:
        return int(v)
    except (TypeError, ValueError):
        f = float(v)
        if not f.is_integer():
            raise ValueError(f"expected an integer, got {v!r}") from None
        return int(f)


def _parse_list(text, kind=_to_int):
    if isinstance(text, (list, tuple)):
        return [kind(v) for v in text]
    try:
        return [kind(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


# argument handling ---------------------------------------------------------------------

COMMON = {"seed": 0, "output": None, "format": "json", "max_radius": 512,
          "max_evals": 500_000_000, "config": None}

COMMANDS = {
    "values": {"form": None, "eps": "1e-2", "mode": "small", "target": None,
               "strict": True},
    "count": {"form": None, "a": "1", "b": "2", "r": "16,32,64,128", "primitive": False,
              "samples": 5},
    "rationality": {"form": None, "bound": 10**6},
    "counterexample": {"theta": "1+sqrt2", "N": "10000"},
    "flow": {"mode": "horocycle", "T": 1e4, "dt": 0.05, "haar_samples": 100_000,
             "degree": 2, "trials": 10_000, "form": "lorentz", "t_max": 20.0},
    "lie": {"n": 3, "form": "lorentz", "trials": 20},
    "sintegral": {"form": None, "form_p": None, "p": 7, "e": 0, "eps_inf": "0.1",
                  "eps_p": "0.5"},
}


def _add_flags(sp, keys):
    for key in keys:
        flag = "--" + key.replace("_", "-")
        if key in ("strict", "primitive"):
            sp.add_argument(flag, dest=key, action=argparse.BooleanOptionalAction, default=None)
        else:
            sp.add_argument(flag, dest=key, default=None)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oppenheim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, keys in COMMANDS.items():
        sp = sub.add_parser(name)
        _add_flags(sp, list(COMMON) + list(keys))
    return p


_INTS = {"seed", "max_radius", "max_evals", "bound", "samples", "haar_samples", "degree",
         "trials", "n", "p", "e"}
_FLOATS = {"T", "dt", "t_max"}


def merge_config(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cmd = args.command
    allowed = {**COMMON, **COMMANDS[cmd]}
    cfg = dict(allowed)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"config {args.config!r}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError("config file must hold a JSON object")
        data = {k: v for k, v in data.items() if k != "command" or v == cmd}
        unknown = sorted(set(data) - set(allowed))
        if unknown:
            raise ParseError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
    for key in allowed:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    try:
        for key in _INTS & set(cfg):
            cfg[key] = _to_int(cfg[key])
        for key in _FLOATS & set(cfg):
            cfg[key] = float(cfg[key])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if cfg["format"] not in ("json", "csv"):
        raise ParseError("format must be json or csv")
    cfg["command"] = cmd
    cfg.pop("config", None)
    return cfg


def _budget(cfg):
    from .search import SearchBudget
    return SearchBudget(max_radius=cfg["max_radius"], max_evals=cfg["max_evals"],
                        seed=cfg["seed"])


def _need_form(cfg, n=3):
    if not cfg.get("form"):
        raise ParseError("--form is required")
    return load_form(str(cfg["form"]), n)


def _scalar(text):
    try:
        return parse_scalar(str(text))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


# commands -------------------------------------------------------------------------------
# each returns (payload, csv rows or None, exit status)

def cmd_values(cfg):
    from .search import (approx_value, find_small_value, pair_difference_search,
                         sign_profile, small_value_sweep)
    F = _need_form(cfg)
    eps = _scalar(cfg["eps"])
    budget = _budget(cfg)
    mode = cfg["mode"]
    if mode == "small":
        hit = find_small_value(F, eps, budget, strict_nonzero=bool(cfg["strict"]))
        if hit is None:
            return {"status": "none_found"}, None, EXIT_OK
        return ({"status": "found", "x": vec(hit.x), "value": num(hit.value)},
                [["x", "value"], [" ".join(map(str, hit.x)), format_scalar(hit.value)]],
                EXIT_OK)
    if mode == "approx":
        if cfg["target"] is None:
            raise ParseError("--target is required for mode approx")
        hit = approx_value(F, _scalar(cfg["target"]), eps, budget)
        if hit is None:
            return {"status": "none_found"}, None, EXIT_OK
        return {"status": "found", "x": vec(hit.x), "value": num(hit.value)}, None, EXIT_OK
    if mode == "sweep":
        hits = small_value_sweep(F, eps, budget) or []
        pos, neg = sign_profile(hits, eps)
        rows = [["x", "value"]] + [[" ".join(map(str, h.x)), format_scalar(h.value)]
                                   for h in hits]
        return ({"status": "found" if hits else "none_found", "count": len(hits),
                 "positive": pos, "negative": neg,
                 "hits": [{"x": vec(h.x), "value": num(h.value)} for h in hits]},
                rows, EXIT_OK)
    if mode == "pair":
        out = pair_difference_search(F, eps, budget)
        if out is None:
            return {"status": "none_found"}, None, EXIT_OK
        x, y, d = out
        return {"status": "found", "x": vec(x), "y": vec(y), "difference": num(d)}, None, EXIT_OK
    raise ParseError(f"unknown values mode {mode!r}")


def cmd_count(cfg):
    from .search import BandQuery, enumerate_band
    F = _need_form(cfg)
    a, b = _scalar(cfg["a"]), _scalar(cfg["b"])
    radii = _parse_list(cfg["r"])
    series = []
    partial = False
    budget = _budget(cfg)
    for r in radii:
        try:
            q = BandQuery(a, b, r, primitive_only=bool(cfg["primitive"]))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
        res = enumerate_band(F, q, sample_size=int(cfg["samples"]), budget=budget)
        partial |= res.partial
        series.append({"r": r, "count": res.count, "partial": res.partial,
                       "samples": [vec(s) for s in res.samples]})
    ratios = [num(Fraction(s2["count"], s1["count"])) if s1["count"] else None
              for s1, s2 in zip(series, series[1:])]
    growth = [Fraction(s["count"], s["r"] ** (F.n - 2)) for s in series if s["r"] > 0]
    payload = {"series": series, "ratios": ratios,
               "min_count_over_r_power": num(min(growth)) if growth else None,
               "exponent": F.n - 2}
    rows = [["r", "count", "partial"]] + [[s["r"], s["count"], int(s["partial"])]
                                          for s in series]
    return payload, rows, EXIT_PARTIAL if partial else EXIT_OK


def cmd_rationality(cfg):
    F = _need_form(cfg)
    try:
        v = rationality_test(F, bound=int(cfg["bound"]))
    except Undecided as exc:
        return {"tag": "Undecided", "diagnostics": exc.diagnostics}, None, EXIT_OK
    payload = {"tag": v.tag, "reference": list(v.reference) if v.reference else None,
               "diagnostics": {k: (num(x) if isinstance(x, (float, int, Fraction)) else x)
                               for k, x in v.diagnostics.items()}}
    if v.is_rational:
        payload["scale"] = num(v.scale)
        payload["integer_form"] = [list(r) for r in v.integer_form]
    if v.witness is not None:
        payload["witness"] = list(v.witness)
        payload["witness_ratio"] = num(v.witness_ratio)
    return payload, None, EXIT_OK


def cmd_counterexample(cfg):
    from .diophantine import QuadraticIrrational, counterexample_min
    try:
        theta = QuadraticIrrational.parse(str(cfg["theta"]))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    results = [counterexample_min(theta, N) for N in _parse_list(cfg["N"])]
    series = [{"N": r.N, "minimum": num(r.minimum), "argmin": list(r.argmin),
               "c_N": num(r.c_N), "certified_bound": num(r.certified_bound)}
              for r in results]
    rows = [["N", "minimum", "minimum_float", "certified_bound"]] + [
        [r.N, format_scalar(r.minimum), f"{float(r.minimum):.17g}",
         f"{float(r.certified_bound):.17g}"] for r in results]
    payload = {"theta": str(theta), "series": series,
               "asymptotic_constant": num(results[-1].classical_constant)}
    return payload, rows, EXIT_OK


def cmd_flow(cfg):
    from . import flows
    mode = cfg["mode"]
    T, dt, seed = cfg["T"], cfg["dt"], cfg["seed"]
    if mode == "horocycle":
        x0 = flows.generic_start_sl2()
        f = flows.EXP_INV_SHORTEST
        series = flows.flow_orbit(x0, flows.horocycle(), T, dt, [f])
        haar = flows.haar_sample_sl2(int(cfg["haar_samples"]), seed)
        gap = flows.equidistribution_gap(series, haar, f, seed=seed)
        payload = {"observable": f.name, "gap": num(gap.gap),
                   "time_average": num(gap.time_average),
                   "haar_average": num(gap.space_average),
                   "haar_stderr": num(gap.space_stderr),
                   "haar_ci95": [num(v) for v in gap.space_ci95], "samples": len(series.times)}
        # control: the orbit of Z^2 is closed with period 1
        z2 = flows.LatticePoint.standard(2)
        ctrl = flows.flow_orbit(z2, flows.horocycle(), T, dt, [f])
        c_avg = float(ctrl.running[f.name][-1])
        exact = flows.period_average(z2, flows.horocycle(), 1.0, f)
        payload["closed_control"] = {"time_average": num(c_avg),
                                     "gap_vs_haar": num(abs(c_avg - gap.space_average)),
                                     "period_average": num(exact),
                                     "gap_vs_period_average": num(abs(c_avg - exact))}
        rows = [["t", f.name, "running_avg"]] + [
            [f"{t:.12g}", f"{v:.17g}", f"{r:.17g}"]
            for t, v, r in zip(series.times, series.values[f.name], series.running[f.name])]
        return payload, rows, EXIT_OK
    if mode == "geodesic":
        x0 = flows.LatticePoint.standard(2)
        series = flows.flow_orbit(x0, flows.geodesic(), cfg["t_max"], dt, [flows.SHORTEST])
        l1 = series.values["l1"]
        err = np.abs(l1 - np.exp(-series.times))
        payload = {"max_abs_error": num(float(err.max())), "t_max": num(cfg["t_max"])}
        rows = [["t", "l1", "exp(-t)"]] + [[f"{t:.12g}", f"{v:.17g}", f"{math.exp(-t):.17g}"]
                                           for t, v in zip(series.times, l1)]
        return payload, rows, EXIT_OK
    if mode == "so-orbit":
        F = load_form(str(cfg["form"]), 3)
        res = flows.so_orbit_scan(F, flows.LatticePoint.standard(3), T, dt, seed=seed)
        payload = {"verdict": res.verdict, "min_l1": num(res.min_l1) if res.min_l1 else None,
                   "l1_start": num(res.l1_start),
                   "occupancy": num(res.occupancy) if res.occupancy is not None else None,
                   "steps": res.steps, "projected": res.projected,
                   "histogram": res.histogram.tolist(), "thresholds": res.thresholds}
        return payload, None, EXIT_OK
    if mode == "eta":
        est = flows.poly_divergence_eta(int(cfg["degree"]), trials=int(cfg["trials"]), seed=seed)
        payload = {"degree": est.n, "eta": num(est.eta), "eta_random": num(est.eta_random),
                   "eta_chebyshev": num(est.eta_chebyshev),
                   "eta_optimized": num(est.eta_optimized),
                   "worst": [num(c) for c in est.worst]}
        return payload, None, EXIT_OK
    raise ParseError(f"unknown flow mode {mode!r}")


def cmd_lie(cfg):
    from .lie import counterexample_sl2, full_report
    n = int(cfg["n"])
    F = load_form(str(cfg["form"]), n)
    report = full_report(F, trials=int(cfg["trials"]), seed=cfg["seed"])
    ce = counterexample_sl2()
    report["sl2_counterexample"] = {"status": ce.ok, "dimensions": list(ce.dims),
                                    "witness": {k: v for k, v in ce.__dict__.items()
                                                if isinstance(v, bool)}}
    status = EXIT_OK if report["all_passed"] and ce.ok else EXIT_VIOLATION
    return report, None, status


def cmd_sintegral(cfg):
    from .search import SIntegerContext, s_integer_small_value
    F = _need_form(cfg)
    try:
        ctx = SIntegerContext(int(cfg["p"]), int(cfg["e"]), float(cfg["eps_inf"]),
                              float(cfg["eps_p"]))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    # the p-adic place may use its own rational form; default: the real one
    Fp = PadicForm.from_form(load_form(str(cfg["form_p"]), F.n) if cfg["form_p"] else F, ctx.p)
    hit = s_integer_small_value(F, Fp, ctx, _budget(cfg))
    if hit is None:
        return {"status": "none_found"}, None, EXIT_OK
    return ({"status": "found", "x": [num(c) for c in hit.x], "v": vec(hit.v), "e": hit.e,
             "real_abs": num(hit.real_abs), "padic_abs": num(hit.padic_abs)}, None, EXIT_OK)


HANDLERS = {"values": cmd_values, "count": cmd_count, "rationality": cmd_rationality,
            "counterexample": cmd_counterexample, "flow": cmd_flow, "lie": cmd_lie,
            "sintegral": cmd_sintegral}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str)


def run(cfg: dict):
    """Execute one merged config; returns (record, csv rows, exit status)."""
    t0 = time.perf_counter()
    payload, rows, status = HANDLERS[cfg["command"]](cfg)
    record = {"schema": SCHEMA, "tool": "oppenheim", "version": __version__,
              "command": cfg["command"], "seed": cfg["seed"],
              "config": {k: v for k, v in cfg.items() if k != "output"},
              "payload": payload, "wall_time_s": round(time.perf_counter() - t0, 6)}
    return record, rows, status


def _emit(cfg, record, rows, out):
    if cfg["format"] == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"# seed={cfg['seed']} command={cfg['command']} schema={SCHEMA}"])
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = dumps(record) + "\n"
    if cfg.get("output"):
        with open(cfg["output"], "w") as fh:
            fh.write(text)
        if cfg["format"] == "csv":
            with open(os.path.splitext(cfg["output"])[0] + ".json", "w") as fh:
                fh.write(dumps(record) + "\n")
    else:
        out.write(text)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = merge_config(args)
        record, rows, status = run(cfg)
    except ParseError as exc:
        err.write(dumps({"error": "parse", "message": str(exc)}) + "\n")
        return EXIT_PARSE
    except Violation as exc:
        err.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_VIOLATION
    _emit(cfg, record, rows, out)
    return status


if __name__ == "__main__":
    sys.exit(main())
