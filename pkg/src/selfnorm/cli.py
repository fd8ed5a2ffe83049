"""Command-line front end.

    selfnorm {rate,exact,prefactor,simulate,contour} [--config FILE] [--out PATH]
             [--seed INT] [--threads INT]

Without ``--config`` each command runs its built-in demo configuration.
Exit codes: 0 ok, 1 bad configuration, 2 precondition not met, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import distributions as D
from . import exact_prefactor as EP
from . import exact_twopoint as ET
from . import geometry as G
from . import simulate as SIM
from .errors import ConfigError, NumericFailure, PreconditionError
from .legendre import contour, rate_at
from .shao_rate import rate_report

VERSION = 1

COMMON = {"version", "distribution", "normalizer", "z", "n", "trials", "seed", "threads",
          "options", "out"}
OPTIONS = {
    "rate": {},
    "exact": {"lattice": "ceil"},
    "prefactor": {"form": "scaled"},
    "simulate": {"method": "importance"},
    "contour": {"x1_range": [-1.0, 2.0], "x2_range": [0.0, 3.0], "resolution": 61,
                "y_max": 1.5, "polyline_points": 151},
}
NEEDS_N = {"exact", "prefactor", "simulate"}

DEMO_LAW = {"family": "gaussian", "mu": -0.5, "sigma": 1.0}
DEMOS = {
    "rate": {"version": 1, "distribution": DEMO_LAW, "normalizer": {"p": 2}, "z": [0.67]},
    "exact": {"version": 1, "distribution": {"family": "two_point", "a": -1, "b": 1, "q": 0.5},
              "normalizer": {"p": 2}, "z": [0.5], "n": [50, 100, 200, 500, 1000, 2000]},
    "prefactor": {"version": 1, "distribution": DEMO_LAW, "normalizer": {"p": 2}, "z": [0.67],
                  "n": [50, 200, 800]},
    "simulate": {"version": 1, "distribution": DEMO_LAW, "normalizer": {"p": 2}, "z": [0.67],
                 "n": [50, 100, 200], "trials": 100000, "seed": 1},
    "contour": {"version": 1, "distribution": DEMO_LAW, "normalizer": {"p": 2}, "z": [0.67]},
}


@dataclass
class RunConfig:
    command: str
    distribution: object
    normalizer: object
    z: list
    n: list = field(default_factory=list)
    trials: int = 0
    seed: int = 0
    threads: int = 1
    options: dict = field(default_factory=dict)
    out: str | None = None


def _real_list(obj, name, integer=False):
    vals = obj if isinstance(obj, list) else [obj]
    if not vals:
        raise ConfigError(f"{name}: empty list")
    out = []
    for v in vals:
        ok = isinstance(v, int) if integer else isinstance(v, (int, float))
        if isinstance(v, bool) or not ok:
            raise ConfigError(f"{name}: expected {'integers' if integer else 'numbers'}, got {v!r}")
        out.append(int(v) if integer else float(v))
    return out


def _int(obj, name, lo):
    if isinstance(obj, bool) or not isinstance(obj, int) or obj < lo:
        raise ConfigError(f"{name}: expected an integer >= {lo}, got {obj!r}")
    return obj


def parse_config(command: str, raw: dict) -> RunConfig:
    """Validate a decoded JSON config; every problem raises ConfigError naming the field."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    for key in raw:
        if key not in COMMON:
            raise ConfigError(f"{key}: unknown field")
    if "version" not in raw:
        raise ConfigError("version: missing")
    if raw["version"] != VERSION:
        raise ConfigError(f"version: unsupported value {raw['version']!r} (expected {VERSION})")
    for key in ("distribution", "normalizer", "z"):
        if key not in raw:
            raise ConfigError(f"{key}: missing")
    cfg = RunConfig(command, D.distribution_from_dict(raw["distribution"]),
                    D.normalizer_from_dict(raw["normalizer"]), _real_list(raw["z"], "z"))
    if command in NEEDS_N:
        if "n" not in raw:
            raise ConfigError("n: missing")
        cfg.n = _real_list(raw["n"], "n", integer=True)
        if min(cfg.n) < 1:
            raise ConfigError("n: entries must be >= 1")
    elif "n" in raw:
        raise ConfigError(f"n: not used by '{command}'")
    if command == "simulate":
        if "trials" not in raw:
            raise ConfigError("trials: missing")
        cfg.trials = _int(raw["trials"], "trials", 1)
    elif "trials" in raw:
        raise ConfigError(f"trials: not used by '{command}'")
    cfg.seed = _int(raw.get("seed", 0), "seed", 0)
    cfg.threads = _int(raw.get("threads", 1), "threads", 1)
    opts = raw.get("options", {})
    if not isinstance(opts, dict):
        raise ConfigError("options: expected an object")
    cfg.options = copy.deepcopy(OPTIONS[command])
    for key, val in opts.items():
        if key not in cfg.options:
            raise ConfigError(f"options.{key}: unknown option for '{command}'")
        cfg.options[key] = val
    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out: expected a path string")
    cfg.out = out
    return cfg


# --------------------------------------------------------------------------
# commands; each returns the output text


def _num(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def cmd_rate(cfg: RunConfig) -> str:
    reports = [rate_report(cfg.distribution, cfg.normalizer, z).to_dict() for z in cfg.z]
    return _json_text({"version": VERSION, "command": "rate", "reports": reports})


def cmd_exact(cfg: RunConfig) -> str:
    dist = cfg.distribution
    if not isinstance(dist, D.TwoPoint):
        raise ConfigError("distribution.family: 'exact' needs a two_point law")
    lattice = cfg.options["lattice"]
    if lattice not in ("ceil", "none", "literal"):
        raise ConfigError(f"options.lattice: unknown mode {lattice!r}")
    rows = []
    for z in cfg.z:
        for n in cfg.n:
            est = ET.asymptotic_prob(dist.a, dist.b, dist.q, cfg.normalizer, z, n, lattice)
            ratio = math.exp(est.log_total - est.log_exact) if math.isfinite(est.log_exact) else math.inf
            rows.append([repr(z), n, est.case_tag, repr(est.log_exact), repr(est.log_total),
                         repr(ratio)])
    return _csv_text(["z", "n", "case", "log_exact", "log_asymptotic", "ratio"], rows)


def cmd_prefactor(cfg: RunConfig) -> str:
    from .shao_rate import j_boundary

    form = cfg.options["form"]
    if form not in EP.FORMS:
        raise ConfigError(f"options.form: expected one of {list(EP.FORMS)}")
    records = []
    for z in cfg.z:
        sol = j_boundary(cfg.distribution, cfg.normalizer, z)
        for n in cfg.n:
            rep = EP.asymptotic_estimate(cfg.distribution, cfg.normalizer, z, n, sol, form)
            records.append({k: (_num(v) if isinstance(v, float) else v)
                            for k, v in rep.to_dict().items()})
    return _json_text({"version": VERSION, "command": "prefactor", "records": records})


def cmd_simulate(cfg: RunConfig) -> str:
    method = cfg.options["method"]
    if method not in ("importance", "direct"):
        raise ConfigError(f"options.method: unknown method {method!r}")
    rows = []
    for z in cfg.z:
        for n in cfg.n:
            if method == "direct":
                est = SIM.direct_mc(cfg.distribution, cfg.normalizer, z, n, cfg.trials,
                                    cfg.seed, cfg.threads)
            else:
                est = SIM.importance_mc(cfg.distribution, cfg.normalizer, z, n, cfg.trials,
                                        cfg.seed, cfg.threads)
            rows.append([repr(z)] + est.row())
    return _csv_text(["z"] + SIM.CSV_HEADER, rows)


def _pair(val, name):
    if (not isinstance(val, list) or len(val) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val)):
        raise ConfigError(f"options.{name}: expected [low, high]")
    return float(val[0]), float(val[1])


def cmd_contour(cfg: RunConfig) -> tuple:
    """(grid CSV text, boundary polyline CSV text)."""
    opts = cfg.options
    res = opts["resolution"]
    res = tuple(_real_list(res, "options.resolution", integer=True))
    if len(res) not in (1, 2) or min(res) < 1:
        raise ConfigError("options.resolution: expected a positive integer or [n1, n2]")
    res = res * 2 if len(res) == 1 else res
    if len(cfg.z) != 1:
        raise ConfigError("z: 'contour' takes a single level")
    z = cfg.z[0]
    grid = contour(cfg.distribution, cfg.normalizer, _pair(opts["x1_range"], "x1_range"),
                   _pair(opts["x2_range"], "x2_range"), res)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "rate"])
    for j, b in enumerate(grid.x2):
        for i, a in enumerate(grid.x1):
            w.writerow([repr(float(a)), repr(float(b)), _num(grid.values[j, i])])
    pts = G.BoundaryChart(z, cfg.normalizer).polyline(float(opts["y_max"]),
                                                      int(opts["polyline_points"]))
    rows = []
    start = (0.0, -1.0)
    for x1, x2 in pts:
        rate = math.inf
        if not cfg.distribution.is_degenerate:
            rp = rate_at(cfg.distribution, cfg.normalizer, (x1, x2), start=start)
            if rp.converged:
                rate, start = rp.rate, rp.tilt
        rows.append([repr(float(x1)), repr(float(x2)), _num(rate)])
    return buf.getvalue(), _csv_text(["x1", "x2", "rate"], rows)


COMMANDS = {"rate": cmd_rate, "exact": cmd_exact, "prefactor": cmd_prefactor,
            "simulate": cmd_simulate, "contour": cmd_contour}


def boundary_path(out: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + "_boundary" + (p.suffix or ".csv"))


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="selfnorm", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON config file (default: built-in demo)")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            raw = copy.deepcopy(DEMOS[args.command])
        else:
            try:
                raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        cfg = parse_config(args.command, raw)
        if args.seed is not None:
            cfg.seed = _int(args.seed, "--seed", 0)
        if args.threads is not None:
            cfg.threads = _int(args.threads, "--threads", 1)
        out = args.out if args.out is not None else cfg.out
        if args.command == "contour":
            if out is None:
                raise ConfigError("--out: 'contour' writes two files and needs an output path")
            grid_text, line_text = cmd_contour(cfg)
            _emit(grid_text, out)
            _emit(line_text, boundary_path(out))
        else:
            _emit(COMMANDS[args.command](cfg), out)
    except PreconditionError as exc:
        print(f"selfnorm: precondition not met: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"selfnorm: numeric failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"selfnorm: configuration error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
