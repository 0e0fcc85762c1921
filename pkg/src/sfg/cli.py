"""Command-line front end: figure data, parameter sweeps, design reports.

Every table is written as CSV: ``#`` lines with the tool version and the full
resolved configuration, then a header row, then data with floats printed to
17 significant digits so identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, analytic, design, verify
from .errors import (AfocalError, GridError, InvalidParameterError, NoPeakError,
                     SFGError, UndefinedFidelityError, UndefinedPurityError)
from .model import DimensionlessParams, EscortSpec, PhotonSpec, coupling_scale, reduce


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def write_table(path, command, config, columns, rows):
    """Write a provenance header, a header row and the data rows."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# sfg {__version__}\n")
        fh.write(f"# command: {command}\n")
        fh.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def read_table(path):
    """Read a table written by :func:`write_table` as ``(columns, rows)``."""
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    columns = next(reader)
    return columns, [row for row in reader]


def workers():
    """Size of the worker pool: ``SFG_THREADS`` if set, else the CPU count."""
    raw = os.environ.get("SFG_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameterError(f"SFG_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise InvalidParameterError("SFG_THREADS must be >= 1")
    return n


def pool_map(func, items):
    """Ordered map over independent points, in parallel when allowed."""
    items = list(items)
    n = min(workers(), len(items))
    if n <= 1:
        return [func(item) for item in items]
    chunk = max(1, len(items) // (8 * n))
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items, chunksize=chunk))


def _merge(defaults, overrides):
    unknown = set(overrides) - set(defaults)
    if unknown:
        raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(overrides)
    return merged


def _grid(lo, hi, steps, scale):
    if scale == "log":
        return np.logspace(math.log10(lo), math.log10(hi), int(steps))
    return np.linspace(lo, hi, int(steps))


# ---------------------------------------------------------------------------
# figure 2: efficiency and fidelity
# ---------------------------------------------------------------------------

FIG2_DEFAULTS = {
    "a": {"q_values": [1e-6, 1e-2, 0.1, 1.0, 10.0, 100.0], "T": 0.0,
          "p_max": 4 * math.pi, "p_steps": 201},
    "b": {"T_values": [0.0, 0.5, 1.0, 1.5, 2.0, 3.0], "q": 1.0,
          "p_max": 4 * math.pi, "p_steps": 201},
    "c": {"q_min": 1e-3, "q_max": 1e3, "q_steps": 61,
          "T_min": -3.0, "T_max": 3.0, "T_steps": 61},
}
FIG2_DEFAULTS["d"] = dict(FIG2_DEFAULTS["c"])


def _efficiency_point(args):
    p, q, T = args
    return analytic.efficiency(DimensionlessParams(p=p, T=T, q=q)).value


def _peak_point(args):
    """Estimated optimum at (q, T); dense-scan fallback when there is no peak."""
    q, T, with_fidelity = args
    try:
        p = analytic.optimal_p_paper(q, T)
        status = "ok"
    except NoPeakError:
        p, _ = analytic.dense_scan_max(q, T)
        status = "no_peak"
    eff = analytic.efficiency(DimensionlessParams(p=p, T=T, q=q)).value
    if not with_fidelity:
        return float(p), eff, status
    try:
        fid = analytic.fidelity_dimensionless(p, q, T)
    except UndefinedFidelityError:
        fid, status = math.nan, "undefined"
    return float(p), fid, status


def fig2(panel, config):
    cfg = _merge(FIG2_DEFAULTS[panel], config)
    if panel in ("a", "b"):
        ps = np.linspace(0.0, cfg["p_max"], int(cfg["p_steps"]))
        if panel == "a":
            pairs = [(float(q), cfg["T"]) for q in cfg["q_values"]]
        else:
            pairs = [(cfg["q"], float(T)) for T in cfg["T_values"]]
        points = [(float(p), q, T) for q, T in pairs for p in ps]
        values = pool_map(_efficiency_point, points)
        rows = [(q, T, p, v) for (p, q, T), v in zip(points, values)]
        return cfg, ["q", "T", "p", "efficiency"], rows
    qs = _grid(cfg["q_min"], cfg["q_max"], cfg["q_steps"], "log")
    Ts = _grid(cfg["T_min"], cfg["T_max"], cfg["T_steps"], "linear")
    points = [(float(q), float(T), panel == "d") for q in qs for T in Ts]
    results = pool_map(_peak_point, points)
    name = "fidelity" if panel == "d" else "efficiency"
    rows = [(q, T) + res for (q, T, _), res in zip(points, results)]
    return cfg, ["q", "T", "p", name, "status"], rows


# ---------------------------------------------------------------------------
# figure 3: bandwidth compression
# ---------------------------------------------------------------------------

FIG3_DEFAULTS = {
    "a": {"chirps": [1.0, 5.0, 20.0, 100.0], "sigma": 1.0, "S": 1e9,
          "p_max": 8.0, "gamma_steps": 201},
    "b": {"q0_min": 1e-2, "q0_max": 1e2, "q0_steps": 21,
          "q_min": 1e-2, "q_max": 1e2, "q_steps": 21, "sigma1": 1.0},
}


def _compression_point(args):
    q0, q, sigma1 = args
    A = design.compression_chirp(q0, q, sigma1)
    if A is None:
        return math.nan, math.nan, "inaccessible"
    try:
        ratio = design.compression_width_ratio(sigma1, sigma1 * math.sqrt(q0), A)
    except GridError:
        return A, math.nan, "grid_limit"
    return A, ratio, "ok"


def fig3(panel, config):
    cfg = _merge(FIG3_DEFAULTS[panel], config)
    if panel == "a":
        rows = []
        for A in cfg["chirps"]:
            photon = PhotonSpec(sigma1=cfg["sigma"], sigma_h=cfg["sigma"], S=cfg["S"],
                                A1=float(A))
            escort = EscortSpec(sigma2=cfg["sigma"], A2=-float(A))
            scale = coupling_scale(escort)
            q = reduce(photon, escort, 1.0).q
            for gamma in np.linspace(0.0, cfg["p_max"] / scale, int(cfg["gamma_steps"])):
                p = float(gamma) * scale
                rows.append((A, gamma, p, _efficiency_point((p, q, 0.0))))
        return cfg, ["A", "gamma", "p", "efficiency"], rows
    q0s = _grid(cfg["q0_min"], cfg["q0_max"], cfg["q0_steps"], "log")
    qs = _grid(cfg["q_min"], cfg["q_max"], cfg["q_steps"], "log")
    points = [(float(a), float(b), cfg["sigma1"]) for a in q0s for b in qs]
    results = pool_map(_compression_point, points)
    rows = [(q0, q) + res for (q0, q, _), res in zip(points, results)]
    return cfg, ["q0", "q", "A", "width_ratio", "status"], rows


# ---------------------------------------------------------------------------
# figure 4: entanglement
# ---------------------------------------------------------------------------

FIG4_DEFAULTS = {"q_values": [1e-3, 1.0, 10.0, 100.0], "sigma1": 1.0, "sigma_h": 1.0,
                 "S_min": 10.0**-1.5, "S_max": 1e3, "S_steps": 46}


def _renyi_point(args):
    q, S, sigma1, sigma_h = args
    p = analytic.optimal_p_paper(q, 0.0)
    r_in = analytic.input_purity(S, sigma1, sigma_h).renyi2
    r_out = analytic.upconverted_purity(S, sigma1, sigma_h, p, q).renyi2
    return float(p), r_in, r_out


def fig4(config):
    cfg = _merge(FIG4_DEFAULTS, config)
    Ss = _grid(cfg["S_min"], cfg["S_max"], cfg["S_steps"], "log")
    points = [(float(q), float(S), cfg["sigma1"], cfg["sigma_h"])
              for q in cfg["q_values"] for S in Ss]
    results = pool_map(_renyi_point, points)
    rows = [(q, S) + res for (q, S, _, _), res in zip(points, results)]
    return cfg, ["q", "S", "p", "renyi2_in", "renyi2_out"], rows


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.steps < 2:
            raise InvalidParameterError(f"axis {self.name}: steps must be >= 2")
        if not self.min < self.max:
            raise InvalidParameterError(f"axis {self.name}: min must be < max")
        if self.scale not in ("linear", "log"):
            raise InvalidParameterError(f"axis {self.name}: scale must be linear or log")
        if self.scale == "log" and self.min <= 0:
            raise InvalidParameterError(f"axis {self.name}: log scale needs min > 0")

    def values(self):
        return _grid(self.min, self.max, self.steps, self.scale)


# quantity -> (required parameters, optional parameters with defaults, output columns)
QUANTITIES = {
    "efficiency": (("p", "q"), {"T": 0.0}, ("value",)),
    "optimal_efficiency": (("q",), {"T": 0.0}, ("p", "value")),
    "fidelity": (("q",), {"T": 0.0, "p": None}, ("p", "value")),
    "width_ratio": (("q0", "q"), {"sigma1": 1.0}, ("A", "value")),
    "renyi2": (("q", "S"), {"p": None, "sigma1": 1.0, "sigma_h": 1.0},
               ("p", "renyi2_in", "value")),
}


@dataclass(frozen=True)
class SweepConfig:
    quantity: str
    axes: tuple
    fixed: dict = field(default_factory=dict)
    output_path: str = "sweep.csv"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise InvalidParameterError(
                f"quantity must be one of {sorted(QUANTITIES)}, got {self.quantity!r}")
        if not 1 <= len(self.axes) <= 2:
            raise InvalidParameterError("a sweep has one or two axes")
        required, optional, _ = QUANTITIES[self.quantity]
        allowed = set(required) | set(optional)
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise InvalidParameterError("axis names must be distinct")
        for name in list(names) + list(self.fixed):
            if name not in allowed:
                raise InvalidParameterError(
                    f"{self.quantity} does not take parameter {name!r}")
        clash = set(names) & set(self.fixed)
        if clash:
            raise InvalidParameterError(f"parameters both swept and fixed: {sorted(clash)}")
        missing = set(required) - set(names) - set(self.fixed)
        if missing:
            raise InvalidParameterError(
                f"{self.quantity} needs parameters {sorted(missing)}")

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"quantity", "axes", "fixed", "output_path"}
        if unknown:
            raise InvalidParameterError(f"unknown sweep keys: {sorted(unknown)}")
        try:
            axes = tuple(SweepAxis(name=a["name"], min=float(a["min"]),
                                   max=float(a["max"]), steps=int(a["steps"]),
                                   scale=a.get("scale", "linear"))
                         for a in data["axes"])
            return cls(quantity=data["quantity"], axes=axes,
                       fixed={k: float(v) for k, v in data.get("fixed", {}).items()},
                       output_path=data.get("output_path", "sweep.csv"))
        except (KeyError, TypeError) as exc:
            raise InvalidParameterError(f"malformed sweep config: {exc}") from None

    def to_dict(self):
        return {"quantity": self.quantity, "output_path": self.output_path,
                "fixed": dict(self.fixed),
                "axes": [dict(name=a.name, min=a.min, max=a.max, steps=a.steps,
                              scale=a.scale) for a in self.axes]}

    def points(self):
        _, optional, _ = QUANTITIES[self.quantity]
        base = dict(optional)
        base.update(self.fixed)
        grids = [ax.values() for ax in self.axes]
        mesh = np.meshgrid(*grids, indexing="ij")
        for idx in np.ndindex(mesh[0].shape):
            params = dict(base)
            for ax, m in zip(self.axes, mesh):
                params[ax.name] = float(m[idx])
            yield params


def _estimated_p(params):
    if params.get("p") is not None:
        return params["p"], "ok"
    try:
        return analytic.optimal_p_paper(params["q"], params.get("T", 0.0)), "ok"
    except NoPeakError:
        return analytic.dense_scan_max(params["q"], params.get("T", 0.0))[0], "no_peak"


def evaluate(quantity, params):
    """One sweep point: ``(outputs..., status)`` in the quantity's column order."""
    try:
        if quantity == "efficiency":
            dp = DimensionlessParams(p=params["p"], T=params["T"], q=params["q"])
            return (analytic.efficiency(dp).value, "ok")
        if quantity == "optimal_efficiency":
            p, eff, status = _peak_point((params["q"], params["T"], False))
            return (p, eff, status)
        if quantity == "fidelity":
            p, status = _estimated_p(params)
            return (float(p), analytic.fidelity_dimensionless(p, params["q"], params["T"]),
                    status)
        if quantity == "width_ratio":
            A, ratio, status = _compression_point(
                (params["q0"], params["q"], params["sigma1"]))
            return (A, ratio, status)
        if quantity == "renyi2":
            p, status = _estimated_p(params)
            r_in = analytic.input_purity(params["S"], params["sigma1"], params["sigma_h"])
            r_out = analytic.upconverted_purity(params["S"], params["sigma1"],
                                                params["sigma_h"], p, params["q"])
            return (float(p), r_in.renyi2, r_out.renyi2, status)
    except (UndefinedFidelityError, UndefinedPurityError):
        width = len(QUANTITIES[quantity][2])
        return (math.nan,) * width + ("undefined",)
    raise InvalidParameterError(f"unknown quantity {quantity!r}")


def _sweep_point(args):
    quantity, params = args
    return evaluate(quantity, params)


def sweep(config):
    names = [ax.name for ax in config.axes]
    points = list(config.points())
    results = pool_map(_sweep_point, [(config.quantity, p) for p in points])
    columns = names + list(QUANTITIES[config.quantity][2]) + ["status"]
    rows = [tuple(p[n] for n in names) + res for p, res in zip(points, results)]
    return columns, rows


# ---------------------------------------------------------------------------
# design reports
# ---------------------------------------------------------------------------

LCL_THRESHOLD = 1e4


def design_report(kind, args):
    if kind == "lens":
        lens = design.solve_time_lens(args.a1, args.a2, args.sigma2)
        report = dict(vars(lens))
        report["residual"] = lens.residual()
        report["lcl"] = lens.lcl_ratio >= LCL_THRESHOLD
        # thin-lens focal chirp in the large-chirp limit is -A2
        report["A3_lcl"] = 1.0 / (-1.0 / args.a2 - 1.0 / args.a1) if args.a2 else None
        return report
    if kind == "t2f":
        A1 = design.time_to_frequency_chirp(args.a2, args.sigma2)
        lcl = 16.0 * args.a2**2 * args.sigma2**4
        return {"A2": args.a2, "sigma2": args.sigma2, "A1": A1, "A3": A1,
                "B": design.temporal_phase_coefficient(args.a2, args.sigma2),
                "lcl_ratio": lcl, "lcl": lcl >= LCL_THRESHOLD, "A1_lcl": -args.a2,
                "relative_to_lcl": A1 / -args.a2 - 1.0}
    s1, s2, A = args.sigma1, args.sigma2, args.a
    photon = PhotonSpec(sigma1=s1, sigma_h=s1, A1=A)
    escort = EscortSpec(sigma2=s2, A2=-A)
    lcl = escort.chirp_ratio
    return {"sigma1": s1, "sigma2": s2, "A": A,
            "sigma3_first_order": design.compressed_bandwidth_first_order(s1, s2, A),
            "sigma3_lcl": (math.sqrt(1.0 / s1**2 + 1.0 / s2**2) / (4.0 * abs(A))
                           if A else None),
            "q0": s2**2 / s1**2, "q": reduce(photon, escort, 1.0).q,
            "lcl_ratio": lcl, "lcl": lcl >= LCL_THRESHOLD}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _load_json(path):
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise InvalidParameterError("config must be a JSON object")
    return data


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sfg", description="Single-photon sum-frequency upconversion toolkit.")
    parser.add_argument("--version", action="version", version=f"sfg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, panels in (("fig2", "abcd"), ("fig3", "ab")):
        p = sub.add_parser(name, help=f"data for figure {name[-1]}")
        p.add_argument("--panel", required=True, choices=list(panels))
        p.add_argument("--out", required=True)
        p.add_argument("--config")
    p = sub.add_parser("fig4", help="data for figure 4")
    p.add_argument("--out", required=True)
    p.add_argument("--config")

    p = sub.add_parser("sweep", help="parameter sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="overrides output_path from the config")

    p = sub.add_parser("design", help="solve for chirps; prints a JSON report")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("lens")
    k.add_argument("--a1", type=float, required=True)
    k.add_argument("--a2", type=float, required=True)
    k.add_argument("--sigma2", type=float, required=True)
    k = kinds.add_parser("t2f")
    k.add_argument("--a2", type=float, required=True)
    k.add_argument("--sigma2", type=float, required=True)
    k = kinds.add_parser("compress")
    k.add_argument("--sigma1", type=float, required=True)
    k.add_argument("--sigma2", type=float, required=True)
    k.add_argument("--a", type=float, required=True)

    sub.add_parser("verify", help="run the analytic-vs-oracle check suite")
    return parser


def _command_line(args):
    parts = [args.command]
    if getattr(args, "panel", None):
        parts.append(f"--panel {args.panel}")
    return " ".join(parts)


def _run_verify():
    start = time.perf_counter()
    results = verify.run_all(echo=lambda r: print(r.line(), flush=True))
    summary = {"version": __version__,
               "passed": [r.name for r in results if r.passed],
               "failed": [r.name for r in results if not r.passed],
               "seconds": round(time.perf_counter() - start, 1)}
    print(json.dumps(summary, sort_keys=True))
    return 0 if not summary["failed"] else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify()
        if args.command == "design":
            print(json.dumps(design_report(args.kind, args), indent=2, sort_keys=True))
            return 0
        if args.command == "sweep":
            config = SweepConfig.from_dict(_load_json(args.config))
            out = args.out or config.output_path
            columns, rows = sweep(config)
            write_table(out, "sweep", config.to_dict(), columns, rows)
            return 0
        overrides = _load_json(args.config)
        if args.command == "fig2":
            cfg, columns, rows = fig2(args.panel, overrides)
        elif args.command == "fig3":
            cfg, columns, rows = fig3(args.panel, overrides)
        else:
            cfg, columns, rows = fig4(overrides)
        write_table(args.out, _command_line(args), cfg, columns, rows)
        return 0
    except (SFGError, OSError, json.JSONDecodeError) as exc:
        kind = "afocal" if isinstance(exc, AfocalError) else "error"
        print(f"sfg: {kind}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
