"""Command-line entry point: ``kondo-ent {profile,scan,rho,oracle}``.

Exit status: 0 success, 1 usage error, 2 numerical failure, 3 oracle gate
failure.  Any flag may also come from a flat ``key=value`` file given with
``--config``; flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, densmat, entanglement, kernels, oracle
from .model import CutoffMode, ModelParams, derive_scales, make_params
from .quadrature import QuadratureError

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_GATE = 0, 1, 2, 3

DEFAULT_SCAN_EB = (1e-4, 3e-4, 1e-3, 3e-3, 1e-2)
DEFAULT_SCAN_D = (0.05, 0.1, 0.3)
DEFAULT_ORACLE_X = (0.0, 1.0, math.pi, 10.0)
DEFAULT_GATE = 0.01

PROFILE_UNITS = {
    "x": "k_F*r",
    "f_n": "f~/N(0)",
    "f_n_normalized": "f_N/f_N(0)",
    "f_over_n": "n",
    "p": "1",
    "corr_zz": "n",
    "cond_lhs": "1",
    "g": "1",
}


class UsageError(Exception):
    pass


class Spacing(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class SweepConfig:
    params: ModelParams
    x_min: float
    x_max: float
    points: int
    spacing: Spacing = Spacing.LINEAR
    output_format: OutputFormat = OutputFormat.CSV
    output_path: str = "-"

    def __post_init__(self):
        if int(self.points) != self.points or self.points < 2:
            raise UsageError(f"points must be an integer >= 2, got {self.points!r}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise UsageError("x range must be finite")
        if self.x_min < 0.0 or not self.x_min < self.x_max:
            raise UsageError(f"need 0 <= x_min < x_max, got [{self.x_min!r}, {self.x_max!r}]")
        if Spacing(self.spacing) is Spacing.LOG and self.x_min <= 0.0:
            raise UsageError("log spacing needs x_min > 0")
        object.__setattr__(self, "spacing", Spacing(self.spacing))
        object.__setattr__(self, "output_format", OutputFormat(self.output_format))

    def grid(self) -> np.ndarray:
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.x_min, self.x_max, self.points)
        return np.linspace(self.x_min, self.x_max, self.points)


@dataclass(frozen=True)
class ScanPoint:
    eb_ratio: float
    d_ratio: float
    physical_regime: bool
    x_max: float
    max_condition_lhs: float
    x_at_max: float
    max_negativity: float


@dataclass(frozen=True)
class ScanResult:
    points: tuple
    cutoff_mode: CutoffMode
    global_max: float = field(init=False)
    any_entangled: bool = field(init=False)

    def __post_init__(self):
        if not self.points:
            raise UsageError("scan grid is empty")
        gmax = max(p.max_condition_lhs for p in self.points)
        object.__setattr__(self, "global_max", gmax)
        object.__setattr__(self, "any_entangled", gmax > 1.0)


# computations behind the subcommands

def run_profile(config: SweepConfig) -> kernels.KernelProfile:
    return kernels.profile(config.grid(), config.params)


def scan_point(params: ModelParams, x_max: float, points: int) -> ScanPoint:
    prof = kernels.profile(np.linspace(0.0, x_max, points), params)
    max_neg = 0.0
    for fon in prof.f_over_n:
        state, _ = densmat.normalize_to_werner(densmat.rho2_from_f_over_n(float(fon)))
        max_neg = max(max_neg, entanglement.negativity(state))
    i = int(np.argmax(prof.cond_lhs))
    return ScanPoint(params.eb_ratio, params.d_ratio, params.physical_regime, float(x_max),
                     float(prof.cond_lhs[i]), float(prof.xs[i]), max_neg)


def _scan_task(args):
    eb, d, mode, x_max, x_max_xi, points = args
    params = make_params(eb, d, mode)
    if x_max is None:
        x_max = x_max_xi * derive_scales(params).xi_k
    return scan_point(params, x_max, points)


def run_scan(eb_list: Sequence[float], d_list: Sequence[float], x_max: Optional[float] = None,
             points: int = 1000, cutoff_mode: CutoffMode | str = CutoffMode.DERIVED,
             x_max_xi: float = 10.0, jobs: int = 1) -> ScanResult:
    """Max of the entanglement condition over x for every (eb, d) pair.

    With ``x_max`` unset each system is scanned over [0, x_max_xi * xi_K].
    """
    if not eb_list or not d_list:
        raise UsageError("scan grid is empty")
    if points < 2:
        raise UsageError(f"points must be >= 2, got {points!r}")
    mode = CutoffMode.parse(cutoff_mode)
    tasks = [(eb, d, mode, x_max, x_max_xi, points) for eb in eb_list for d in d_list]
    for eb, d, *_ in tasks:
        make_params(eb, d, mode)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_task, tasks))
    else:
        results = [_scan_task(t) for t in tasks]
    return ScanResult(tuple(results), mode)


@dataclass(frozen=True)
class OracleRow:
    quantity: str
    x: Optional[float]
    continuum: float
    lattice: float
    rel_error: float
    passed: bool


def run_oracle(params: ModelParams, spec: Optional[oracle.LatticeSpec], xs: Sequence[float],
               gate: float = DEFAULT_GATE, g_spec: Optional[oracle.LatticeSpec] = None) -> list[OracleRow]:
    spec = spec or oracle.default_spec(params)
    g_spec = g_spec or oracle.default_g_spec()
    rows = []

    def row(name, x, cont, lat):
        if cont == lat:
            rel = 0.0
        elif cont == 0.0:
            rel = math.inf
        else:
            rel = abs(lat - cont) / abs(cont)
        rows.append(OracleRow(name, x, cont, lat, rel, rel <= gate))

    for x in xs:
        row("f_n", x, kernels.f_n(x, params), oracle.lattice_f_n(x, params, spec))
    for x in xs:
        row("g", x, kernels.g_fn(x), oracle.lattice_g(x, g_spec))
    row("norm", None, kernels.y_integral(params), oracle.lattice_norm(params, spec))
    return rows


# output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _meta(params: Optional[ModelParams] = None, **extra) -> dict:
    meta = {"tool": "kondo-entanglement", "version": __version__}
    if params is not None:
        meta["params"] = params.as_dict()
        meta["xi_k"] = derive_scales(params).xi_k
    meta.update(extra)
    return meta


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, default=_json_default, allow_nan=True) + "\n"


def _csv_text(header: Sequence[str], rows, comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _meta_comments(meta: dict) -> list[str]:
    flat = []
    for key, value in meta.items():
        if isinstance(value, dict):
            flat.extend(f"{key}.{k}={_fmt(v)}" for k, v in value.items())
        else:
            flat.append(f"{key}={_fmt(value)}")
    return flat


def _write(text: str, path: str) -> None:
    if path in ("-", ""):
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")


def profile_text(prof: kernels.KernelProfile, config: SweepConfig) -> str:
    meta = _meta(config.params, spacing=config.spacing.value, points=config.points)
    cols = prof.columns()
    if config.output_format is OutputFormat.JSON:
        return _json_text({"meta": meta, "units": PROFILE_UNITS,
                           "columns": {k: v.tolist() for k, v in cols.items()}})
    header = [f"{k}[{PROFILE_UNITS[k]}]" for k in kernels.KernelProfile.COLUMNS]
    rows = zip(*(cols[k] for k in kernels.KernelProfile.COLUMNS))
    return _csv_text(header, rows, _meta_comments(meta))


SCAN_FIELDS = ("eb_ratio", "d_ratio", "physical_regime", "x_max", "max_condition_lhs",
               "x_at_max", "max_negativity")


def scan_text(result: ScanResult, fmt: OutputFormat) -> str:
    meta = _meta(cutoff_mode=result.cutoff_mode.value)
    if fmt is OutputFormat.JSON:
        return _json_text({
            "meta": meta,
            "global_max": result.global_max,
            "any_entangled": result.any_entangled,
            "grid": [{k: getattr(p, k) for k in SCAN_FIELDS} for p in result.points],
        })
    meta["global_max"] = result.global_max
    meta["any_entangled"] = result.any_entangled
    rows = [[getattr(p, k) for k in SCAN_FIELDS] for p in result.points]
    return _csv_text(SCAN_FIELDS, rows, _meta_comments(meta))


ORACLE_FIELDS = ("quantity", "x", "continuum", "lattice", "rel_error", "passed")


def oracle_text(rows: list[OracleRow], meta: dict, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json_text({"meta": meta, "rows": [{k: getattr(r, k) for k in ORACLE_FIELDS} for r in rows]})
    return _csv_text(ORACLE_FIELDS, ([getattr(r, k) for k in ORACLE_FIELDS] for r in rows),
                     _meta_comments(meta))


class RhoKind(str, enum.Enum):
    IMPURITY = "impurity"
    IMPURITY_CONDUCTION = "impurity-conduction"
    FREE = "free"
    CONDUCTION = "conduction"


_GEOMETRY = {
    RhoKind.IMPURITY: (),
    RhoKind.IMPURITY_CONDUCTION: ("x",),
    RhoKind.FREE: ("x_rel",),
    RhoKind.CONDUCTION: ("x1", "x2", "x_rel"),
}


def rho_payload(kind: RhoKind | str, params: Optional[ModelParams], geometry: dict) -> dict:
    """Raw matrix, trace-one matrix and entanglement report for one builder.

    ``params`` may be None for the impurity and free-gas kinds, which do not
    depend on the model.
    """
    kind = RhoKind(kind)
    given = {k for k, v in geometry.items() if v is not None}
    needed = set(_GEOMETRY[kind])
    if given != needed:
        want = ", ".join(f"--{k.replace('_', '-')}" for k in _GEOMETRY[kind]) or "no geometry"
        raise UsageError(f"kind {kind.value!r} takes {want}")
    geo = {k: float(geometry[k]) for k in _GEOMETRY[kind]}
    if params is None and kind in (RhoKind.IMPURITY_CONDUCTION, RhoKind.CONDUCTION):
        raise UsageError(f"kind {kind.value!r} needs --eb-ratio and --d-ratio")
    meta = _meta(params, kind=kind.value, geometry=geo)
    if kind is RhoKind.IMPURITY:
        m = densmat.impurity_rho()
        return {"meta": meta,
                "matrix": {"basis": ["u", "d"], "normalization": "trace-one",
                           "entries": [[[float(v), 0.0] for v in row] for row in m]},
                "report": {"entropy_bits": entanglement.von_neumann_entropy(m)}}
    cond = None
    if kind is RhoKind.IMPURITY_CONDUCTION:
        raw = densmat.rho2_impurity_conduction(geo["x"], params)
        cond = kernels.condition_lhs(geo["x"], params)
    elif kind is RhoKind.FREE:
        raw = densmat.rho2_free(geo["x_rel"])
    else:
        raw = densmat.rho2_conduction(geo["x1"], geo["x2"], geo["x_rel"], params)
    normalized, werner = densmat.normalize_to_werner(raw)
    report = entanglement.assess(normalized, cond)
    return {"meta": meta, "raw": raw.to_dict(), "normalized": normalized.to_dict(),
            "werner": {"p": werner.p, "residual": werner.residual},
            "report": report.to_dict()}


# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def float_list(text: str) -> list[float]:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if item in ("pi", "π"):
            out.append(math.pi)
            continue
        try:
            out.append(float(item))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {item!r}") from None
    return out


def _add_params(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--eb-ratio", type=float, required=required, help="E_B/E_F")
    p.add_argument("--d-ratio", type=float, required=required, help="D/E_F")
    p.add_argument("--cutoff-mode", choices=[m.value for m in CutoffMode], default="derived")


def _add_output(p: argparse.ArgumentParser, default_format: str):
    p.add_argument("--format", choices=[f.value for f in OutputFormat], default=default_format)
    p.add_argument("--out", default="-", help="output file, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kondo-ent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="flat key=value file supplying flags")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("profile", help="kernels on an x grid")
    _add_params(p)
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=None, help="default: 3 xi_K k_F")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--spacing", choices=[s.value for s in Spacing], default="linear")
    _add_output(p, "csv")

    p = sub.add_parser("scan", help="separability scan over (E_B/E_F, D/E_F)")
    p.add_argument("--eb-list", type=float_list, default=list(DEFAULT_SCAN_EB))
    p.add_argument("--d-list", type=float_list, default=list(DEFAULT_SCAN_D))
    p.add_argument("--cutoff-mode", choices=[m.value for m in CutoffMode], default="derived")
    p.add_argument("--x-max", type=float, default=None, help="absolute x range (overrides --x-max-xi)")
    p.add_argument("--x-max-xi", type=float, default=10.0, help="x range in units of xi_K k_F")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p, "json")

    p = sub.add_parser("rho", help="one reduced density matrix and its entanglement")
    p.add_argument("--kind", choices=[k.value for k in RhoKind], required=True)
    _add_params(p, required=False)
    for name in ("x", "x-rel", "x1", "x2"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--out", default="-")

    p = sub.add_parser("oracle", help="lattice sums against continuum kernels")
    _add_params(p)
    p.add_argument("--x-list", type=float_list, default=list(DEFAULT_ORACLE_X))
    p.add_argument("--resolution", type=int, default=None, help="1/dk^2 = resolution^2 + 1/2")
    p.add_argument("--dk", type=float, default=None)
    p.add_argument("--half-extent", type=int, default=None)
    p.add_argument("--gate", type=float, default=DEFAULT_GATE, help="max relative error")
    _add_output(p, "csv")
    return parser


def read_config(path: str) -> list[str]:
    """Turn ``key=value`` lines into ``--key value`` tokens."""
    tokens = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        tokens += [f"--{key.lstrip('-').replace('_', '-')}", value]
    return tokens


def _splice_config(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    commands = {"profile", "scan", "rho", "oracle"}
    idx = next((i for i, a in enumerate(rest) if a in commands), None)
    if idx is None:
        return rest
    # config tokens go first so that explicit flags override them
    return rest[:idx + 1] + read_config(known.config) + rest[idx + 1:]


def _params_from(args) -> ModelParams:
    return make_params(args.eb_ratio, args.d_ratio, args.cutoff_mode)


def _cmd_profile(args) -> int:
    params = _params_from(args)
    x_max = args.x_max if args.x_max is not None else 3.0 * derive_scales(params).xi_k
    config = SweepConfig(params, args.x_min, x_max, args.points, args.spacing, args.format, args.out)
    _write(profile_text(run_profile(config), config), config.output_path)
    return EXIT_OK


def _cmd_scan(args) -> int:
    result = run_scan(args.eb_list, args.d_list, args.x_max, args.points, args.cutoff_mode,
                      args.x_max_xi, args.jobs)
    _write(scan_text(result, OutputFormat(args.format)), args.out)
    return EXIT_OK


def _cmd_rho(args) -> int:
    kind = RhoKind(args.kind)
    if args.eb_ratio is None and args.d_ratio is None:
        params = None
    elif args.eb_ratio is None or args.d_ratio is None:
        raise UsageError("give both --eb-ratio and --d-ratio, or neither")
    else:
        params = _params_from(args)
    geometry = {"x": args.x, "x_rel": args.x_rel, "x1": args.x1, "x2": args.x2}
    _write(_json_text(rho_payload(kind, params, geometry)), args.out)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    params = _params_from(args)
    if args.resolution is not None:
        spec = oracle.LatticeSpec.from_resolution(args.resolution, params.d_ratio)
    elif args.dk is not None:
        half = args.half_extent or math.floor(math.sqrt(1.0 + params.d_ratio) / args.dk) + 1
        spec = oracle.LatticeSpec(half, args.dk)
    else:
        spec = oracle.default_spec(params)
    g_spec = spec if (args.resolution is not None or args.dk is not None) else None
    rows = run_oracle(params, spec, args.x_list, args.gate, g_spec)
    meta = _meta(params, half_extent=spec.half_extent, dk=spec.dk, gate=args.gate,
                 all_passed=all(r.passed for r in rows))
    _write(oracle_text(rows, meta, OutputFormat(args.format)), args.out)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_GATE


_COMMANDS = {"profile": _cmd_profile, "scan": _cmd_scan, "rho": _cmd_rho, "oracle": _cmd_oracle}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _splice_config(argv, parser)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse exits for --help/--version (0) and on bad usage
            return exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"kondo-ent: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (oracle.LatticeBudgetError, QuadratureError, kernels.KernelEvaluationError) as exc:
        print(f"kondo-ent: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"kondo-ent: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kondo-ent: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
