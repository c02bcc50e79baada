"""Command-line experiment harness.

Each subcommand reads an optional JSON config (validated against the bundled
schema), computes one or more tables and writes them atomically to the output
directory together with a metadata JSON and a log.  Identical configs give
byte-identical tables and metadata.

Exit codes: 0 success, 1 other failure, 2 invalid configuration, 3 resonance
where none is allowed, 4 precision exhausted or doubling-precision
disagreement.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .arithmetic import (
    MoserQuery,
    bruno_sum,
    moser_pair_check,
    parse_rotation_number,
)
from .capacity import capacity_sample, polar_probe
from .centralizer import centralizer_candidate
from .errors import (
    ConfigError,
    InsufficientDepth,
    LatticeMismatch,
    ObstructionNonzero,
    PrecisionDisagreement,
    ResonantDivisor,
    SmallDivisorError,
)
from .families import (
    DIVERGENT,
    ComplexLine,
    GermFamily,
    Grid,
    PointSet,
    WindowPolicy,
    coefficient_magnitudes,
    parameter_sweep,
    radius_estimate,
)
from .linearization import (
    EigenData,
    conjugacy_residual,
    detect_resonances,
    linearize_germ_1d,
    linearize_germ_nd,
)
from .series.literals import format_index, parse_index
from .series.multivariate import MultiSeries, as_multiseries, unit_index
from .series.parampoly import ScalarRing
from .series.scalars import format_complex, format_real, parse_complex, working_precision
from .series.univariate import TruncSeries
from .vector_fields import (
    ResonanceLattice,
    VectorFieldGerm,
    pushforward_residual,
    vf_linearize,
    vf_normal_form,
)

log = logging.getLogger("smalldiv")

COMMANDS = ("bruno", "linearize", "family-sweep", "vf", "centralizer", "capacity", "resonances")
DEFAULTS = {"precision_bits": 256, "seed": 0, "workers": 1, "verify_precision": False, "out": "out"}
DEFAULT_TRUNC = {
    "bruno": None,
    "linearize": 64,
    "family-sweep": 256,
    "vf": 16,
    "centralizer": 64,
    "capacity": None,
    "resonances": 12,
}
# keys that do not influence computed numbers and are left out of the config hash
_NON_SEMANTIC = ("out", "workers", "cache_dir")
VERIFY_RTOL = 1e-6


class ExitCode:
    OK = 0
    FAILURE = 1
    CONFIG = 2
    RESONANCE = 3
    PRECISION = 4


# -- configuration -----------------------------------------------------------
def load_schema():
    text = resources.files("smalldiv").joinpath("data/config_schema.json").read_text()
    return json.loads(text)


def validate_config(config):
    try:
        jsonschema.Draft202012Validator(load_schema()).validate(config)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None


def normalize_config(config):
    cfg = copy.deepcopy(config)
    for k, v in DEFAULTS.items():
        cfg.setdefault(k, v)
    if "trunc" not in cfg and DEFAULT_TRUNC.get(cfg["command"]) is not None:
        cfg["trunc"] = DEFAULT_TRUNC[cfg["command"]]
    cfg.setdefault("payload", {})
    return cfg


def config_hash(cfg):
    semantic = {k: v for k, v in cfg.items() if k not in _NON_SEMANTIC}
    return hashlib.sha256(json.dumps(semantic, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


# -- table helpers -----------------------------------------------------------
class Table:
    def __init__(self, name, header, rows=None, text=None):
        self.name = name
        self.header = list(header)
        self.rows = [list(r) for r in (rows or [])]
        self._text = text

    def to_csv(self):
        if self._text is not None:
            return self._text
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()

    def records(self):
        reader = csv.reader(io.StringIO(self.to_csv()))
        header = next(reader)
        return [dict(zip(header, row)) for row in reader]


def _num(x, digits=17):
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return format_real(x, digits)


def _cplx(z):
    return format_complex(z, 25)


# -- payload parsing ---------------------------------------------------------
def _eigen(payload, prec):
    items = payload.get("eigenvalues")
    if not items:
        raise ConfigError("payload.eigenvalues is required")
    try:
        return EigenData.from_literals(items, prec)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad eigenvalue: {exc}") from None


def _series(literal, n, order, prec):
    """Nonlinear part (or full map) from a literal; 1-d maps become TruncSeries."""
    ring = ScalarRing(prec)
    try:
        if isinstance(literal, dict):
            coeffs = {int(k): parse_complex(str(v), prec) for k, v in literal.items()}
            s = TruncSeries.from_coeffs(coeffs, order=max([order] + list(coeffs)), ring=ring)
            return s if n == 1 else None
        comps = [{parse_index(k): parse_complex(str(v), prec) for k, v in c.items()} for c in literal]
    except ValueError as exc:
        raise ConfigError(f"bad series literal: {exc}") from None
    if len(comps) != n:
        raise ConfigError(f"series has {len(comps)} components, expected {n}")
    top = max([order] + [sum(k) for c in comps for k in c])
    try:
        ms = MultiSeries.from_components(comps, nvars=n, order=top, ring=ring)
    except SmallDivisorError as exc:
        raise ConfigError(str(exc)) from None
    if n == 1:
        c = [ring.zero()] * (top + 1)
        for (k,), v in ms.components[0].items():
            c[k] = v
        return TruncSeries(tuple(c), ring)
    return ms


def _with_linear(series, eig):
    """Add ``diag(lambda) z`` to a nonlinear part."""
    ring = series.ring
    with working_precision(ring.prec):
        if isinstance(series, TruncSeries):
            c = list(series.coeffs)
            c[1] = c[1] + eig.values[0]
            return TruncSeries(tuple(c), ring)
        n = series.nvars
        comps = []
        for j, comp in enumerate(series.components):
            d = dict(comp)
            e = unit_index(n, j)
            d[e] = d[e] + eig.values[j] if e in d else eig.values[j] + 0
            comps.append(d)
        return MultiSeries.from_components(comps, nvars=n, order=series.order, ring=ring)


def _policy(cfg):
    return WindowPolicy(**cfg.get("thresholds", {}))


def _point(values, prec):
    return tuple(complex(parse_complex(str(v), prec)) for v in values)


def _geometry(desc, prec):
    kind = desc["kind"]
    if kind == "points":
        return PointSet(tuple(_point(p, prec) for p in desc["points"]))
    if kind == "line":
        return ComplexLine(
            _point(desc["base"], prec),
            _point(desc["direction"], prec),
            float(desc.get("s_start", 0.0)),
            float(desc.get("s_end", 1.0)),
            bool(desc.get("random", False)),
        )
    return Grid(tuple(tuple(complex(parse_complex(str(v), prec)) for v in axis) for axis in desc["axes"]))


def _family(payload, prec):
    eig = _eigen(payload, prec)
    n = eig.dimension
    terms = {}
    m = payload.get("num_params")
    for item in payload["terms"]:
        idx = parse_index(item["param"])
        if m is None:
            m = len(idx)
        s = _series(item["series"], n, 2, prec)
        if s is None:
            raise ConfigError("one-variable series literal given for a multivariate family")
        if idx in terms:
            raise ConfigError(f"duplicate parameter exponent {item['param']}")
        terms[idx] = s
    try:
        return GermFamily(
            eig, m, terms,
            payload.get("valuation_mode", "fixed-degree"),
            payload.get("epsilon0"),
        )
    except (ValueError, SmallDivisorError) as exc:
        raise ConfigError(str(exc)) from None


# -- commands ----------------------------------------------------------------
def _cmd_bruno(cfg):
    p = cfg["payload"]
    prec = cfg["precision_bits"]
    literal = p.get("rotation", "golden")
    depth = p.get("depth", 60)
    try:
        rot = parse_rotation_number(literal, prec)
    except (ValueError, SmallDivisorError) as exc:
        raise ConfigError(f"bad rotation number {literal!r}: {exc}") from None
    cf = rot.continued_fraction(depth + 1)
    res = bruno_sum(cf, depth, tail_tol=p.get("tail_tol", 1e-6), floor=p.get("floor", 0.1), prec=prec)
    table = Table(
        "bruno",
        ["rotation", "depth", "partial_sum", "verdict", "quotients_computed", "precision_exhausted"],
        [[literal, depth, _num(res.partial_sum), res.verdict, cf.depth, str(cf.precision_exhausted).lower()]],
    )
    return [table], {"partial_sum": _num(res.partial_sum), "verdict": res.verdict}


def _coefficient_rows(h):
    with working_precision(h.ring.prec):
        return _coefficient_rows_at(h)


def _coefficient_rows_at(h):
    rows = []
    if isinstance(h, TruncSeries):
        for n, c in enumerate(h.coeffs):
            if not h.ring.is_zero(c):
                rows.append([0, str(n), _cplx(c), _num(abs(c))])
    else:
        for j, k, c in h.items():
            rows.append([j, format_index(k), _cplx(c), _num(abs(c))])
    return rows


def _cmd_linearize(cfg):
    p = cfg["payload"]
    prec, N = cfg["precision_bits"], cfg["trunc"]
    eig = _eigen(p, prec)
    s = _series(p["germ"], eig.dimension, N, prec)
    if s is None:
        raise ConfigError("one-variable germ literal given for a multivariate multiplier")
    germ = s if p.get("germ_includes_linear", False) else _with_linear(s, eig)
    if germ.order < N:
        germ = germ.padded(N)
    convention = p.get("resonant_convention", "error")
    if isinstance(germ, TruncSeries):
        h, dlog = linearize_germ_1d(germ, eig, N, convention)
    else:
        h, dlog = linearize_germ_nd(germ, eig, N, convention)
    residual = conjugacy_residual(h, germ, eig, N)
    coeffs = Table("coefficients", ["component", "index", "value", "abs"], _coefficient_rows(h))
    divisors = Table(
        "divisors",
        ["order", "min_divisor", "index", "component"],
        [[e.order, _num(e.magnitude), format_index(e.index), e.component] for e in dlog.entries],
    )
    summary = {"residual": _num(residual), "min_divisor_log10": _num(dlog.min_log10())}
    if N >= 16:
        rep = radius_estimate(coefficient_magnitudes(h), _policy(cfg))
        summary.update(radius_estimate=_num(rep.radius), verdict=rep.verdict,
                       growth_exponent=_num(rep.growth_exponent))
    return [coeffs, divisors], summary


def _cmd_family_sweep(cfg, cache=None):
    p = cfg["payload"]
    prec, N = cfg["precision_bits"], cfg["trunc"]
    fam = _family(p, prec)
    geometry = _geometry(p["geometry"], prec)
    samples = p.get("samples")
    if geometry.kind == "line" and samples is None:
        samples = 16
    policy = _policy(cfg)
    table = parameter_sweep(
        fam, geometry, samples, N, seed=cfg["seed"], window_policy=policy,
        workers=cfg["workers"], resonant_convention=p.get("resonant_convention", "error"),
        cache=cache,
    )
    tables = [Table("sweep", table.header(), text=table.to_csv())]
    summary = {"rows": len(table.rows), "verdicts": table.verdict_counts(), "sweep_metadata": table.metadata}
    if p.get("polar_probe", False):
        probe = polar_probe([(r.t[0], r.verdict == DIVERGENT) for r in table.rows])
        flagged = sum(1 for r in table.rows if r.verdict == DIVERGENT)
        tables.append(Table(
            "polar",
            ["flagged_capacity", "reference_capacity", "thinness_ratio", "flagged_count", "sample_count"],
            [[_num(probe.flagged_capacity), _num(probe.reference_capacity), _num(probe.thinness_ratio),
              flagged, len(table.rows)]],
        ))
        summary["thinness_ratio"] = _num(probe.thinness_ratio)
    return tables, summary


def _cmd_vf(cfg):
    p = cfg["payload"]
    prec, N = cfg["precision_bits"], cfg["trunc"]
    eig = _eigen(p, prec)
    s = _series(p["field"], eig.dimension, N, prec)
    if s is None:
        raise ConfigError("one-variable field literal given for a multivariate field")
    X = VectorFieldGerm(eig, as_multiseries(s))
    if "lattice" in p:
        try:
            lattice = ResonanceLattice(tuple(tuple(r) for r in p["lattice"]), eig)
        except (ValueError, SmallDivisorError) as exc:
            raise ConfigError(f"bad lattice: {exc}") from None
        h, g = vf_normal_form(X, lattice, N)
    else:
        h, _ = vf_linearize(X, N)
        g = None
    rows = [["h"] + r for r in _coefficient_rows(h)]
    if g is not None:
        rows += [["g"] + r for r in _coefficient_rows(g)]
    table = Table("coefficients", ["series", "component", "index", "value", "abs"], rows)
    residual = pushforward_residual(h, X, g, N)
    return [table], {"residual": _num(residual), "normal_form_terms": 0 if g is None else sum(len(c) for c in g.components)}


def _cmd_centralizer(cfg):
    p = cfg["payload"]
    prec, N = cfg["precision_bits"], cfg["trunc"]
    try:
        alpha = parse_rotation_number(p["alpha"], prec)
        betas = [parse_rotation_number(b, prec) for b in p["betas"]]
    except (ValueError, SmallDivisorError) as exc:
        raise ConfigError(f"bad rotation number: {exc}") from None
    eig = EigenData.from_angles([alpha], prec)
    f = _with_linear(_series(p["germ"], 1, N, prec), eig)
    if f.order < N:
        f = f.padded(N)
    moser = p.get("moser")
    grid = [(gm, tau) for gm in moser["gammas"] for tau in moser["taus"]] if moser else []
    header = ["beta"] + [f"moser_holds_g{gm:g}_t{tau:g}" for gm, tau in grid]
    header += ["g_growth_verdict", "g_radius_estimate", "residual"]
    rows = []
    for lit, beta in zip(p["betas"], betas):
        probe = centralizer_candidate(f, eig, beta, N)
        cells = [lit]
        for gm, tau in grid:
            res = moser_pair_check(MoserQuery(alpha, beta, gm, tau, moser["q_max"]))
            cells.append(str(res.holds).lower())
        rep = probe.growth
        cells += [rep.verdict if rep else "", _num(rep.radius) if rep else "", _num(probe.residual)]
        rows.append(cells)
    return [Table("centralizer", header, rows)], {"betas": len(rows)}


def _capacity_points(desc, prec):
    if isinstance(desc, list):
        return [complex(parse_complex(str(v), prec)) for v in desc]
    count = desc["count"]
    if desc["kind"] == "circle":
        c = complex(parse_complex(str(desc.get("center", 0)), prec))
        r = float(desc.get("radius", 1.0))
        return list(c + r * np.exp(2j * np.pi * np.arange(count) / count))
    a = complex(parse_complex(str(desc.get("a", -1)), prec))
    b = complex(parse_complex(str(desc.get("b", 1)), prec))
    return list(a + (b - a) * np.linspace(0.0, 1.0, count))


def _cmd_capacity(cfg):
    p = cfg["payload"]
    pts = _capacity_points(p["points"], cfg["precision_bits"])
    if max(p["orders"]) > len(pts):
        raise ConfigError("an order exceeds the number of points")
    sample = capacity_sample(pts, p["orders"], p.get("strategy", "auto"))
    return [Table("capacity", [], text=sample.to_csv())], {"point_count": len(pts)}


def _cmd_resonances(cfg):
    p = cfg["payload"]
    eig = _eigen(p, cfg["precision_bits"])
    max_order = p.get("max_order", cfg.get("trunc", 12))
    res = detect_resonances(eig, max_order)
    rows = [[format_index(i), j, str(flag).lower()] for (i, j), flag in zip(res.entries, res.numeric_only)]
    return [Table("resonances", ["index", "component", "numeric_only"], rows)], {"count": len(rows)}


_HANDLERS = {
    "bruno": _cmd_bruno,
    "linearize": _cmd_linearize,
    "family-sweep": _cmd_family_sweep,
    "vf": _cmd_vf,
    "centralizer": _cmd_centralizer,
    "capacity": _cmd_capacity,
    "resonances": _cmd_resonances,
}


def compute(cfg, cache=None):
    handler = _HANDLERS[cfg["command"]]
    if cfg["command"] == "family-sweep":
        return handler(cfg, cache)
    return handler(cfg)


# -- precision verification --------------------------------------------------
def _as_float(cell):
    try:
        return float(cell)
    except ValueError:
        pass
    try:
        return complex(cell.replace("i", "j"))
    except ValueError:
        return None


def diff_tables(a, b, rtol=VERIFY_RTOL):
    """Cells that differ beyond ``rtol`` (relative) between two table lists."""
    problems = []
    for ta, tb in zip(a, b):
        ra, rb = ta.records(), tb.records()
        if len(ra) != len(rb):
            problems.append(f"{ta.name}: row count {len(ra)} vs {len(rb)}")
            continue
        for k, (x, y) in enumerate(zip(ra, rb)):
            for col in x:
                u, v = x[col], y.get(col)
                if u == v:
                    continue
                fu, fv = _as_float(u), _as_float(v)
                if fu is None or fv is None:
                    problems.append(f"{ta.name}[{k}].{col}: {u!r} vs {v!r}")
                    continue
                if fu == fv:
                    continue
                scale = max(abs(fu), abs(fv))
                if math.isinf(scale) or abs(fu - fv) > rtol * scale:
                    problems.append(f"{ta.name}[{k}].{col}: {u} vs {v}")
    return problems


# -- output ------------------------------------------------------------------
def atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def run_experiment(config, stdout_json=False, log_stream=None):
    """Validate, compute and write one experiment; returns an exit code.

    Tables go to ``<out>/<command>.<table>.csv``, metadata to
    ``<out>/<command>.meta.json`` and the log to ``<out>/<command>.log``.
    """
    try:
        validate_config(config)
        cfg = normalize_config(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=log_stream or sys.stderr)
        return ExitCode.CONFIG
    cmd = cfg["command"]
    prefix = cmd.replace("-", "_")
    out = cfg["out"]
    lines = []

    def note(msg):
        lines.append(msg)
        log.info(msg)

    cache = None
    if cfg.get("cache_dir"):
        from .cache import CoefficientCache

        cache = CoefficientCache(cfg["cache_dir"])
    start = time.perf_counter()
    try:
        tables, summary = compute(cfg, cache)
        note(f"{cmd}: computed {len(tables)} table(s) at {cfg['precision_bits']} bits "
             f"in {time.perf_counter() - start:.2f}s")
        if cfg["verify_precision"]:
            doubled = dict(cfg, precision_bits=2 * cfg["precision_bits"])
            t0 = time.perf_counter()
            check, _ = compute(doubled, None)
            problems = diff_tables(tables, check)
            note(f"doubling-precision check at {doubled['precision_bits']} bits: "
                 f"{len(problems)} disagreement(s) in {time.perf_counter() - t0:.2f}s")
            if problems:
                for msg in problems[:20]:
                    print(f"precision disagreement: {msg}", file=sys.stderr)
                return ExitCode.PRECISION
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return ExitCode.CONFIG
    except (ResonantDivisor, ObstructionNonzero, LatticeMismatch) as exc:
        print(f"resonance: {exc}", file=sys.stderr)
        return ExitCode.RESONANCE
    except (PrecisionDisagreement, InsufficientDepth) as exc:
        print(f"precision: {exc}", file=sys.stderr)
        return ExitCode.PRECISION
    except SmallDivisorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitCode.FAILURE

    files = {}
    for t in tables:
        name = f"{prefix}.{t.name}.csv"
        atomic_write(os.path.join(out, name), t.to_csv())
        files[t.name] = name
    meta = {
        "tool": "smalldiv",
        "version": __version__,
        "command": cmd,
        "config": {k: v for k, v in cfg.items() if k not in _NON_SEMANTIC},
        "config_sha256": config_hash(cfg),
        "precision_bits": cfg["precision_bits"],
        "seed": cfg["seed"],
        "thresholds": WindowPolicy(**cfg.get("thresholds", {})).as_dict(),
        "verify_precision": cfg["verify_precision"],
        "tables": files,
        "summary": _jsonable(summary),
    }
    meta_text = json.dumps(meta, indent=2, sort_keys=True) + "\n"
    atomic_write(os.path.join(out, f"{prefix}.meta.json"), meta_text)
    atomic_write(os.path.join(out, f"{prefix}.log"), "\n".join(lines) + "\n")
    if stdout_json:
        payload = dict(meta, rows={t.name: t.records() for t in tables})
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for t in tables:
            print(f"wrote {os.path.join(out, files[t.name])} ({len(t.records())} rows)")
    return ExitCode.OK


# -- argument parsing --------------------------------------------------------
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--prec-bits", type=int, dest="precision_bits", help="working precision in bits")
    common.add_argument("--trunc", type=int, help="truncation order N")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="worker processes for sweeps")
    common.add_argument("--json", action="store_true", help="machine-readable stdout")
    common.add_argument("--verify-precision", action="store_true", default=None,
                        help="re-run at doubled precision and fail (exit 4) on disagreement")
    common.add_argument("--cache-dir", help="coefficient cache directory")

    parser = argparse.ArgumentParser(prog="smalldiv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"smalldiv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("bruno", parents=[common], help="Bruno partial sum of a rotation number")
    p.add_argument("--rotation")
    p.add_argument("--depth", type=int)
    sub.add_parser("linearize", parents=[common], help="linearize a germ from a config")
    sub.add_parser("family-sweep", parents=[common], help="parameter sweep of a germ family")
    sub.add_parser("vf", parents=[common], help="vector-field linearization / normal form")
    sub.add_parser("centralizer", parents=[common], help="centralizer candidates for several beta")
    sub.add_parser("capacity", parents=[common], help="transfinite diameter of a point set")
    p = sub.add_parser("resonances", parents=[common], help="list multiplicative resonances")
    p.add_argument("--angles", nargs="+", help="rotation-number literals of the eigenvalues")
    p.add_argument("--values", nargs="+", help="exact rational eigenvalues")
    p.add_argument("--max-order", type=int)
    return parser


def config_from_args(args):
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
        if config.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {config.get('command')!r}, not {args.command!r}")
    else:
        config = {}
    config["command"] = args.command
    for key in ("precision_bits", "trunc", "seed", "out", "workers", "verify_precision", "cache_dir"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    payload = config.setdefault("payload", {}) if _has_payload_flags(args) else config.get("payload")
    if args.command == "bruno":
        if args.rotation is not None:
            payload["rotation"] = args.rotation
        if args.depth is not None:
            payload["depth"] = args.depth
    if args.command == "resonances":
        eigs = [{"angle": a} for a in args.angles or []] + [{"value": v} for v in args.values or []]
        if eigs:
            payload["eigenvalues"] = eigs
        if args.max_order is not None:
            payload["max_order"] = args.max_order
    return config


def _has_payload_flags(args):
    return any(getattr(args, k, None) is not None for k in ("rotation", "depth", "angles", "values", "max_order"))


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return ExitCode.CONFIG
    return run_experiment(config, stdout_json=args.json)


if __name__ == "__main__":
    sys.exit(main())
