"""Command-line entry point.

Subcommands: cm, sphere-study, solve, bench, profiles.  Every run resolves
one seed (--seed beats the config value, which beats the RDS_SEED
environment variable, which beats 0), validates its whole config before
writing anything, writes its data files plus a run manifest into --out, and
exits 0.  Config problems exit 2 with a one-line field diagnostic on
stderr; runtime failures exit 1.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from ._util import config_digest
from .bench import (FAMILIES, ProblemSpec, data_profile, default_strategies,
                    generate_instance, head_to_head, record_from_json,
                    run_grid)
from .pss import (GENERATORS, NotPositiveSpanningError, complexity_measure,
                  cosine_measure_exact, pss_from_json)
from .solver import SolverConfig, direct_search
from .sphere import cm_range_scan, corollary_53_table, sphere_heatmap
from .tangent import PollingStrategy

_MIN_SCAN_N = 3


class ConfigError(Exception):
    """Invalid configuration; carries the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


def _field(cfg: dict, name: str, kind, *, required: bool = True, default=None,
           where: str = ""):
    path = f"{where}.{name}" if where else name
    if name not in cfg:
        if required:
            raise ConfigError(path, "missing required field")
        return default
    value = cfg[name]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(path, "expected an integer, got a boolean")
    if not isinstance(value, kind):
        raise ConfigError(path, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _int_list(cfg: dict, name: str, *, required: bool = True, default=None,
              where: str = "", minimum: int = 1):
    values = _field(cfg, name, list, required=required, default=None, where=where)
    if values is None:
        return default
    path = f"{where}.{name}" if where else name
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{path}[{i}]", "expected an integer")
        if v < minimum:
            raise ConfigError(f"{path}[{i}]", f"must be >= {minimum}")
        out.append(v)
    if not out:
        raise ConfigError(path, "must not be empty")
    return out


def _load_config(path: str) -> dict:
    if not os.path.isfile(path):
        raise ConfigError("config", f"no such file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(obj, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return obj


def _resolve_seed(arg_seed, config_seed) -> int:
    if arg_seed is not None:
        return int(arg_seed)
    if config_seed is not None:
        if isinstance(config_seed, bool) or not isinstance(config_seed, int):
            raise ConfigError("seed", "expected an integer")
        return config_seed
    env = os.environ.get("RDS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError("RDS_SEED", f"not an integer: {env!r}")
    return 0


def _float_csv(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_float_csv(v) for v in row))
    return "\n".join(lines) + "\n"


class _OutputSet:
    """Collects (name, text) pairs and writes them all at once, so a failed
    run never leaves a partial directory behind config validation."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.files: list[tuple[str, str]] = []

    def add(self, name: str, text: str):
        self.files.append((name, text))

    def flush(self) -> list[str]:
        os.makedirs(self.out_dir, exist_ok=True)
        for name, text in self.files:
            with open(os.path.join(self.out_dir, name), "w", encoding="utf-8",
                      newline="") as fh:
                fh.write(text)
        return [name for name, _ in self.files]


def _write_manifest(out_dir: str, subcommand: str, cfg_obj, seed: int,
                    names: list[str], started: str, notes: dict | None = None):
    manifest = {
        "tool_version": __version__,
        "subcommand": subcommand,
        "config_digest": config_digest(cfg_obj),
        "seed": seed,
        "output_files": names,
        "started": started,
        "finished": _now(),
    }
    if notes:
        manifest["notes"] = notes
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def _polling_from_config(cfg: dict, where: str) -> PollingStrategy:
    style = _field(cfg, "style", str, where=where)
    generator = _field(cfg, "generator", str, where=where)
    rotate = _field(cfg, "rotate", bool, required=False, default=False, where=where)
    seed = _field(cfg, "seed", int, required=False, default=0, where=where)
    try:
        return PollingStrategy(style, generator, rotate=rotate, seed=seed)
    except ValueError as exc:
        raise ConfigError(where, str(exc))


def _cmd_cm(args) -> int:
    started = _now()
    cfg = _load_config(args.config)
    generator = _field(cfg, "generator", str)
    if generator == "custom":
        directions = _field(cfg, "directions", list)
        if not directions:
            raise ConfigError("directions", "must not be empty")
    elif generator in GENERATORS:
        m = _field(cfg, "m", int)
        if m < 1:
            raise ConfigError("m", "must be >= 1")
        rot = cfg.get("rotation_seed")
        if rot is not None and (isinstance(rot, bool) or not isinstance(rot, int)):
            raise ConfigError("rotation_seed", "expected an integer")
    else:
        raise ConfigError("generator",
                          f"must be 'custom' or one of {sorted(GENERATORS)}")
    seed = _resolve_seed(args.seed, None)
    try:
        pss = pss_from_json(cfg)
    except ValueError as exc:
        raise ConfigError("directions" if generator == "custom" else "m", str(exc))

    report = cosine_measure_exact(pss)
    try:
        chi = complexity_measure(pss)
    except NotPositiveSpanningError:
        chi = None
    payload = {
        "cm": report.cosine_measure,
        "chi": chi,
        "cardinality": report.cardinality,
        "witness": [float(v) for v in report.witness],
        "active_set": list(report.active_set),
    }
    text = json.dumps(payload, sort_keys=True) + "\n"
    out = _OutputSet(args.out)
    out.add("cm.json", text)
    names = out.flush()
    _write_manifest(args.out, "cm", cfg, seed, names, started)
    sys.stdout.write(text)
    return 0


def _cmd_sphere_study(args) -> int:
    started = _now()
    cfg = _load_config(args.config) if args.config else {}
    heatmap_res = args.heatmap
    if heatmap_res is None:
        heatmap_res = _field(cfg, "heatmap", int, required=False)
    scan_arg = args.scan
    if scan_arg is None and "scan" in cfg:
        scan_list = _int_list(cfg, "scan", minimum=_MIN_SCAN_N)
    elif scan_arg is not None:
        try:
            scan_list = [int(tok) for tok in scan_arg.split(",") if tok.strip()]
        except ValueError:
            raise ConfigError("scan", f"expected comma-separated integers, got {scan_arg!r}")
        if not scan_list:
            raise ConfigError("scan", "must list at least one dimension")
        for n in scan_list:
            if n < _MIN_SCAN_N:
                raise ConfigError("scan", f"dimensions must be >= {_MIN_SCAN_N}, got {n}")
    else:
        scan_list = None
    if heatmap_res is None and scan_list is None:
        raise ConfigError("scan", "nothing to do: pass --heatmap and/or --scan")
    if heatmap_res is not None and heatmap_res < 8:
        raise ConfigError("heatmap", "resolution must be >= 8")
    samples = _field(cfg, "samples_per_n", int, required=False, default=100)
    if samples < 1:
        raise ConfigError("samples_per_n", "must be >= 1")
    seed = _resolve_seed(args.seed, cfg.get("seed"))

    effective = dict(cfg)
    if heatmap_res is not None:
        effective["heatmap"] = heatmap_res
    if scan_list is not None:
        effective["scan"] = scan_list
    effective["seed"] = seed

    out = _OutputSet(args.out)
    if heatmap_res is not None:
        rows = sphere_heatmap(heatmap_res)
        out.add("heatmap.csv", _csv_text(
            ["theta", "phi", "x1", "x2", "x3", "cm"],
            [[r["theta"], r["phi"], r["x1"], r["x2"], r["x3"], r["cm"]]
             for r in rows]))
    if scan_list is not None:
        rows = cm_range_scan(scan_list, samples_per_n=samples, seed=seed)
        out.add("scan.csv", _csv_text(
            ["n", "lower", "upper", "value_k1", "value_k_nminus1",
             "value_k_n", "mean_random"],
            [[r["n"], r["lower"], r["upper"], r["value_k1"],
              r["value_k_nminus1"], r["value_k_n"], r["mean_random"]]
             for r in rows]))
        table = corollary_53_table(scan_list)
        out.add("corollary53.csv", _csv_text(
            ["n", "chi_projected", "chi_intrinsic"],
            [[r["n"], r["chi_projected"], r["chi_intrinsic"]] for r in table]))
    names = out.flush()
    _write_manifest(args.out, "sphere-study", effective, seed, names, started)
    sys.stdout.write(f"wrote {', '.join(names)} to {args.out}\n")
    return 0


def _cmd_solve(args) -> int:
    started = _now()
    cfg = _load_config(args.config)
    prob_cfg = _field(cfg, "problem", dict)
    family = _field(prob_cfg, "family", str, where="problem")
    if family not in FAMILIES:
        raise ConfigError("problem.family", f"must be one of {sorted(FAMILIES)}")
    m = _field(prob_cfg, "m", int, where="problem")
    n = _field(prob_cfg, "n", int, where="problem")
    instance_seed = _field(prob_cfg, "instance_seed", int, where="problem")
    try:
        spec = ProblemSpec(family, m, n, instance_seed)
    except ValueError as exc:
        raise ConfigError("problem", str(exc))

    solver_cfg = _field(cfg, "solver", dict)
    budget = _field(solver_cfg, "budget", int, where="solver")
    polling_cfg = _field(solver_cfg, "polling", dict, where="solver")
    polling = _polling_from_config(polling_cfg, "solver.polling")
    seed = _resolve_seed(args.seed, solver_cfg.get("seed"))
    kwargs = {}
    for name in ("alpha0", "alpha_max", "c", "gamma_dec", "gamma_inc", "grad_tol"):
        value = _field(solver_cfg, name, float, required=False, where="solver")
        if value is not None:
            kwargs[name] = value
    retraction = _field(solver_cfg, "retraction", str, required=False, where="solver")
    if retraction is not None:
        kwargs["retraction"] = retraction
    try:
        scfg = SolverConfig(budget=budget, polling=polling, seed=seed, **kwargs)
    except ValueError as exc:
        raise ConfigError("solver", str(exc))

    problem = generate_instance(spec)
    trace = direct_search(problem, scfg)
    payload = trace.to_json_dict()
    payload["problem"] = spec.to_json()
    out = _OutputSet(args.out)
    out.add("trace.json", json.dumps(payload, sort_keys=True) + "\n")
    names = out.flush()
    _write_manifest(args.out, "solve", cfg, seed, names, started)
    sys.stdout.write(
        f"final_f={trace.final_f!r} evals={trace.evals} "
        f"successes={trace.successes()} final_alpha={trace.final_alpha!r}\n")
    return 0


def _cmd_bench(args) -> int:
    started = _now()
    cfg = _load_config(args.config)
    families = cfg.get("families", list(FAMILIES))
    if not isinstance(families, list) or not families:
        raise ConfigError("families", "expected a non-empty list")
    for i, fam in enumerate(families):
        if fam not in FAMILIES:
            raise ConfigError(f"families[{i}]", f"must be one of {sorted(FAMILIES)}")
    m_list = _int_list(cfg, "m")
    codims = _int_list(cfg, "codims", minimum=0)
    instances = _field(cfg, "instances", int, required=False, default=100)
    if instances < 1:
        raise ConfigError("instances", "must be >= 1")
    budget_factor = _field(cfg, "budget_factor", int, required=False, default=100)
    if budget_factor < 1:
        raise ConfigError("budget_factor", "must be >= 1")
    strat_cfg = cfg.get("strategies")
    if strat_cfg is None:
        strategies = default_strategies()
    else:
        if not isinstance(strat_cfg, list) or not strat_cfg:
            raise ConfigError("strategies", "expected a non-empty list")
        strategies = [_polling_from_config(sc, f"strategies[{i}]")
                      for i, sc in enumerate(strat_cfg)]
    for family in families:
        if family == "rayleigh_sphere" and min(codims) < 1:
            raise ConfigError("codims", "rayleigh_sphere needs codimension >= 1")
    seed = _resolve_seed(args.seed, cfg.get("base_seed"))

    records = run_grid(m_list, codims, strategies, families=families,
                       instances=instances, budget_factor=budget_factor,
                       base_seed=seed, threads=args.threads)
    lines = [json.dumps(r.to_json(), sort_keys=True) for r in records]
    out = _OutputSet(args.out)
    out.add("records.ndjson", "\n".join(lines) + "\n")
    names = out.flush()
    failures = sum(1 for r in records if r.error is not None)
    _write_manifest(args.out, "bench", cfg, seed, names, started, notes={
        "distributions": "barycenter points and quadratic b are standard "
                         "Gaussian draws; subspaces and rotations are "
                         "orthogonalized Gaussian matrices",
        "solves": len(records),
        "failures": failures,
    })
    sys.stdout.write(f"solves={len(records)} failures={failures} "
                     f"file=records.ndjson\n")
    return 0


def _cmd_profiles(args) -> int:
    started = _now()
    cfg = _load_config(args.config)
    records_path = _field(cfg, "records", str)
    if not os.path.isfile(records_path):
        raise ConfigError("records", f"no such file: {records_path}")
    tau = _field(cfg, "tau", float, required=False, default=1e-2)
    if tau <= 0.0:
        raise ConfigError("tau", "must be positive")
    budget_factor = _field(cfg, "budget_factor", int, required=False, default=100)
    if budget_factor < 1:
        raise ConfigError("budget_factor", "must be >= 1")
    pairs_cfg = cfg.get("head_to_head")
    if pairs_cfg is not None and not isinstance(pairs_cfg, list):
        raise ConfigError("head_to_head", "expected a list")
    seed = _resolve_seed(args.seed, None)

    records = []
    with open(records_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(record_from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError("records", f"bad record on line {lineno}: {exc}")
    usable = [r for r in records if r.error is None and r.history]
    if not usable:
        raise ConfigError("records", "no usable records (all failed or empty)")

    if pairs_cfg is None:
        pairs = set()
        for r in usable:
            parts = r.solver_id.split("-")
            if len(parts) == 3 and parts[2] in ("rot", "norot"):
                pairs.add((parts[1], parts[2] == "rot"))
        pairs = sorted(pairs)
    else:
        pairs = []
        for i, pc in enumerate(pairs_cfg):
            if not isinstance(pc, dict):
                raise ConfigError(f"head_to_head[{i}]", "expected an object")
            gen = _field(pc, "generator", str, where=f"head_to_head[{i}]")
            rot = _field(pc, "rotate", bool, where=f"head_to_head[{i}]")
            pairs.append((gen, rot))

    out = _OutputSet(args.out)
    cells = sorted({(r.problem.m, r.problem.n - r.problem.m) for r in usable})
    for m, codim in cells:
        subset = [r for r in usable
                  if r.problem.m == m and r.problem.n - r.problem.m == codim]
        profile = data_profile(subset, tau, budget_factor=budget_factor)
        ids = sorted(profile.curves)
        rows = [[alpha] + [profile.curves[s][i] for s in ids]
                for i, alpha in enumerate(profile.alphas)]
        out.add(f"profile_m{m}_codim{codim}.csv",
                _csv_text(["alpha"] + ids, rows))
    for generator, rotate in pairs:
        table = head_to_head(records, generator, rotate)
        rot = "rot" if rotate else "norot"
        rows = []
        for (m, codim), (frac, wins, n_pairs) in table.cells.items():
            rows.append([m, codim, frac if frac is not None else math.nan,
                         wins, n_pairs])
        out.add(f"head_to_head_{generator}_{rot}.csv",
                _csv_text(["m", "codim", "fraction", "wins", "pairs"], rows))
        if table.unpaired:
            sys.stderr.write(f"warning: {table.unpaired} unpaired problems for "
                             f"{generator}-{rot}\n")
    names = out.flush()
    _write_manifest(args.out, "profiles", cfg, seed, names, started)
    sys.stdout.write(f"wrote {len(names)} files to {args.out}\n")
    return 0


_COMMANDS = {
    "cm": (_cmd_cm, True),
    "sphere-study": (_cmd_sphere_study, False),
    "solve": (_cmd_solve, True),
    "bench": (_cmd_bench, True),
    "profiles": (_cmd_profiles, True),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdsearch",
        description="Direct-search optimization on embedded manifolds: "
                    "polling-set measures, sphere studies, solves, and "
                    "benchmark grids.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, (_, config_required) in _COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", required=config_required,
                       help="JSON configuration file")
        p.add_argument("--seed", type=int, default=None,
                       help="seed override (beats config and RDS_SEED)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for grid runs")
        if name == "sphere-study":
            p.add_argument("--heatmap", type=int, default=None, metavar="RES",
                           help="write a latitude/longitude measure grid on "
                                "the 2-sphere at this resolution")
            p.add_argument("--scan", default=None, metavar="N1,N2,...",
                           help="write measure ranges for these sphere "
                                "dimensions")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    handler, _ = _COMMANDS[args.subcommand]
    try:
        return handler(args)
    except ConfigError as exc:
        sys.stderr.write(json.dumps(
            {"error": "config", "field": exc.field, "message": str(exc)}) + "\n")
        return 2
    except Exception as exc:
        sys.stderr.write(json.dumps(
            {"error": "runtime", "message": f"{type(exc).__name__}: {exc}"}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
