"""Command-line interface.

Verbs: pressure | spectrum | domain | membership | subdiff | verify.
Every command reads a JSON config (or a built-in example), writes CSV
results plus a JSON summary embedding the tool version, the hash of the
normalized config, seeds, depth budgets, thread count, and the
tolerances in force, and echoes the normalized config next to the
results as the canonical reproducibility record.

Exit codes: 0 success, 1 failed verification checks, 2 configuration
errors (the diagnostic names the offending key), 3 numeric domain
errors.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, catalog, convex, spectrum as spectrum_mod
from . import config as config_mod
from . import pressure as pressure_mod
from .errors import (BudgetExceededError, ConfigError, DomainError,
                     EmptySumError, IllPosedCombinationError, SupportError,
                     ThermolyapError)

ENV_THREADS = "THERMOLYAP_THREADS"
ENV_SEED = "THERMOLYAP_SEED"


def _fmt(x):
    if x is None:
        return ""
    x = float(x)
    if np.isnan(x):
        return ""
    return f"{x:.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) if not isinstance(x, str) else x
                              for x in row) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if np.isfinite(x):
            return x
        return {float("inf"): "inf", float("-inf"): "-inf"}.get(x, "nan")
    return obj


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _summary(cfg, command, threads, extra):
    out = {
        "tool": "thermolyap",
        "version": __version__,
        "command": command,
        "name": cfg.name,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "threads": threads,
        "n": cfg.n,
        "n_max": cfg.n_max,
        "tolerances": cfg.tolerances,
    }
    out.update(extra)
    return out


def _cmd_pressure(cfg, out_dir, threads):
    if cfg.pressure is not None:
        gf = cfg.pressure.grid_function()
        rows = [(q, v) for q, v in zip(gf.grid, gf.values)]
        csv_path = _write_csv(os.path.join(out_dir, f"pressure_{cfg.name}.csv"),
                              ["q", "value"], rows)
        extra = {"synthetic": True, "convexity_defect": gf.convexity_defect,
                 "domain": cfg.pressure.domain}
    else:
        if cfg.q_grid is None:
            raise ConfigError("grids.q", "pressure needs a q grid")
        pot = cfg.primary_potential()
        summary = pressure_mod.level_summaries(
            cfg.space, pot, cfg.q_grid, range(1, cfg.n + 1), threads=threads)
        ns = summary.n_levels[:, None]
        per_n = summary.log_sums / ns
        values = per_n[-1]
        from .cocycle import check_submultiplicativity
        report = check_submultiplicativity(cfg.space, pot, min(5, cfg.n))
        checked = report.holds(pressure_mod.H_CHECK_SLACK)
        from .potentials import ADDITIVE
        valid = checked & ((cfg.q_grid > 0) | (pot.structure == ADDITIVE))
        upper = np.where(valid, per_n.min(axis=0), np.nan)
        rows = [(q, v, u, None) for q, v, u in zip(cfg.q_grid, values, upper)]
        csv_path = _write_csv(os.path.join(out_dir, f"pressure_{cfg.name}.csv"),
                              ["q", "value", "upper", "lower"], rows)
        rates = summary.word_max / summary.n_levels
        extra = {
            "synthetic": False,
            "convexity_defect": pressure_mod.midpoint_convexity_defect(
                cfg.q_grid, values),
            "top_exponent_bracket": {"latest": rates[-1],
                                     "best_upper": float(rates.min())},
            "submultiplicative_checked": bool(checked),
        }
    json_path = _write_json(os.path.join(out_dir, f"pressure_{cfg.name}.json"),
                            _summary(cfg, "pressure", threads, extra))
    return [csv_path, json_path]


def _spectrum_flag(v):
    return "outside" if np.isneginf(v) else "inside"


def _cmd_spectrum(cfg, out_dir, threads):
    if cfg.alpha_grid is None:
        raise ConfigError("grids.alpha", "spectrum needs an alpha grid")
    if cfg.pressure is not None:
        gf = cfg.pressure.grid_function()
        vals = [convex.legendre_infimum(gf, a, domain=cfg.pressure.domain).value
                for a in cfg.alpha_grid]
        vals = np.asarray(vals)
        dom = (convex.asymptotic_slope(gf, -1).slope
               if cfg.pressure.domain == pressure_mod.ALL_Q else None,
               convex.asymptotic_slope(gf, +1).slope)
        extra = {"synthetic": True, "provenance": cfg.pressure.domain,
                 "domain": {"lower": dom[0], "upper": dom[1]},
                 "label": spectrum_mod.SPECTRUM_LABEL}
    else:
        pot = cfg.primary_potential()
        curve = spectrum_mod.spectrum_curve(cfg.space, pot, cfg.alpha_grid,
                                            cfg.n, q_grid=cfg.q_grid)
        vals = curve.values
        extra = {"synthetic": False, "provenance": curve.provenance,
                 "domain": {"lower": curve.domain[0], "upper": curve.domain[1]},
                 "label": curve.label,
                 "convexity_defect": curve.meta.get("convexity_defect")}
    rows = [(a, v, _spectrum_flag(v)) for a, v in zip(cfg.alpha_grid, vals)]
    csv_path = _write_csv(os.path.join(out_dir, f"spectrum_{cfg.name}.csv"),
                          ["alpha", "value", "flag"], rows)
    json_path = _write_json(os.path.join(out_dir, f"spectrum_{cfg.name}.json"),
                            _summary(cfg, "spectrum", threads, extra))
    return [csv_path, json_path]


def _cmd_domain(cfg, out_dir, threads):
    pot = cfg.primary_potential()
    curve = None
    if cfg.q_grid is not None:
        curve = pressure_mod.pressure_curve(cfg.space, pot, cfg.q_grid, cfg.n,
                                            brackets=False, threads=threads)
    dom = spectrum_mod.lyapunov_domain(cfg.space, pot, cfg.n, curve=curve)
    rows = [(k + 1, dom.max_sequence[k], dom.min_sequence[k])
            for k in range(dom.max_sequence.size)]
    csv_path = _write_csv(os.path.join(out_dir, f"domain_{cfg.name}.csv"),
                          ["n", "max_rate", "min_rate"], rows)
    extra = {"lower": dom.lower, "upper": dom.upper,
             "upper_direct": dom.upper_direct, "lower_direct": dom.lower_direct,
             "slope_upper": dom.slope_upper, "slope_lower": dom.slope_lower}
    json_path = _write_json(os.path.join(out_dir, f"domain_{cfg.name}.json"),
                            _summary(cfg, "domain", threads, extra))
    return [csv_path, json_path]


def _cmd_membership(cfg, out_dir, threads):
    spec = cfg.membership
    if not spec:
        raise ConfigError("membership", "config has no membership table")
    try:
        num = cfg.potentials[spec["numerator"]]
        den = cfg.potentials[spec["denominator"]]
    except KeyError as e:
        raise ConfigError("membership", f"unknown potential {e.args[0]!r}") from None
    a = np.atleast_1d(np.asarray(spec.get("a"), dtype=float))
    res = spectrum_mod.membership(cfg.space, [num], [den], a,
                                  q_grid=cfg.q_grid, n=cfg.n)
    value, _ = spectrum_mod.ratio_spectrum(cfg.space, [num], [den], a,
                                           q_grid=cfg.q_grid, n=cfg.n)
    extra = {"a": a, "classification": res.classification,
             "infimum": res.value, "ratio_spectrum_value": value,
             "band": res.band, "edge_slope": res.edge_slope}
    json_path = _write_json(os.path.join(out_dir, f"membership_{cfg.name}.json"),
                            _summary(cfg, "membership", threads, extra))
    return [json_path]


def _cmd_subdiff(cfg, out_dir, threads):
    spec = cfg.subdiff
    if not spec or "q" not in spec:
        raise ConfigError("subdiff.q", "base point required")
    q = np.atleast_1d(np.asarray(spec["q"], dtype=float))
    if cfg.pressure is not None and cfg.pressure.dimension == 2:
        poly = convex.subgradient_polygon(
            cfg.pressure, q, n_directions=int(spec.get("directions", 64)))
        extra = {"q": q, "polygon": poly,
                 "directions": int(spec.get("directions", 64))}
    else:
        if cfg.pressure is not None:
            gf = cfg.pressure.grid_function()
        else:
            pot = cfg.primary_potential()
            if cfg.q_grid is None:
                raise ConfigError("grids.q", "subdiff on a potential needs a q grid")
            curve = pressure_mod.pressure_curve(cfg.space, pot, cfg.q_grid,
                                                cfg.n, brackets=False,
                                                threads=threads)
            gf = convex.GridFunction(curve.q_grid, curve.values)
        interval = convex.subdifferential(gf, float(q[0]))
        extra = {"q": interval.q,
                 "interval": {"left": interval.left, "right": interval.right},
                 "convexity_defect": gf.convexity_defect}
    json_path = _write_json(os.path.join(out_dir, f"subdiff_{cfg.name}.json"),
                            _summary(cfg, "subdiff", threads, extra))
    return [json_path]


def _cmd_verify(out_dir, threads):
    from . import verify
    report = verify.run_all(printer=print)
    report["version"] = __version__
    report["threads"] = threads
    path = _write_json(os.path.join(out_dir, "verify_report.json"), report)
    print(f"report: {path}")
    return report, [path]


COMMANDS = {
    "pressure": _cmd_pressure,
    "spectrum": _cmd_spectrum,
    "domain": _cmd_domain,
    "membership": _cmd_membership,
    "subdiff": _cmd_subdiff,
}


def run_command(command, doc, out_dir, threads=1, seed=None):
    """Programmatic entry point: run a verb on a config document.

    ``doc`` may be a dict, a path to a JSON file, or a built-in example
    name.  Returns the list of written file paths.
    """
    if isinstance(doc, str):
        if doc in catalog.BUILTIN_EXAMPLES:
            doc = catalog.example_document(doc)
        else:
            with open(doc, encoding="utf-8") as fh:
                doc = json.load(fh)
    if seed is not None:
        doc = dict(doc)
        doc["seed"] = int(seed)
    cfg = config_mod.parse(doc)
    os.makedirs(out_dir, exist_ok=True)
    echo = os.path.join(out_dir, f"config_{cfg.name}.json")
    with open(echo, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(config_mod.canonical_json(cfg.raw))
        fh.write("\n")
    paths = COMMANDS[command](cfg, out_dir, threads)
    return paths + [echo]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="thermolyap",
        description="Topological pressure, Lyapunov spectra, and convex "
                    "analysis on symbolic systems.",
        epilog=f"Environment overrides: {ENV_THREADS} (thread count), "
               f"{ENV_SEED} (seed). Precedence: flag, then environment, "
               "then config/default.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("pressure", "pressure curve over the q grid"),
            ("spectrum", "Legendre spectrum over the alpha grid"),
            ("domain", "attainable-exponent interval with brackets"),
            ("membership", "classify a ratio-exponent vector"),
            ("subdiff", "subdifferential interval or 2-d subgradient polygon"),
            ("verify", "run the built-in verification suite")):
        p = sub.add_parser(name, help=help_text)
        if name != "verify":
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--config", help="path to a JSON config")
            src.add_argument("--example", choices=catalog.BUILTIN_EXAMPLES,
                             help="built-in example name")
        p.add_argument("--out", default="thermolyap-out",
                       help="output directory (default: %(default)s)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: all cores)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get(ENV_THREADS, os.cpu_count() or 1))
    seed = args.seed
    if seed is None and ENV_SEED in os.environ:
        seed = int(os.environ[ENV_SEED])
    try:
        if args.command == "verify":
            os.makedirs(args.out, exist_ok=True)
            report, _ = _cmd_verify(args.out, threads)
            return 0 if report["all_passed"] else 1
        doc = args.config if args.config else args.example
        paths = run_command(args.command, doc, args.out, threads=threads,
                            seed=seed)
        for p in paths:
            print(p)
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (DomainError, EmptySumError, BudgetExceededError,
            IllPosedCombinationError, SupportError) as e:
        print(f"numeric domain error: {e}", file=sys.stderr)
        return 3
    except ThermolyapError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
