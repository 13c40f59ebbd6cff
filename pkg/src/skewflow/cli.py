"""Command-line front end.

Commands:
  gallery list        built-in systems with defaults and tags
  axioms              flow-law checks on seeded probes
  growth              growth-envelope estimation (uniform and binned)
  classify            full criterion panels and classification
  sweep               parameter sweep, one CSV row per combination

Exit codes: 0 definite verdict, 1 inconclusive, 2 usage/config error,
3 classification contradicts a declared ground-truth tag.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from datetime import datetime, timezone

from . import gallery
from .config import ConfigError, RunConfig, load_config_file, merge_config
from .core import System, check_cocycle_law, check_semiflow_law
from .errors import TimeOrderViolation
from .errors import SkewflowError
from .gauges import make_gauge
from .growth import estimate_growth, verify_growth
from .nonuniform import run_nonuniform_panel
from .probes import law_probes
from .reports import FAIL, PASS, TAG_COMPATIBLE, UES
from .uniform import test_datko

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_CONFIG = 2
EXIT_CONTRADICTION = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewflow", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--system", type=str, default=None)
        sp.add_argument("--param", action="append", default=[], metavar="K=V")
        sp.add_argument("--config", type=str, default=None, help="JSON config file")
        sp.add_argument("--criteria", type=str, default=None, help="comma list or 'all'")
        sp.add_argument("--gauge", type=str, default=None,
                        help="identity | pow:P | sat:C | table:@file.csv")
        sp.add_argument("--grid-h", dest="grid_h", type=float, default=None)
        sp.add_argument("--grid-step", dest="grid_step", type=float, default=None)
        sp.add_argument("--tmax", type=float, default=None)
        sp.add_argument("--delta-max", dest="delta_max", type=float, default=None)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--ncap", type=float, default=None)
        sp.add_argument("--eval-cap", dest="eval_cap", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--format", type=str, default=None, choices=["json", "csv"])
        sp.add_argument("--omega-const", dest="omega_const", action="store_true", default=None)

    g = sub.add_parser("gallery", help="list built-in systems")
    g.add_argument("action", choices=["list"])
    g.add_argument("--out", type=str, default=None)

    for name in ("axioms", "growth", "classify"):
        sp = sub.add_parser(name)
        common(sp)

    sw = sub.add_parser("sweep")
    common(sw)
    sw.add_argument("--sweep", action="append", default=[], metavar="K=V1,V2,...")
    return p


def _parse_params(pairs) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--param needs K=V, got {pair!r}")
        k, v = pair.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise ConfigError(f"--param value must be numeric, got {pair!r}")
    return out


def _config_from_args(args) -> RunConfig:
    file_doc = load_config_file(args.config) if args.config else None
    flags = {
        "system": args.system,
        "criteria": args.criteria,
        "gauge": args.gauge,
        "grid_h": args.grid_h,
        "grid_step": args.grid_step,
        "tmax": args.tmax,
        "delta_max": args.delta_max,
        "tol": args.tol,
        "ncap": args.ncap,
        "eval_cap": args.eval_cap,
        "seed": args.seed,
        "out": args.out,
        "format": args.format,
        "omega_const": args.omega_const,
    }
    params = _parse_params(args.param)
    cfg = merge_config(file_doc, {k: v for k, v in flags.items() if v is not None})
    if params:
        merged = dict(cfg.params)
        merged.update(params)
        cfg.params = merged
    return cfg


def _build_system(cfg: RunConfig) -> System:
    if cfg.custom_system is not None:
        return gallery.build_custom(cfg.custom_system)
    if not cfg.system:
        raise ConfigError("no system selected (use --system or a config file)")
    return gallery.build(cfg.system, cfg.params)


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _base_doc(command: str, cfg: RunConfig | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": cfg.echo() if cfg else {},
    }


def cmd_gallery(args) -> int:
    doc = _base_doc("gallery", None)
    doc["entries"] = gallery.gallery_entries()
    doc["exit_code"] = EXIT_OK
    _emit(doc, args.out)
    return EXIT_OK


def cmd_axioms(args) -> int:
    cfg = _config_from_args(args)
    system = _build_system(cfg)
    tol = cfg.tol
    probes = law_probes(system, 200, cfg.seed)
    if cfg.probes:
        for row in cfg.probes:
            t, s, t0 = float(row[0]), float(row[1]), float(row[2])
            if not (t >= s >= t0 >= 0):
                raise TimeOrderViolation(f"injected probe violates time order: {row}")
            probes.append((t, s, t0, system.state_samples[0], system.vector_samples[0]))
    semi = check_semiflow_law(system, probes)
    coc = check_cocycle_law(system, probes)
    ok = (
        semi.max_composition_dev <= tol
        and semi.max_identity_dev <= tol
        and coc.max_composition_dev <= tol
        and coc.max_identity_dev <= tol
    )
    doc = _base_doc("axioms", cfg)
    doc["system"] = system.name
    doc["laws"] = {
        "semiflow": semi.as_dict(),
        "cocycle": coc.as_dict(),
        "tolerance": tol,
        "ok": ok,
    }
    code = EXIT_OK if ok else EXIT_INCONCLUSIVE
    doc["exit_code"] = code
    _emit(doc, cfg.out)
    return code


def cmd_growth(args) -> int:
    cfg = _config_from_args(args)
    system = _build_system(cfg)
    uni = estimate_growth(system, "uniform", grid_h=cfg.grid_h, s_step=cfg.grid_step)
    non = estimate_growth(
        system, "nonuniform", grid_h=cfg.grid_h, omega_const=cfg.omega_const, s_step=cfg.grid_step
    )
    doc = _base_doc("growth", cfg)
    doc["system"] = system.name
    doc["growth"] = {
        "uniform": uni.as_dict(),
        "nonuniform": non.as_dict(),
        "uniform_verified": verify_growth(system, uni) is None,
    }
    doc["exit_code"] = EXIT_OK
    _emit(doc, cfg.out)
    return EXIT_OK


def check_ground_truth(system: System, verdict, cfg: RunConfig) -> list:
    """Inconsistencies between the computed panel and a declared tag.

    For UES-tagged systems the full pass-set is required (forward tail
    tests re-run with the quadratic gauge as well); for tagged
    non-uniformly-stable systems the vector forward tail test must fail.
    """
    tag = system.ground_truth
    if tag is None:
        return []
    out = []
    by_id = {r.criterion_id: r for r in verdict.criteria}
    if tag == UES:
        required = (
            "fit-exp", "minorant", "half-decay", "half-decay-d",
            "datko-v", "datko-op", "datko-d",
            "barbashin-v", "barbashin-op", "barbashin-d", "decay-d",
        )
        for cid in required:
            r = by_id.get(cid)
            if r is not None and r.verdict != PASS:
                out.append(f"tag UES but {cid} returned {r.verdict}")
        for form, time in (("vector", "continuous"), ("operator", "continuous"),
                           ("vector", "discrete")):
            r = test_datko(system, form, time, make_gauge("pow:2"), cfg)
            if r.verdict != PASS:
                out.append(f"tag UES but {r.criterion_id} with pow:2 returned {r.verdict}")
    if tag in ("US-not-UES", "ES-not-UES"):
        r = by_id.get("datko-v")
        if r is None or r.verdict != FAIL:
            out.append(f"tag {tag} but datko-v did not fail with a witness")
    compatible = TAG_COMPATIBLE.get(tag)
    if compatible and verdict.label != "inconclusive" and verdict.label not in compatible:
        out.append(f"tag {tag} contradicted by computed verdict {verdict.label}")
    return out


def cmd_classify(args) -> int:
    cfg = _config_from_args(args)
    system = _build_system(cfg)
    selected = cfg.selected_criteria()
    verdict = run_nonuniform_panel(system, cfg, selected=selected)
    doc = _base_doc("classify", cfg)
    doc["system"] = system.name
    doc["ground_truth"] = system.ground_truth
    doc.update(verdict.as_dict())
    if selected is not None:
        # report-only mode: definite when every selected criterion resolved
        doc["verdict"] = None
        unresolved = [r.criterion_id for r in verdict.criteria if r.verdict == "inconclusive"]
        code = EXIT_OK if not unresolved else EXIT_INCONCLUSIVE
        doc["contradictions"] = []
    else:
        contradictions = check_ground_truth(system, verdict, cfg)
        doc["contradictions"] = contradictions
        if contradictions:
            code = EXIT_CONTRADICTION
        elif verdict.label == "inconclusive":
            code = EXIT_INCONCLUSIVE
        else:
            code = EXIT_OK
    doc["exit_code"] = code
    _emit(doc, cfg.out)
    return code


def _parse_sweep(specs) -> dict:
    ranges = {}
    for spec in specs:
        if "=" not in spec:
            raise ConfigError(f"--sweep needs K=V1,V2,..., got {spec!r}")
        k, vs = spec.split("=", 1)
        try:
            values = [float(v) for v in vs.split(",") if v != ""]
        except ValueError:
            raise ConfigError(f"bad sweep values in {spec!r}")
        if not values:
            raise ConfigError(f"empty sweep range in {spec!r}")
        ranges[k.strip()] = values
    return ranges


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    ranges = _parse_sweep(args.sweep)
    names = sorted(ranges)
    combos = list(itertools.product(*(ranges[n] for n in names))) if names else []
    if len(combos) > 1000:
        raise ConfigError(f"sweep has {len(combos)} combinations, cap is 1000")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        names + ["verdict", "N", "nu", "max_N_of_s", "nu_nonuniform",
                 "pass", "fail", "inconclusive"]
    )
    for combo in combos:
        params = dict(cfg.params)
        params.update(dict(zip(names, combo)))
        system = gallery.build(cfg.system, params) if cfg.system else gallery.build_custom(cfg.custom_system)
        verdict = run_nonuniform_panel(system, cfg)
        by_id = {r.criterion_id: r for r in verdict.criteria}
        fit = by_id.get("fit-exp")
        nfit = by_id.get("fit-exp-nu")
        counts = {"pass": 0, "fail": 0, "inconclusive": 0}
        for r in verdict.criteria:
            counts[r.verdict] += 1
        writer.writerow([
            *combo,
            verdict.label,
            fit.evidence.get("N", "") if fit and fit.verdict == PASS else "",
            fit.evidence.get("nu", "") if fit and fit.verdict == PASS else "",
            nfit.evidence.get("max_N_of_s", "") if nfit and nfit.verdict == PASS else "",
            nfit.evidence.get("nu", "") if nfit and nfit.verdict == PASS else "",
            counts["pass"], counts["fail"], counts["inconclusive"],
        ])
    text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        if args.command == "gallery":
            return cmd_gallery(args)
        if args.command == "axioms":
            return cmd_axioms(args)
        if args.command == "growth":
            return cmd_growth(args)
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except SkewflowError as exc:
        err = {
            "schema_version": SCHEMA_VERSION,
            "command": args.command,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "config": {},
            "error": f"{type(exc).__name__}: {exc}",
            "exit_code": EXIT_CONFIG,
        }
        sys.stdout.write(json.dumps(err, indent=2, sort_keys=True) + "\n")
        return EXIT_CONFIG


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
