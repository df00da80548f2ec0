"""Command line front end: ``dimplevap run|sweep|reproduce|presets``.

The output directory can be overridden with the DIMPLEVAP_OUTDIR environment
variable.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import scenario as sc
from .errors import ConfigError, PhysicsError, UnknownFigure
from .presets import FIGURES, PRESETS, get_preset

log = logging.getLogger("dimplevap")


def _config_tree(ref: str) -> dict:
    """A config file path, or a preset name."""
    if os.path.exists(ref):
        try:
            with open(ref) as fh:
                return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{ref}: invalid JSON ({exc})") from exc
    if ref in PRESETS:
        return get_preset(ref)
    raise ConfigError(f"{ref!r} is neither a config file nor a preset name")


def _cmd_run(args):
    tree = _config_tree(args.config)
    if args.csv:
        tree.setdefault("outputs", {})["csv"] = args.csv
    if args.summary:
        tree.setdefault("outputs", {})["summary"] = args.summary
    s = sc.run_scenario(tree, outdir=args.outdir)
    print(s.to_json())
    for kind, path in s.files.items():
        log.info("wrote %s %s", kind, path)
    return 0


def _cmd_sweep(args):
    tree = _config_tree(args.config)
    values = sc.parse_values(args.values)
    outdir = sc.resolve_outdir(args.outdir) or "."
    out = os.path.join(outdir, args.out)
    rows = sc.sweep(tree, args.param, values, with_evap=not args.load_only, out=out)
    failed = sum(not r["ok"] for r in rows)
    print(f"{len(rows)} rows, {failed} failed -> {out}")
    return 0


def _cmd_reproduce(args):
    paths, checks = sc.reproduce(args.figure_id, outdir=args.outdir)
    for c in checks:
        print(c.line())
    for p in paths:
        log.info("wrote %s", p)
    return 0


def _cmd_presets(args):
    for name in sorted(PRESETS):
        print(name)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="dimplevap",
                                description="Dimple loading and evaporative cooling simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario (config file or preset name)")
    r.add_argument("config")
    r.add_argument("--outdir", default=None)
    r.add_argument("--csv", default=None, help="trajectory CSV file name")
    r.add_argument("--summary", default=None, help="summary JSON file name")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", help="vary one config entry over a list of values")
    s.add_argument("config")
    s.add_argument("--param", required=True, help="dotted path, e.g. dimple.w0")
    s.add_argument("--values", required=True, help='comma separated, e.g. "40 um,100 um"')
    s.add_argument("--out", default="sweep.csv")
    s.add_argument("--outdir", default=None)
    s.add_argument("--load-only", action="store_true", help="skip the evaporation stage")
    s.set_defaults(func=_cmd_sweep)

    f = sub.add_parser("reproduce", help="write the curves of one figure plus a check report")
    f.add_argument("figure_id", help=f"one of {', '.join(FIGURES)}")
    f.add_argument("--outdir", default=None)
    f.set_defaults(func=_cmd_reproduce)

    q = sub.add_parser("presets", help="list preset names")
    q.set_defaults(func=_cmd_presets)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UnknownFigure as exc:
        print(f"error: unknown figure {exc.args[0]!r}; known: {', '.join(FIGURES)}",
              file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PhysicsError as exc:
        print(f"physics error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
