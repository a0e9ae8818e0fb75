"""Command line entry point: ``crisisgc <subcommand> [--config FILE] [--flag value ...]``.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import io
from .config import RunConfig
from .errors import InputError, NumericalError
from .experiments import RUNNERS, write_bundle

log = logging.getLogger("crisisgc")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crisisgc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("-v", "--verbose", action="store_true")
        for f in fields(RunConfig):
            flag = "--" + f.name.replace("_", "-")
            if f.name == "inputs":
                p.add_argument("--input", dest="inputs", action="append",
                               help="price CSV file or directory (repeatable)")
            else:
                p.add_argument(flag, dest=f.name, default=None, metavar=f.name.upper())
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is None:
            continue
        overrides[f.name] = ",".join(value) if f.name == "inputs" else value
    return RunConfig.from_dict(overrides, base=cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = None
    try:
        cfg = config_from_args(args)
        bundle = RUNNERS[args.command](cfg)
        write_bundle(bundle)
    except InputError as exc:
        print(f"crisisgc {args.command}: input error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"crisisgc {args.command}: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        out = Path(cfg.out if cfg is not None else RunConfig().out)
        io.write_jsonl(out / "diagnostics.jsonl",
                       [{"kind": "fatal_numerical_error", "command": args.command, "reason": str(exc)}])
        print(f"crisisgc {args.command}: numerical failure: {exc} (see {out / 'diagnostics.jsonl'})",
              file=sys.stderr)
        return 2
    log.info("wrote results to %s", cfg.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
