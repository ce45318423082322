"""Command-line front end: ``twistzhu {identities,build,verify,report}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from .bimod import ChainContainmentError
from .fock import CutoffOverflow
from .report import SCHEMA, SUITES, RunConfig, build_report, identities_report, render_table, run_suites
from .zhu import VerificationError

EXIT_OK, EXIT_FAIL, EXIT_RESOURCE, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _config_args(p):
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--aut", choices=["id", "theta"], default=None)
    p.add_argument("--n", default=None, help='level as "3/2" or "l=1,i=1,T=2"')
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser():
    parser = _Parser(prog="twistzhu", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("identities", help="binomial and Laurent identity suite")
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("build", help="build quotients and write dimension tables")
    _config_args(p)
    p.add_argument("--verify", action="store_true", default=None)

    p = sub.add_parser("verify", help="run named verification suites")
    _config_args(p)
    p.add_argument("--suite", action="extend", nargs="+", dest="suites", default=None,
                   metavar="NAME", help="one of: " + ", ".join(SUITES))

    p = sub.add_parser("report", help="re-render a saved report")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=["json", "table"], default="json")
    return parser


def load_config(args) -> RunConfig:
    """File values first, then any flag that was given."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        if "suite" in data:
            data["suites"] = data.pop("suite")
        bad = sorted(set(data) - known - {"verify"})
        if bad:
            raise UsageError(f"unknown config keys: {', '.join(bad)}")
        values.update(data)
    for name in known | {"verify"}:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    verify = bool(values.pop("verify", False))
    if isinstance(values.get("suites"), str):
        values["suites"] = [values["suites"]]
    if "n" in values:
        values["n"] = str(values["n"])
    cfg = RunConfig(**values)
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cfg._verify = verify
    return cfg


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args):
    if args.command == "identities":
        if args.lmax < 0:
            raise UsageError("--lmax must be nonnegative")
        rep = identities_report(args.lmax)
        _emit(rep.dumps(), args.out)
        return EXIT_OK if rep.ok else EXIT_FAIL

    if args.command == "report":
        try:
            with open(args.infile, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read report: {exc}") from exc
        if doc.get("schema") != SCHEMA:
            raise UsageError(f"not a {SCHEMA} document")
        if args.format == "json":
            sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
        else:
            sys.stdout.write(render_table(doc))
        return EXIT_OK

    cfg = load_config(args)
    if args.command == "build":
        rep = build_report(cfg, verify=cfg._verify)
    else:
        if not cfg.suites:
            raise UsageError("verify needs at least one --suite")
        rep = run_suites(cfg)
    _emit(rep.dumps(), cfg.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except UsageError as exc:
        print(f"twistzhu: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CutoffOverflow, MemoryError) as exc:
        print(f"twistzhu: cutoff overflow: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (VerificationError, ChainContainmentError) as exc:
        print(f"twistzhu: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
