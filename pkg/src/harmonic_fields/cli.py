"""Command-line front end.

Exit status: 0 when the verdict is pass, 1 when it is fail, 2 for config or
usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from pydantic import ValidationError

from . import config as cfgmod
from .report import to_json, to_markdown
from .runner import ConfigError, run

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_model(text: str) -> dict:
    """``unimodular:1,2,3``, ``catalog:hopf``, ``chart:round-sphere`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    kind, _, rest = text.partition(":")
    if kind == "unimodular":
        parts = [p.strip() for p in rest.split(",")]
        if len(parts) != 3:
            raise ValueError("unimodular needs alpha,beta,gamma")
        return {"type": "unimodular", "alpha": parts[0], "beta": parts[1], "gamma": parts[2]}
    if kind in ("catalog", "chart") and rest:
        return {"type": kind, "name": rest.strip()}
    raise ValueError(f"cannot parse model {text!r}")


def parse_field(text: str):
    text = text.strip()
    if text in ("e1", "e2", "e3"):
        return text
    if text.startswith("["):
        return json.loads(text)
    return [p.strip() for p in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="harmonic-fields", description="Harmonic unit vector fields on 3-dimensional frame models.")
    sub = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for mode in cfgmod.MODES:
        s = sub.add_parser(mode)
        s.add_argument("--config", help="JSON run configuration")
        s.add_argument("--model", help="unimodular:a,b,c | catalog:NAME | chart:NAME | JSON object")
        s.add_argument("--field", help="e1|e2|e3 or x,y,z")
        s.add_argument("--tol", type=float, help="algebraic tolerance")
        s.add_argument("--fd-step", type=float, help="finite-difference step for chart curvature")
        s.add_argument("--json", dest="json_path", help="write the JSON report here")
        s.add_argument("--md", dest="md_path", help="write the Markdown report here")
        s.add_argument("--workers", type=int, help="sweep worker processes")
        s.add_argument("--seed", type=int, help="sweep seed")
    return p


def assemble(args) -> dict:
    data = cfgmod.load(args.config) if args.config else {}
    if data.get("mode", args.mode) != args.mode:
        raise ValueError(f"config mode {data['mode']!r} does not match subcommand {args.mode!r}")
    data["mode"] = args.mode
    if args.model:
        data["model"] = parse_model(args.model)
    if args.field:
        data["field"] = parse_field(args.field)
    tol = dict(data.get("tolerances") or {})
    if args.tol is not None:
        tol["algebraic"] = args.tol
    if args.fd_step is not None:
        tol["fd_step"] = args.fd_step
    if tol:
        data["tolerances"] = tol
    out = dict(data.get("output") or {})
    if args.json_path:
        out["json_path"] = args.json_path
    if args.md_path:
        out["markdown_path"] = args.md_path
    if out:
        data["output"] = out
    if args.workers is not None or args.seed is not None:
        sw = dict(data.get("sweep") or {})
        if args.workers is not None:
            sw["workers"] = args.workers
        if args.seed is not None:
            sw["seed"] = args.seed
        data["sweep"] = sw
    return data


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"  {path}: {err['msg']}")
    return "invalid config:\n" + "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = cfgmod.parse(assemble(args))
        report = run(cfg)
    except ValidationError as exc:
        print(_format_validation(exc), file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = to_json(report)
    if cfg.output.json_path:
        with open(cfg.output.json_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.output.markdown_path:
        with open(cfg.output.markdown_path, "w", encoding="utf-8") as fh:
            fh.write(to_markdown(report))
    return EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
