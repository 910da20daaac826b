"""Command line entry points: run, check, serve, bench."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (STRATEGIES, bundled_edit_script, load_script, replay,
                      summarize, write_csv, CSV_COLUMNS)
from .service import LiveSession


def _read_source(path: str):
    p = Path(path)
    try:
        return p.read_text(encoding="utf-8")
    except FileNotFoundError:
        print(f"no such file: {path}", file=sys.stderr)
        return None


def cmd_run(args) -> int:
    text = _read_source(args.file)
    if text is None:
        return 2
    session = LiveSession("cli", asset_dir=args.assets)
    errors = session.edit(text)
    for err in errors:
        print(f"parse error at {err['start']}..{err['end']}: {err['message']}",
              file=sys.stderr)
    failed = False
    for row in session.command_values():
        print(row["text"])
        failed = failed or row["error"]
    return 1 if failed else 0


def cmd_check(args) -> int:
    text = _read_source(args.file)
    if text is None:
        return 2
    session = LiveSession("cli", asset_dir=args.assets)
    session.edit(text)
    diags = session.diagnostics()
    for d in diags:
        print(f"{d['start']}..{d['end']} {d['severity']} [{d['source']}] "
              f"{d['message']}")
    return 1 if diags else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(asset_dir=args.assets, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_bench(args) -> int:
    if args.script:
        script = load_script(args.script)
    else:
        script = bundled_edit_script()
    reports = replay(script, args.strategy, asset_dir=args.assets)
    summary = summarize({args.strategy: reports})
    if args.out:
        write_csv(summary.rows, args.out)
        print(f"wrote {len(summary.rows)} rows to {args.out}", file=sys.stderr)
    else:
        print(",".join(CSV_COLUMNS))
        for row in summary.rows:
            print(",".join(str(row[c]) if c != "calls_json"
                           else '"' + str(row[c]).replace('"', '""') + '"'
                           for c in CSV_COLUMNS))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dexp",
        description="Live data-exploration engine: run scripts, check them, "
                    "serve the editor backend, or benchmark strategies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate a script and print one result "
                                   "per command")
    p.add_argument("file")
    p.add_argument("--assets", default=None, help="image asset directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="print parse and type diagnostics")
    p.add_argument("file")
    p.add_argument("--assets", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("serve", help="start the websocket service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--assets", default=None)
    p.add_argument("--static", default=None,
                   help="directory of editor assets to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="replay an edit script under one "
                                     "evaluation strategy")
    p.add_argument("--script", default=None,
                   help="JSON array of {text, label?}; bundled 38-step "
                        "script when omitted")
    p.add_argument("--strategy", required=True, choices=STRATEGIES)
    p.add_argument("--assets", default=None)
    p.add_argument("--out", default=None, help="CSV output path (stdout "
                                               "when omitted)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
