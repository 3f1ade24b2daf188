"""Command line entry points: serve, run (headless replay) and validate."""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config, packaged_default_path
from .session import load_script, replay


def _flag(value: str) -> bool:
    return value == "on"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guidesim")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="serve sessions over a WebSocket (or stdio)")
    serve.add_argument("--config", required=True)
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--max-sessions", type=int, default=1)
    serve.add_argument("--dynamic-viz", choices=["on", "off"], default="on")
    serve.add_argument("--visual-programming", choices=["on", "off"], default="on")
    serve.add_argument("--static", default=None, help="directory with the browser console build")
    serve.add_argument(
        "--stdio",
        action="store_true",
        help="speak newline-delimited JSON on stdin/stdout instead of a socket",
    )

    run = sub.add_parser("run", help="replay a timed script headless")
    run.add_argument("--config", required=True)
    run.add_argument("--script", required=True)
    run.add_argument("--out", required=True, help="metrics JSON output path")
    run.add_argument("--log", default=None, help="optional NDJSON log export path")
    run.add_argument("--dynamic-viz", choices=["on", "off"], default="on")
    run.add_argument("--visual-programming", choices=["on", "off"], default="on")

    validate = sub.add_parser("validate", help="validate a config; errors as JSON on stderr")
    validate.add_argument("--config", required=True)

    sub.add_parser("paths", help="print the packaged default config path")
    return parser


def _load_or_exit(path: str):
    loaded = load_config(path)
    if isinstance(loaded, list):
        json.dump([e.to_json() for e in loaded], sys.stderr)
        sys.stderr.write("\n")
        raise SystemExit(1)
    return loaded


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        loaded = load_config(args.config)
        if isinstance(loaded, list):
            json.dump([e.to_json() for e in loaded], sys.stderr)
            sys.stderr.write("\n")
            return 1
        return 0
    if args.command == "paths":
        print(packaged_default_path())
        return 0
    config = _load_or_exit(args.config)
    if args.command == "run":
        result = replay(
            load_script(args.script),
            config,
            dynamic_viz=_flag(args.dynamic_viz),
            visual_programming=_flag(args.visual_programming),
        )
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(result.metrics.to_json(), fh, indent=2)
            fh.write("\n")
        if args.log:
            with open(args.log, "w", encoding="utf-8") as fh:
                fh.write(result.log.export_ndjson())
        return 0
    if args.command == "serve":
        if args.stdio:
            from .server import stdio_loop

            stdio_loop(
                config,
                dynamic_viz=_flag(args.dynamic_viz),
                visual_programming=_flag(args.visual_programming),
            )
            return 0
        import uvicorn

        from .server import create_app

        app = create_app(
            config,
            dynamic_viz=_flag(args.dynamic_viz),
            visual_programming=_flag(args.visual_programming),
            max_sessions=args.max_sessions,
            static_dir=args.static,
        )
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
        return 0
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    raise SystemExit(main())
