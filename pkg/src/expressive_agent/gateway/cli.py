"""Command line entry points: serve, simulate, replay.

Exit codes: 0 success, 1 input error (bad flags, unreadable or malformed
files, invalid config), 2 runtime failure.
"""

from __future__ import annotations

import argparse
import asyncio
import sys

from ..affect import DecayParams
from ..errors import ScenarioError
from .config import load_config
from .scenario import load_scenario, run_simulation, write_replay


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expressive-agent",
        description="Conversational companion engine with expressive face output",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="run the HTTP/WS service")
    serve_p.add_argument("--config", metavar="PATH", help="JSON config file")
    serve_p.add_argument(
        "--scripted",
        action="store_true",
        help="use deterministic offline providers (no network, no keys)",
    )

    sim_p = sub.add_parser("simulate", help="run a scripted conversation headless")
    sim_p.add_argument("scenario", help="scenario JSON file")
    sim_p.add_argument("-o", "--out", required=True, metavar="DIR",
                       help="output directory for transcript.jsonl and events.jsonl")

    rep_p = sub.add_parser("replay", help="derive a blend-weight track from a transcript")
    rep_p.add_argument("transcript", help="transcript JSONL file")
    rep_p.add_argument("-o", "--out", required=True, metavar="FILE",
                       help="output JSON track file")
    rep_p.add_argument("--hold-ms", type=float, default=DecayParams().hold_ms)
    rep_p.add_argument("--decay-ms", type=float, default=DecayParams().decay_ms)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; that slot is ours
        # for runtime failures, so usage problems map to input error.
        return 0 if exc.code == 0 else 1

    try:
        if args.command == "serve":
            config = load_config(args.config)
            if args.scripted:
                config.scripted = True
            from .server import serve  # deferred: pulls in the web stack

            serve(config)
            return 0
        if args.command == "simulate":
            scenario = load_scenario(args.scenario)
            result = asyncio.run(run_simulation(scenario, args.out))
            print(
                f"wrote {result.transcript_path} and {result.events_path} "
                f"({result.turns} turns, {result.errors} errors)"
            )
            return 0
        if args.command == "replay":
            try:
                params = DecayParams(hold_ms=args.hold_ms, decay_ms=args.decay_ms)
            except ValueError as exc:
                raise ScenarioError(f"bad decay parameters: {exc}") from exc
            track = write_replay(args.transcript, args.out, params)
            print(f"wrote {args.out} ({len(track['frames'])} frames "
                  f"at {track['frame_rate_hz']} Hz)")
            return 0
        parser.error(f"unknown command {args.command!r}")
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 0
    except Exception as exc:  # runtime failure: anything unexpected
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
