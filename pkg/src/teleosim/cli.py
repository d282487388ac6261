"""Command-line entry points: serve a websocket bridge, benchmark a scripted
trajectory against a task scene, or verify a recorded demonstration."""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

from .bridge import LoopConfig, TeleopRuntime, load_demo, run_bench, verify_demo
from .inputs import load_trajectory
from .kinematics import KinematicChain, default_chain, load_chain
from .sim import SCENE_IDS, TaskScene, builtin_scene, load_scene

REPLAY_TOLERANCE = 1e-9


def _resolve_chain(arg: str | None) -> KinematicChain:
    return load_chain(arg) if arg else default_chain()


def _resolve_scene(arg: str) -> TaskScene:
    if arg.upper() in SCENE_IDS:
        return builtin_scene(arg)
    if Path(arg).exists():
        return load_scene(arg)
    raise ValueError(
        f"unknown scene '{arg}': expected one of {', '.join(SCENE_IDS)} or a config file"
    )


def _serve(args) -> int:
    from .server import BridgeServer, serve_until_interrupt

    chain = _resolve_chain(args.chain)
    scene = _resolve_scene(args.scene)
    runtime = TeleopRuntime(chain, scene, record_path=args.record)
    server = BridgeServer(runtime, host=args.host, port=args.port,
                          realtime=args.realtime)
    mode = "realtime" if args.realtime else "message-clocked"
    print(f"serving scene {scene.task} on ws://{args.host}:{args.port} ({mode})")
    if args.record:
        print(f"recording demonstration to {args.record}")
    asyncio.run(serve_until_interrupt(server))
    return 0


def _bench(args) -> int:
    chain = _resolve_chain(args.chain)
    scene = _resolve_scene(args.scene)
    traj = load_trajectory(args.trajectory)
    report = run_bench(chain, scene, traj, record_path=args.record)
    with open(args.report, "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    print(
        f"{report['task']}: score {report['score']} "
        f"({report['checkpoints_cleared']}/{report['checkpoints_total']} checkpoints) "
        f"in {report['elapsed']:.2f}s, {report['ticks']} ticks"
    )
    if report["errors"]:
        print(f"error: {len(report['errors'])} message(s) rejected during replay",
              file=sys.stderr)
        return 1
    return 0


def _replay(args) -> int:
    demo = load_demo(args.demo)
    if demo.header is None:
        print("empty demonstration: nothing to verify")
        return 0
    check = verify_demo(demo)
    verdict = "bitwise-equal" if check.bitwise_equal else f"max error {check.max_joint_error:.3e}"
    print(f"replayed {check.ticks} ticks of {demo.header.task}: {verdict}")
    if check.max_joint_error > REPLAY_TOLERANCE:
        print(f"error: replay diverged beyond {REPLAY_TOLERANCE:.0e}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teleosim",
        description="Simulated 7-DOF teleoperation bridge: serve, benchmark, replay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="run the websocket bridge")
    serve_p.add_argument("--chain", help="chain config file (default: packaged 7-DOF arm)")
    serve_p.add_argument("--scene", required=True,
                         help=f"task scene id ({', '.join(SCENE_IDS)}) or config file")
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--realtime", action="store_true",
                         help="pace ticks by the wall clock instead of message timestamps")
    serve_p.add_argument("--record", metavar="FILE",
                         help="record the session as a demonstration file")
    serve_p.set_defaults(func=_serve)

    bench_p = sub.add_parser("bench", help="score a scripted trajectory headlessly")
    bench_p.add_argument("--chain", help="chain config file (default: packaged 7-DOF arm)")
    bench_p.add_argument("--scene", required=True,
                         help=f"task scene id ({', '.join(SCENE_IDS)}) or config file")
    bench_p.add_argument("--trajectory", required=True, help="scripted trajectory file")
    bench_p.add_argument("--report", required=True, help="where to write the JSON report")
    bench_p.add_argument("--record", metavar="FILE",
                         help="also record the run as a demonstration file")
    bench_p.set_defaults(func=_bench)

    replay_p = sub.add_parser("replay", help="verify a recorded demonstration")
    replay_p.add_argument("--demo", required=True, help="demonstration file to replay")
    replay_p.set_defaults(func=_replay)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 0
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
