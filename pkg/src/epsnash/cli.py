"""Command line: ``epsnash run --config FILE`` and ``epsnash verify --scale small|full``."""
from __future__ import annotations

import argparse
import sys
import time

from .acceptance import DEFAULT_SEED, verify_all
from .experiment import ConfigError, load_config, run


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epsnash", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one JSON-configured experiment")
    p_run.add_argument("--config", required=True, help="path to the JSON experiment config")
    p_run.add_argument("--seed", type=_u64, help="override the config seed")
    p_run.add_argument("--out", help="override the config output_path")

    p_ver = sub.add_parser("verify", help="run every acceptance criterion")
    p_ver.add_argument("--scale", choices=("small", "full"), default="small")
    p_ver.add_argument("--seed", type=_u64, default=DEFAULT_SEED)
    p_ver.add_argument("--out", default="verify_out", help="directory for CSV artifacts")
    p_ver.add_argument("--negative-control", action="store_true",
                       help="corrupt m in the full-graph check (m = l/n + 1); that criterion must fail")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        try:
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg.seed = args.seed
            return run(cfg, out=args.out)
        except (ConfigError, ValueError, OSError) as exc:
            print(f"epsnash: error: {exc}", file=sys.stderr)
            return 2

    t0 = time.perf_counter()
    results = verify_all(args.scale, args.seed, args.out, args.negative_control,
                         report=lambda r: print(r.line(), flush=True))
    ok = all(r.passed for r in results)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed in {time.perf_counter() - t0:.1f} s; artifacts in {args.out}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
