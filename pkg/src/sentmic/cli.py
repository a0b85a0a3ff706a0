"""Command line entry point: ``sentmic <subcommand>``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import CorpusFilterConfig
from .errors import ConfigError, SentmicError
from .mic import MicConfig
from .pipeline import load_config, run_pipeline, stage_align, stage_analyze, stage_index, stage_ingest, stage_score
from .series import AlignPolicy
from .stats import compute_series_stats

log = logging.getLogger("sentmic")

ENV_OUT_DIR = "SENTMIC_OUTPUT_DIR"


def _default_out_dir():
    return os.environ.get(ENV_OUT_DIR)


def _add_mic_args(p):
    p.add_argument("--alpha", type=float, default=0.6, help="grid budget exponent, B(n) = n**alpha (default 0.6)")
    p.add_argument("--min-b", type=int, default=4)
    p.add_argument("--clumping-factor", type=int, default=15)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sentmic", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for MIC cells (hint)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="clean, deduplicate and cap a raw posts CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-chars", type=int, default=150)
    p.add_argument("--top-per-day", type=int, default=50)

    p = sub.add_parser("score", help="score cleaned posts")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--lexicon")
    src.add_argument("--probs")

    p = sub.add_parser("index", help="daily sentiment index from scored posts")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("align", help="pair the daily index with trading-day closes")
    p.add_argument("--in", dest="inp", required=True, help="index CSV")
    p.add_argument("--prices", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--policy", choices=[x.value for x in AlignPolicy], default="next")

    p = sub.add_parser("analyze", help="align, smooth, MIC and write the report")
    p.add_argument("--in", dest="inp", required=True, help="index CSV")
    p.add_argument("--prices", required=True)
    p.add_argument("--out", "--out-dir", dest="out_dir", default=_default_out_dir())
    p.add_argument("--policy", choices=[x.value for x in AlignPolicy], default="next")
    p.add_argument("--window", type=int, default=30)
    p.add_argument("--min-obs", type=int, default=1)
    _add_mic_args(p)

    p = sub.add_parser("pipeline", help="run every stage from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", "--out-dir", dest="out_dir", default=None,
                   help=f"overrides output_dir (default: config, then ${ENV_OUT_DIR})")
    return parser


def _summary(report) -> str:
    r = report.mic_result
    flag = " (degenerate input)" if r.degenerate else ""
    return f"MIC(avg_sentiment, avg_price) = {r.mic!r} at grid {r.best_x}x{r.best_y}, n = {r.n}{flag}"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "ingest":
            kept = stage_ingest(args.inp, args.out, CorpusFilterConfig(args.max_chars, args.top_per_day))
            s = compute_series_stats([len(p.text) for p in kept])
            print(f"kept {s.count} posts; length mean {s.mean:.5f} sd {s.sd:.5f} "
                  f"skew {s.skewness:.6f} min {s.min:g} max {s.max:g}")
        elif args.command == "score":
            scored = stage_score(args.inp, args.out, args.lexicon, args.probs)
            print(f"scored {len(scored)} posts")
        elif args.command == "index":
            points = stage_index(args.inp, args.out)
            print(f"{len(points)} daily index points")
        elif args.command == "align":
            aligned = stage_align(args.inp, args.prices, args.out, args.policy)
            print(f"{len(aligned)} aligned trading days")
        elif args.command == "analyze":
            if not args.out_dir:
                raise ConfigError(f"--out-dir not given and ${ENV_OUT_DIR} not set")
            cfg = MicConfig(args.alpha, args.min_b, args.clumping_factor)
            report = stage_analyze(args.inp, args.prices, args.out_dir, args.policy, args.window,
                                   args.min_obs, cfg, args.threads)
            print(_summary(report))
        elif args.command == "pipeline":
            env_dir = _default_out_dir()
            cfg = load_config(
                args.config,
                defaults={"output_dir": str(Path(env_dir).resolve())} if env_dir else None,
                output_dir=str(Path(args.out_dir).resolve()) if args.out_dir else None,
            )
            report = run_pipeline(cfg, threads=args.threads)
            print(_summary(report))
            if report.partial_outputs:
                print("warning: some charts were not written", file=sys.stderr)
                return 3
    except SentmicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
