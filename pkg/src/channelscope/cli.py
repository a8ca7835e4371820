"""Command-line interface.

Subcommands mirror the pipeline stages (``generate``, ``embed``,
``analyze linearity``, ``analyze discriminability``, ``report``) plus
``run`` for the whole chain. Settings come from an optional JSON config
file; flags override file values. Exit codes: 0 success, 2 config error,
3 backend error, 4 metric degeneracy, 5 I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ._version import __version__
from .errors import (
    BackendError,
    CacheError,
    ChannelscopeError,
    ConfigError,
    DegenerateSweepError,
    DomainError,
    ManifestError,
)
from .pipeline import (
    RunConfig,
    run_pipeline,
    stage_analyze_discriminability,
    stage_analyze_linearity,
    stage_embed,
    stage_generate,
    stage_report,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BACKEND = 3
EXIT_DEGENERATE = 4
EXIT_IO = 5


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    p.add_argument("--backend", help="http(s)://URL, mock:<name>, or cache-only")
    p.add_argument("--model", help="model id used for embedding and cache keys")
    p.add_argument("--channel", action="append", dest="channels", metavar="NAME",
                   help="channel to test (repeatable; default: all six)")
    p.add_argument("--steps", type=int, help="sweep steps (default 1000)")
    p.add_argument("--factorial", action="store_const", const=True, default=None,
                   help="also run the factorial design over non-area channels")
    p.add_argument("--factorial-steps", type=int, dest="factorial_steps",
                   help="values per channel in the factorial grid (default 20)")
    p.add_argument("--sigma", help="smoothing sigma: 'auto' (sqrt of sweep length) or a number")
    p.add_argument("--peak-threshold", type=float, dest="peak_threshold",
                   help="peak prominence cutoff as a fraction of signal range (default 0.05)")
    p.add_argument("--normalize", action="store_const", const=True, default=None,
                   help="L2-normalize embeddings before analysis")
    p.add_argument("--cache", type=Path, help="embedding cache directory")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--jobs", type=int, help="parallel workers for rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="channelscope",
        description="Measure visual-channel accuracy and discriminability of image embedding models",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, brief in (
        ("generate", "render stimulus sweeps and write manifests"),
        ("embed", "embed generated stimuli into the cache"),
        ("report", "emit tables and figures from analysis output"),
        ("run", "full pipeline: generate, embed, analyze, report"),
    ):
        _add_common_flags(sub.add_parser(name, help=brief))

    analyze = sub.add_parser("analyze", help="compute metrics from manifests + cache")
    asub = analyze.add_subparsers(dest="analysis", required=True)
    _add_common_flags(asub.add_parser("linearity", help="PC1 explained variance per sweep"))
    _add_common_flags(asub.add_parser("discriminability", help="smoothed distance profiles and peaks"))
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in ("backend", "model", "channels", "steps", "factorial", "factorial_steps",
                    "sigma", "peak_threshold", "normalize", "cache", "out", "jobs")
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    for key in ("out", "cache"):
        if key in overrides:
            overrides[key] = Path(overrides[key]).resolve()
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as f:
                file_obj = json.load(f)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config {args.config}: {exc}") from exc
        base = RunConfig.from_dict({**file_obj, "out": file_obj.get("out", overrides.get("out"))})
        return RunConfig.from_dict(overrides, base=base)
    return RunConfig.from_dict(overrides)


def _dispatch(args: argparse.Namespace) -> None:
    config = _load_config(args)
    if args.command == "generate":
        manifests = stage_generate(config)
        total = sum(len(m.records) for m in manifests.values())
        print(f"generated {total} stimuli under {config.out}")
    elif args.command == "embed":
        total = stage_embed(config)
        print(f"embedded {total} stimuli into cache {config.cache}")
    elif args.command == "analyze" and args.analysis == "linearity":
        payload = stage_analyze_linearity(config)
        for row in payload["rows"]:
            print(f"{row['channel']}: linearity {row['score']:.6f} (n={row['n']}, dim={row['dim']})")
    elif args.command == "analyze" and args.analysis == "discriminability":
        payload = stage_analyze_discriminability(config)
        for row in payload["rows"]:
            print(f"{row['channel']}: {row['peak_count']} peak(s), sigma={row['sigma']}")
    elif args.command == "report":
        report = stage_report(config)
        print(f"report written to {config.out / 'report'} "
              f"({len(report.linearity)} channels, tau={report.kendall_tau_vs_human})")
    elif args.command == "run":
        report = run_pipeline(config)
        print(f"run complete: report under {config.out / 'report'} "
              f"({len(report.linearity)} channels, tau={report.kendall_tau_vs_human})")
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateSweepError as exc:
        print(f"metric degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (ManifestError, CacheError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, ChannelscopeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
