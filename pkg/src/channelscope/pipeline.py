"""Pipeline orchestration: generate, embed, analyze, report.

Every stage reads and writes the documented file formats (stimulus
manifests, the embedding cache, analysis JSON, report tables/figures), so
stages can run in separate processes or on separate machines. ``run``
chains them in one process. Given a fixed config and backend responses,
every artifact is byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._version import __version__ as _version
from .channels import ChannelId, RenderConfig, default_params
from .embedding import EmbeddingCache, EmbedRequest, as_matrix, embed_batch, provider_from_descriptor
from .errors import BackendError, ChannelscopeError, ConfigError, DomainError
from .experiment import Manifest, load_manifest, materialize, plan_factorial, plan_single_sweep
from .metrics import (
    DEFAULT_PEAK_THRESHOLD_FRAC,
    DEFAULT_TIE_EPSILON,
    auto_sigma,
    box_stats,
    distance_profile,
    human_ranking,
    kendall_tau_b,
    linearity,
    rank_channels,
)
from .png import encode_png
from .render import render
from .report import RunReport, canon_float, emit_figures, emit_tables

__all__ = ["RunConfig", "run_pipeline", "stage_generate", "stage_embed",
           "stage_analyze_linearity", "stage_analyze_discriminability", "stage_report"]

ANALYSIS_SCHEMA_VERSION = 1
ALL_CHANNELS = tuple(ChannelId)


@dataclass(frozen=True)
class RunConfig:
    """Everything one run needs; field names match the config file keys."""

    out: Path
    backend: str = "mock:linear"
    model: str | None = None
    channels: tuple[ChannelId, ...] = ALL_CHANNELS
    steps: int = 1000
    factorial: bool = False
    factorial_steps: int = 20
    render: RenderConfig = field(default_factory=RenderConfig)
    cache: Path | None = None
    normalize: bool = False
    sigma: str | float = "auto"
    peak_threshold: float = DEFAULT_PEAK_THRESHOLD_FRAC
    tie_epsilon: float = DEFAULT_TIE_EPSILON
    jobs: int = 1
    seed: int | None = None  # reserved; the pipeline is deterministic

    _KEYS = (
        "out", "backend", "model", "channels", "steps", "factorial", "factorial_steps",
        "render", "cache", "normalize", "sigma", "peak_threshold", "tie_epsilon",
        "jobs", "seed",
    )

    def __post_init__(self) -> None:
        if self.steps < 2:
            raise ConfigError(f"steps must be >= 2, got {self.steps}")
        if self.factorial and self.factorial_steps < 3:
            raise ConfigError(
                f"factorial_steps must be >= 3 to score cell linearity, got {self.factorial_steps}"
            )
        if not self.channels:
            raise ConfigError("no channels selected")
        if self.sigma != "auto":
            try:
                object.__setattr__(self, "sigma", float(self.sigma))
            except (TypeError, ValueError):
                raise ConfigError(f"sigma must be 'auto' or a number, got {self.sigma!r}") from None
            if self.sigma <= 0:
                raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.peak_threshold < 1.0:
            raise ConfigError(f"peak_threshold must be in (0, 1), got {self.peak_threshold}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.factorial and all(c is ChannelId.AREA for c in self.channels):
            raise ConfigError("factorial designs exclude area; select another channel")

    @classmethod
    def from_dict(cls, obj: dict, base: "RunConfig | None" = None) -> "RunConfig":
        """Build from a parsed config file; unknown keys are rejected."""
        unknown = set(obj) - set(cls._KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kwargs = dict(obj)
        if "render" in kwargs and kwargs["render"] is not None:
            rd = kwargs["render"]
            bad = set(rd) - {"canvas_px", "stroke_px", "antialias"}
            if bad:
                raise ConfigError(f"unknown render keys: {', '.join(sorted(bad))}")
            try:
                kwargs["render"] = RenderConfig(**rd)
            except DomainError as exc:
                raise ConfigError(str(exc)) from exc
        if "channels" in kwargs and kwargs["channels"] is not None:
            try:
                kwargs["channels"] = tuple(ChannelId.from_name(c) for c in kwargs["channels"])
            except DomainError as exc:
                raise ConfigError(str(exc)) from exc
        for key in ("out", "cache"):
            if kwargs.get(key) is not None:
                kwargs[key] = Path(kwargs[key]).resolve()
        if base is not None:
            merged = {k: getattr(base, k) for k in cls._KEYS}
            merged.update({k: v for k, v in kwargs.items() if v is not None})
            kwargs = merged
        if "out" not in kwargs or kwargs["out"] is None:
            raise ConfigError("config needs an output directory ('out')")
        try:
            return cls(**kwargs)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def sigma_for(self, n: int) -> float:
        return float(auto_sigma(n)) if self.sigma == "auto" else float(self.sigma)

    def make_provider(self):
        try:
            return provider_from_descriptor(self.backend, self.model)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def make_cache(self) -> EmbeddingCache | None:
        return EmbeddingCache(self.cache) if self.cache is not None else None

    def meta(self, provider) -> dict:
        return {
            "tool": "channelscope",
            "version": _version,
            "provider": {"kind": provider.kind, "backend": self.backend,
                         "model_id": provider.model_id},
            "normalize": self.normalize,
            "render": self.render.to_dict(),
            "plan": {
                "mode": "single+factorial" if self.factorial else "single",
                "channels": [c.value for c in self.channels],
                "steps": self.steps,
                "factorial_steps": self.factorial_steps if self.factorial else None,
            },
            "sigma": self.sigma,
            "peak_threshold_frac": self.peak_threshold,
            "tie_epsilon": self.tie_epsilon,
        }


def _stage(name: str, exc: Exception, detail: str = "") -> Exception:
    where = f" [{detail}]" if detail else ""
    msg = f"stage {name}{where}: {exc}"
    try:
        return type(exc)(msg)
    except Exception:  # exception type with a non-string constructor
        return ChannelscopeError(msg)


def _normalized(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise BackendError("zero-norm embedding cannot be normalized")
    return matrix / norms


def _sweep_requests(manifest: Manifest, base_dir: Path) -> list[EmbedRequest]:
    reqs = []
    for rec in manifest.records:
        try:
            data = (base_dir / rec.path).read_bytes()
        except OSError as exc:
            raise BackendError(f"cannot read stimulus {rec.id}: {exc}") from exc
        reqs.append(EmbedRequest(image=data, params=rec.params, t=rec.t))
    return reqs


def _sweep_matrix(config: RunConfig, provider, cache, manifest: Manifest, base_dir: Path) -> np.ndarray:
    vectors = embed_batch(provider, _sweep_requests(manifest, base_dir), cache=cache)
    matrix = as_matrix(vectors)
    return _normalized(matrix) if config.normalize else matrix


def stage_generate(config: RunConfig) -> dict[ChannelId, Manifest]:
    """Render all sweep (and optionally factorial) stimuli with manifests."""
    manifests = {}
    for channel in config.channels:
        try:
            plan = plan_single_sweep(channel, config.steps, default_params(), config.render)
            manifests[channel] = materialize(
                plan, config.out / "stimuli" / channel.value, jobs=config.jobs
            )
        except Exception as exc:
            raise _stage("generate", exc, channel.value) from exc
    if config.factorial:
        for channel in _factorial_channels(config):
            try:
                plan = plan_factorial(channel, config.factorial_steps, config.render)
                manifests[channel] = materialize(
                    plan, config.out / "stimuli-factorial" / channel.value, jobs=config.jobs
                )
            except Exception as exc:
                raise _stage("generate", exc, f"factorial {channel.value}") from exc
    return manifests


def _factorial_channels(config: RunConfig) -> tuple[ChannelId, ...]:
    return tuple(c for c in config.channels if c is not ChannelId.AREA)


def stage_embed(config: RunConfig, provider=None) -> int:
    """Embed every stimulus referenced by the generated manifests, writing
    through the cache. Returns the number of embeddings now cached."""
    provider = provider or config.make_provider()
    cache = config.make_cache()
    if cache is None:
        raise ConfigError("the embed stage needs a cache directory ('cache')")
    total = 0
    for sub in ("stimuli", "stimuli-factorial"):
        root = config.out / sub
        if not root.is_dir():
            continue
        for mpath in sorted(root.glob("*/manifest.jsonl")):
            try:
                manifest = load_manifest(mpath)
                embed_batch(provider, _sweep_requests(manifest, mpath.parent), cache=cache)
                total += len(manifest.records)
            except Exception as exc:
                raise _stage("embed", exc, str(mpath.parent.name)) from exc
    if total == 0:
        raise ConfigError(f"no manifests found under {config.out}; run generate first")
    return total


def _write_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes((json.dumps(obj, indent=2, allow_nan=False) + "\n").encode("utf-8"))


def stage_analyze_linearity(config: RunConfig, provider=None) -> dict:
    """Score sweep linearity per channel (plus factorial box stats when
    enabled) and write ``analysis/linearity.json``."""
    provider = provider or config.make_provider()
    cache = config.make_cache()
    rows = []
    for channel in config.channels:
        mdir = config.out / "stimuli" / channel.value
        try:
            manifest = load_manifest(mdir / "manifest.jsonl")
            matrix = _sweep_matrix(config, provider, cache, manifest, mdir)
            res = linearity(matrix, channel=channel)
        except Exception as exc:
            raise _stage("analyze-linearity", exc, channel.value) from exc
        rows.append({"channel": channel.value, "score": canon_float(res.score),
                     "n": res.n, "dim": res.dim})

    factorial_rows = []
    if config.factorial:
        for channel in _factorial_channels(config):
            factorial_rows.append(_score_factorial(config, provider, cache, channel))

    payload = {
        "schema_version": ANALYSIS_SCHEMA_VERSION,
        "meta": config.meta(provider),
        "rows": rows,
        "factorial": factorial_rows,
    }
    _write_json(config.out / "analysis" / "linearity.json", payload)
    return payload


def _score_factorial(config: RunConfig, provider, cache, channel: ChannelId) -> dict:
    """Linearity over every factorial cell; stimuli are rendered in memory
    and embeddings still flow through the cache."""
    plan = plan_factorial(channel, config.factorial_steps, config.render)
    scores = []
    for cell in plan.cells():
        reqs = [
            EmbedRequest(image=encode_png(render(item.params, config.render)),
                         params=item.params, t=item.t)
            for item in cell.sweep.items
        ]
        try:
            vectors = embed_batch(provider, reqs, cache=cache)
            matrix = as_matrix(vectors)
            if config.normalize:
                matrix = _normalized(matrix)
            scores.append(linearity(matrix).score)
        except Exception as exc:
            raise _stage("analyze-linearity", exc,
                         f"factorial {channel.value} cell {cell.index}") from exc
    stats = box_stats(scores)
    return {
        "channel": channel.value,
        "steps": config.factorial_steps,
        "cells": plan.n_cells,
        "min": canon_float(stats.min),
        "q1": canon_float(stats.q1),
        "median": canon_float(stats.median),
        "q3": canon_float(stats.q3),
        "max": canon_float(stats.max),
    }


def stage_analyze_discriminability(config: RunConfig, provider=None) -> dict:
    """Consecutive-distance profiles with smoothing and peak detection;
    writes ``analysis/discriminability.json``."""
    provider = provider or config.make_provider()
    cache = config.make_cache()
    rows = []
    for channel in config.channels:
        mdir = config.out / "stimuli" / channel.value
        try:
            manifest = load_manifest(mdir / "manifest.jsonl")
            matrix = _sweep_matrix(config, provider, cache, manifest, mdir)
            prof = distance_profile(matrix, sigma=config.sigma_for(matrix.shape[0]),
                                    threshold_frac=config.peak_threshold)
        except Exception as exc:
            raise _stage("analyze-discriminability", exc, channel.value) from exc
        rows.append({
            "channel": channel.value,
            "sigma": canon_float(prof.sigma),
            "raw": [canon_float(v) for v in prof.raw],
            "smoothed": [canon_float(v) for v in prof.smoothed],
            "peak_indices": list(prof.peaks.indices),
            "peak_prominences": [canon_float(p) for p in prof.peaks.prominences],
            "threshold_frac": prof.peaks.threshold_frac,
            "peak_count": prof.peaks.count,
            "group_count": prof.peaks.group_count,
        })
    payload = {
        "schema_version": ANALYSIS_SCHEMA_VERSION,
        "meta": config.meta(provider),
        "rows": rows,
    }
    _write_json(config.out / "analysis" / "discriminability.json", payload)
    return payload


def _load_analysis(config: RunConfig, name: str) -> dict:
    path = config.out / "analysis" / name
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"missing analysis file {path}; run the analyze stages first") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed analysis file {path}: {exc}") from exc


def stage_report(config: RunConfig, lin: dict | None = None, disc: dict | None = None) -> RunReport:
    """Combine analysis outputs into the report bundle, tables and figures."""
    lin = lin or _load_analysis(config, "linearity.json")
    disc = disc or _load_analysis(config, "discriminability.json")

    scores = {ChannelId(r["channel"]): r["score"] for r in lin["rows"]}
    ranking = rank_channels(scores, config.tie_epsilon) if len(scores) >= 2 else None
    tau = None
    if ranking is not None:
        tau_val = kendall_tau_b(ranking, human_ranking(scores.keys()))
        tau = None if tau_val != tau_val else canon_float(tau_val)  # NaN -> null

    report = RunReport(
        meta=lin["meta"],
        linearity=lin["rows"],
        profiles=disc["rows"],
        factorial=lin.get("factorial", []),
        ranking=None if ranking is None else {
            "order": [c.value for c in ranking.channels],
            "tie_groups": [[c.value for c in g] for g in ranking.tie_groups],
            "scores": {c.value: canon_float(s) for c, s in ranking.scores.items()},
            "tie_epsilon": ranking.tie_epsilon,
        },
        human_baseline=[c.value for c in human_ranking(scores.keys()).channels],
        kendall_tau_vs_human=tau,
    )
    report_dir = config.out / "report"
    emit_tables(report, report_dir)
    emit_figures(report, report_dir)
    return report


def run_pipeline(config: RunConfig, provider=None) -> RunReport:
    """Full pipeline: generate, embed (write-through cache), analyze, report.

    With a warm cache a re-run performs zero backend calls and reproduces
    the output directory byte for byte. While a run is in flight an
    ``INCOMPLETE`` marker sits in the output directory; it is removed on
    success, so aborted runs are recognizable.
    """
    provider = provider or config.make_provider()
    config.out.mkdir(parents=True, exist_ok=True)
    marker = config.out / "INCOMPLETE"
    marker.write_bytes(b"run in progress or aborted\n")

    for channel in config.channels:
        try:
            plan = plan_single_sweep(channel, config.steps, default_params(), config.render)
            materialize(plan, config.out / "stimuli" / channel.value, jobs=config.jobs)
        except Exception as exc:
            raise _stage("generate", exc, channel.value) from exc
    lin = stage_analyze_linearity(config, provider)
    disc = stage_analyze_discriminability(config, provider)
    report = stage_report(config, lin, disc)
    marker.unlink()
    return report
