"""Experiment designs: single-channel sweeps, factorial grids, manifests.

Plans are pure data; ``materialize`` renders a plan to PNG files plus a
line-delimited manifest and is idempotent (files whose recorded content
hash still matches are never re-rendered).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .channels import (
    ChannelId,
    RenderConfig,
    StimulusParams,
    canonical_params_json,
    default_params,
    params_for,
)
from .errors import DomainError, ManifestError, UnsupportedDesignError
from .png import encode_png
from .render import render

__all__ = [
    "SweepItem",
    "SweepPlan",
    "FactorialCell",
    "FactorialPlan",
    "Manifest",
    "ManifestRecord",
    "stimulus_id",
    "plan_single_sweep",
    "plan_factorial",
    "materialize",
    "load_manifest",
]

MANIFEST_SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.jsonl"

#: Non-area channels in canonical order; factorial designs draw their
#: control grids from these.
NON_AREA_CHANNELS: tuple[ChannelId, ...] = (
    ChannelId.LENGTH,
    ChannelId.TILT,
    ChannelId.LUMINANCE,
    ChannelId.SATURATION,
    ChannelId.CURVATURE,
)


def stimulus_id(params: StimulusParams, cfg: RenderConfig) -> str:
    """Content-addressed stimulus identifier.

    A truncated SHA-256 of the canonical parameter serialization plus the
    render settings, so ids are stable across machines and re-renders.
    """
    digest = hashlib.sha256(canonical_params_json(params, cfg).encode("utf-8")).hexdigest()
    return digest[:32]


@dataclass(frozen=True)
class SweepItem:
    index: int
    t: float
    params: StimulusParams
    stimulus_id: str


@dataclass(frozen=True)
class SweepPlan:
    varied: ChannelId
    steps: int
    controls: StimulusParams
    render_config: RenderConfig
    items: tuple[SweepItem, ...]


@dataclass(frozen=True)
class FactorialCell:
    index: int
    controls: StimulusParams
    sweep: SweepPlan


@dataclass(frozen=True)
class FactorialPlan:
    """One varied channel crossed with a full grid over the other four
    non-area channels: ``steps**4`` cells, ``steps**5`` stimuli.

    Cells are generated lazily; at the reference scale (steps=20) the plan
    spans 160 000 cells and holding them all would be wasteful.
    """

    varied: ChannelId
    steps: int
    render_config: RenderConfig

    @property
    def control_channels(self) -> tuple[ChannelId, ...]:
        return tuple(c for c in NON_AREA_CHANNELS if c is not self.varied)

    @property
    def n_cells(self) -> int:
        return self.steps**4

    @property
    def n_stimuli(self) -> int:
        return self.steps**5

    def cells(self) -> Iterator[FactorialCell]:
        grid = [i / (self.steps - 1) for i in range(self.steps)]
        ctrl_channels = self.control_channels
        indices = [0, 0, 0, 0]
        for cell_index in range(self.n_cells):
            controls = default_params()
            for ch, gi in zip(ctrl_channels, indices):
                controls = params_for(ch, grid[gi], controls)
            yield FactorialCell(
                index=cell_index,
                controls=controls,
                sweep=plan_single_sweep(self.varied, self.steps, controls, self.render_config),
            )
            for slot in reversed(range(4)):
                indices[slot] += 1
                if indices[slot] < self.steps:
                    break
                indices[slot] = 0


def plan_single_sweep(
    channel: ChannelId,
    steps: int = 1000,
    controls: StimulusParams | None = None,
    cfg: RenderConfig = RenderConfig(),
) -> SweepPlan:
    """Uniform sweep of one channel over its full range, endpoints included;
    every other channel is held at `controls`."""
    if steps < 2:
        raise DomainError(f"a sweep needs at least 2 steps, got {steps}")
    if controls is None:
        controls = default_params()
    items = []
    for i in range(steps):
        t = i / (steps - 1)
        p = params_for(channel, t, controls)
        items.append(SweepItem(index=i, t=t, params=p, stimulus_id=stimulus_id(p, cfg)))
    return SweepPlan(varied=channel, steps=steps, controls=controls, render_config=cfg, items=tuple(items))


def plan_factorial(
    varied: ChannelId,
    steps: int = 20,
    cfg: RenderConfig = RenderConfig(),
) -> FactorialPlan:
    """Factorial design: sweep `varied` inside every combination of `steps`
    values of the other four non-area channels. Area takes part in no
    factorial design, neither varied nor as a control."""
    if varied is ChannelId.AREA:
        raise UnsupportedDesignError(
            "area cannot be combined with the line channels; factorial designs exclude it"
        )
    if steps < 2:
        raise DomainError(f"a factorial design needs at least 2 steps, got {steps}")
    return FactorialPlan(varied=varied, steps=steps, render_config=cfg)


@dataclass(frozen=True)
class ManifestRecord:
    id: str
    channel: str
    t: float
    params: StimulusParams
    path: str
    sha256: str
    cell: int | None = None

    def to_json_line(self) -> str:
        obj = {
            "id": self.id,
            "channel": self.channel,
            "t": self.t,
            "params": self.params.to_dict(),
            "path": self.path,
            "sha256": self.sha256,
        }
        if self.cell is not None:
            obj["cell"] = self.cell
        return json.dumps(obj, separators=(",", ":"))


@dataclass
class Manifest:
    header: dict
    records: list[ManifestRecord]
    rendered_count: int = field(default=0, compare=False)

    def to_bytes(self) -> bytes:
        lines = [json.dumps(self.header, separators=(",", ":"))]
        lines.extend(r.to_json_line() for r in self.records)
        return ("\n".join(lines) + "\n").encode("utf-8")

    def to_sweep_plan(self) -> SweepPlan:
        if self.header.get("kind") != "sweep":
            raise ManifestError(f"manifest kind {self.header.get('kind')!r} is not a sweep")
        cfg = RenderConfig.from_dict(self.header["render"])
        controls = StimulusParams.from_dict(self.header["controls"])
        items = tuple(
            SweepItem(index=i, t=r.t, params=r.params, stimulus_id=r.id)
            for i, r in enumerate(self.records)
        )
        return SweepPlan(
            varied=ChannelId(self.header["varied"]),
            steps=self.header["steps"],
            controls=controls,
            render_config=cfg,
            items=items,
        )


def _sweep_header(plan: SweepPlan) -> dict:
    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "kind": "sweep",
        "varied": plan.varied.value,
        "steps": plan.steps,
        "controls": plan.controls.to_dict(),
        "render": plan.render_config.to_dict(),
        "count": len(plan.items),
    }


def _factorial_header(plan: FactorialPlan) -> dict:
    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "kind": "factorial",
        "varied": plan.varied.value,
        "steps": plan.steps,
        "controls": None,
        "render": plan.render_config.to_dict(),
        "count": plan.n_stimuli,
    }


def _iter_plan_records(plan: SweepPlan | FactorialPlan):
    """(channel, t, params, id, cell) for every stimulus, in manifest order."""
    if isinstance(plan, SweepPlan):
        for item in plan.items:
            yield plan.varied.value, item.t, item.params, item.stimulus_id, None
    else:
        for cell in plan.cells():
            for item in cell.sweep.items:
                yield plan.varied.value, item.t, item.params, item.stimulus_id, cell.index


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def materialize(
    plan: SweepPlan | FactorialPlan,
    out_dir: str | Path,
    cfg: RenderConfig | None = None,
    jobs: int = 1,
) -> Manifest:
    """Render every stimulus in `plan` to ``out_dir/images`` and write the
    manifest. Re-running verifies content hashes and only re-renders files
    that are missing or tampered with; the manifest bytes are reproduced
    identically."""
    cfg = cfg or plan.render_config
    if cfg != plan.render_config:
        raise DomainError("render config differs from the one the plan was hashed with")
    out_dir = Path(out_dir)
    images = out_dir / "images"
    images.mkdir(parents=True, exist_ok=True)

    known_hashes: dict[str, str] = {}
    manifest_path = out_dir / MANIFEST_NAME
    if manifest_path.exists():
        try:
            prior = load_manifest(manifest_path)
            known_hashes = {r.id: r.sha256 for r in prior.records}
        except ManifestError:
            known_hashes = {}

    entries = list(_iter_plan_records(plan))

    def _prepare(entry):
        channel, t, params, sid, cell = entry
        rel = f"images/{sid}.png"
        target = out_dir / rel
        expected = known_hashes.get(sid)
        if expected is not None and target.exists():
            actual = hashlib.sha256(target.read_bytes()).hexdigest()
            if actual == expected:
                return ManifestRecord(sid, channel, t, params, rel, expected, cell), False
        data = encode_png(render(params, cfg))
        digest = hashlib.sha256(data).hexdigest()
        _atomic_write(target, data)
        return ManifestRecord(sid, channel, t, params, rel, digest, cell), True

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_prepare, entries))
    else:
        results = [_prepare(e) for e in entries]

    records = [rec for rec, _ in results]
    header = _sweep_header(plan) if isinstance(plan, SweepPlan) else _factorial_header(plan)
    manifest = Manifest(header=header, records=records,
                        rendered_count=sum(1 for _, fresh in results if fresh))
    _atomic_write(manifest_path, manifest.to_bytes())
    return manifest


def load_manifest(path: str | Path) -> Manifest:
    """Parse a manifest file, validating schema, fields and id uniqueness.
    Errors name the offending line."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ManifestError(f"{path}: missing header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: malformed header at line 1: {exc}") from exc
    if not isinstance(header, dict) or "schema_version" not in header:
        raise ManifestError(f"{path}: missing header")
    if header["schema_version"] != MANIFEST_SCHEMA_VERSION:
        raise ManifestError(
            f"{path}: unsupported schema version {header['schema_version']!r} "
            f"(expected {MANIFEST_SCHEMA_VERSION})"
        )

    records: list[ManifestRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: malformed record at line {lineno}: {exc}") from exc
        try:
            rec = ManifestRecord(
                id=obj["id"],
                channel=obj["channel"],
                t=float(obj["t"]),
                params=StimulusParams.from_dict(obj["params"]),
                path=obj["path"],
                sha256=obj["sha256"],
                cell=obj.get("cell"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"{path}: malformed record at line {lineno}: {exc}") from exc
        if rec.id in seen:
            raise ManifestError(f"{path}: duplicate id at line {lineno}")
        seen.add(rec.id)
        records.append(rec)

    declared = header.get("count")
    if declared is not None and declared != len(records):
        raise ManifestError(f"{path}: header declares {declared} records, found {len(records)}")
    return Manifest(header=header, records=records)
