"""Visual channel definitions and the controlled stimulus parameter space.

Six magnitude channels are modelled: length, tilt, area, color luminance,
color saturation, and curvature. A stimulus is either a line-like mark
(straight segment or circular arc) or a filled square; the square is the
only carrier of the area channel. Hue is pinned to 0 (red) everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

from .errors import DomainError

__all__ = [
    "ChannelId",
    "Mark",
    "StimulusParams",
    "RenderConfig",
    "HUMAN_CHANNEL_ORDER",
    "default_params",
    "channel_range",
    "params_for",
    "canonical_params_json",
]


class ChannelId(Enum):
    """The six visual channels under test."""

    LENGTH = "length"
    TILT = "tilt"
    AREA = "area"
    LUMINANCE = "luminance"
    SATURATION = "saturation"
    CURVATURE = "curvature"

    @classmethod
    def from_name(cls, name: str) -> "ChannelId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(c.value for c in cls)
            raise DomainError(f"unknown channel {name!r}; expected one of: {valid}") from None


class Mark(Enum):
    LINE_LIKE = "line"
    SQUARE = "square"


#: Channels ordered by decreasing accuracy of human perception.
HUMAN_CHANNEL_ORDER: tuple[ChannelId, ...] = (
    ChannelId.LENGTH,
    ChannelId.TILT,
    ChannelId.AREA,
    ChannelId.LUMINANCE,
    ChannelId.SATURATION,
    ChannelId.CURVATURE,
)

#: Default line channel magnitudes used when a square stimulus is switched
#: back to a line-like mark.
_LINE_DEFAULTS = {"length_pct": 0.5, "tilt_deg": 0.0, "curvature_deg": 0.0}

_RANGES: dict[ChannelId, tuple[float, float, str]] = {
    ChannelId.LENGTH: (0.0, 1.0, "fraction"),
    ChannelId.TILT: (0.0, 90.0, "deg"),
    ChannelId.AREA: (0.0, 1.0, "fraction"),
    ChannelId.LUMINANCE: (0.0, 1.0, "fraction"),
    ChannelId.SATURATION: (0.0, 1.0, "fraction"),
    ChannelId.CURVATURE: (0.0, 180.0, "deg"),
}


def _check_unit(name: str, v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"{name} must be in [0, 1], got {v!r}")


@dataclass(frozen=True)
class StimulusParams:
    """One point in the stimulus space.

    A ``LINE_LIKE`` mark carries length, tilt and curvature and no area;
    a ``SQUARE`` mark carries area and no line fields. Luminance and
    saturation apply to both. ``hue_deg`` is constant 0.
    """

    mark: Mark = Mark.LINE_LIKE
    length_pct: float | None = 0.5
    tilt_deg: float | None = 0.0
    curvature_deg: float | None = 0.0
    area_pct: float | None = None
    luminance_pct: float = 0.5
    saturation_pct: float = 1.0
    hue_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.hue_deg != 0.0:
            raise DomainError(f"hue_deg is fixed at 0, got {self.hue_deg!r}")
        _check_unit("luminance_pct", self.luminance_pct)
        _check_unit("saturation_pct", self.saturation_pct)
        if self.mark is Mark.SQUARE:
            if self.area_pct is None:
                raise DomainError("square mark requires area_pct")
            if not (self.length_pct is None and self.tilt_deg is None and self.curvature_deg is None):
                raise DomainError("square mark must not carry line fields")
            _check_unit("area_pct", self.area_pct)
        else:
            if self.area_pct is not None:
                raise DomainError("line mark must not carry area_pct")
            if self.length_pct is None or self.tilt_deg is None or self.curvature_deg is None:
                raise DomainError("line mark requires length, tilt and curvature")
            _check_unit("length_pct", self.length_pct)
            if not 0.0 <= self.tilt_deg <= 90.0:
                raise DomainError(f"tilt_deg must be in [0, 90], got {self.tilt_deg!r}")
            if not 0.0 <= self.curvature_deg <= 180.0:
                raise DomainError(f"curvature_deg must be in [0, 180], got {self.curvature_deg!r}")

    def value_of(self, channel: ChannelId) -> float | None:
        """Magnitude of `channel` in this stimulus, or None if inactive."""
        return {
            ChannelId.LENGTH: self.length_pct,
            ChannelId.TILT: self.tilt_deg,
            ChannelId.AREA: self.area_pct,
            ChannelId.LUMINANCE: self.luminance_pct,
            ChannelId.SATURATION: self.saturation_pct,
            ChannelId.CURVATURE: self.curvature_deg,
        }[channel]

    def to_dict(self) -> dict:
        return {
            "mark": self.mark.value,
            "length_pct": self.length_pct,
            "tilt_deg": self.tilt_deg,
            "curvature_deg": self.curvature_deg,
            "area_pct": self.area_pct,
            "luminance_pct": self.luminance_pct,
            "saturation_pct": self.saturation_pct,
            "hue_deg": self.hue_deg,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StimulusParams":
        d = dict(d)
        d["mark"] = Mark(d["mark"])
        return cls(**d)


@dataclass(frozen=True)
class RenderConfig:
    """Raster settings shared by every stimulus in one experiment.

    The background is always white; marks are drawn anti-aliased with a
    fixed stroke so neither is ever a confound between sweeps.
    """

    canvas_px: int = 336
    stroke_px: int = 4
    antialias: bool = True

    def __post_init__(self) -> None:
        if self.canvas_px < 32:
            raise DomainError(f"canvas_px must be >= 32, got {self.canvas_px}")
        if self.stroke_px <= 0 or self.stroke_px >= self.canvas_px / 4:
            raise DomainError(
                f"stroke_px must be positive and < canvas_px/4, got {self.stroke_px}"
            )

    def to_dict(self) -> dict:
        return {"canvas_px": self.canvas_px, "stroke_px": self.stroke_px, "antialias": self.antialias}

    @classmethod
    def from_dict(cls, d: dict) -> "RenderConfig":
        return cls(**d)


def default_params() -> StimulusParams:
    """The controlled values every non-varied channel is held at.

    Length 50%, tilt 0, curvature 0, luminance 50%, saturation 100%,
    area inactive (line-like mark), hue 0.
    """
    return StimulusParams()


def channel_range(channel: ChannelId) -> tuple[float, float, str]:
    """(min, max, unit) of a channel's magnitude scale."""
    return _RANGES[channel]


def params_for(channel: ChannelId, t: float, controls: StimulusParams) -> StimulusParams:
    """Place `channel` at sweep position ``t`` in [0, 1], holding everything
    else at `controls`.

    Selecting the area channel switches the mark to a square and drops the
    line fields; selecting a line channel on square controls switches back
    to a line-like mark with default line values for the unset fields.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"sweep position t must be in [0, 1], got {t!r}")
    lo, hi, _ = channel_range(channel)
    value = lo + t * (hi - lo)

    if channel is ChannelId.AREA:
        return StimulusParams(
            mark=Mark.SQUARE,
            length_pct=None,
            tilt_deg=None,
            curvature_deg=None,
            area_pct=value,
            luminance_pct=controls.luminance_pct,
            saturation_pct=controls.saturation_pct,
        )

    if channel in (ChannelId.LUMINANCE, ChannelId.SATURATION):
        field = "luminance_pct" if channel is ChannelId.LUMINANCE else "saturation_pct"
        return replace(controls, **{field: value})

    # Line geometry channel: force a line-like mark.
    base = controls.to_dict()
    base.pop("mark")
    base["area_pct"] = None
    for name, dflt in _LINE_DEFAULTS.items():
        if base[name] is None:
            base[name] = dflt
    field = {
        ChannelId.LENGTH: "length_pct",
        ChannelId.TILT: "tilt_deg",
        ChannelId.CURVATURE: "curvature_deg",
    }[channel]
    base[field] = value
    return StimulusParams(mark=Mark.LINE_LIKE, **base)


def _canon(v):
    # -0.0 and 0.0 must hash identically
    return v + 0.0 if isinstance(v, float) else v


def canonical_params_json(params: StimulusParams, cfg: RenderConfig) -> str:
    """Canonical serialization used for content-addressed stimulus ids."""
    payload = {
        "params": {k: _canon(v) for k, v in params.to_dict().items()},
        "render": cfg.to_dict(),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
