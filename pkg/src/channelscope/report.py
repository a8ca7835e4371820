"""Machine-readable result tables and publication-style SVG figures.

A ``RunReport`` carries everything a run produced; emission is a pure
function of the report, so re-emitting without recomputation reproduces
every output file byte for byte. Floats are canonicalized to 9
significant digits when the report is built, which makes the JSON bundle
round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .channels import ChannelId, HUMAN_CHANNEL_ORDER
from .svgfig import SvgDoc

__all__ = ["RunReport", "canon_float", "emit_tables", "emit_figures"]

REPORT_SCHEMA_VERSION = 1

DISPLAY_NAMES = {
    ChannelId.LENGTH: "Length",
    ChannelId.TILT: "Tilt",
    ChannelId.AREA: "Area",
    ChannelId.LUMINANCE: "Color Luminance",
    ChannelId.SATURATION: "Color Saturation",
    ChannelId.CURVATURE: "Curvature",
}


def canon_float(v: float) -> float:
    """Round to 9 significant digits (the serialization precision)."""
    return float(f"{float(v):.9g}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


@dataclass
class RunReport:
    """Results of one full run, in serialization-ready plain data.

    ``linearity`` rows: {channel, score, n, dim}.
    ``profiles`` rows: {channel, sigma, raw, smoothed, peak_indices,
    peak_prominences, threshold_frac, peak_count, group_count}.
    ``factorial`` rows: {channel, steps, cells, min, q1, median, q3, max}.
    ``ranking``: {order, tie_groups, scores, tie_epsilon}.
    ``kendall_tau_vs_human`` is None when undefined (everything tied).
    """

    meta: dict
    linearity: list[dict] = field(default_factory=list)
    profiles: list[dict] = field(default_factory=list)
    factorial: list[dict] = field(default_factory=list)
    ranking: dict | None = None
    human_baseline: list[str] = field(default_factory=list)
    kendall_tau_vs_human: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "meta": self.meta,
            "linearity": self.linearity,
            "profiles": self.profiles,
            "factorial": self.factorial,
            "ranking": self.ranking,
            "human_baseline": self.human_baseline,
            "kendall_tau_vs_human": self.kendall_tau_vs_human,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "RunReport":
        if obj.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {obj.get('schema_version')!r}")
        return cls(
            meta=obj["meta"],
            linearity=obj["linearity"],
            profiles=obj["profiles"],
            factorial=obj["factorial"],
            ranking=obj["ranking"],
            human_baseline=obj["human_baseline"],
            kendall_tau_vs_human=obj["kendall_tau_vs_human"],
        )

    def channels_in_human_order(self, rows: list[dict]) -> list[dict]:
        present = {r["channel"]: r for r in rows}
        ordered = [present[c.value] for c in HUMAN_CHANNEL_ORDER if c.value in present]
        ordered.extend(r for r in rows if r["channel"] not in {c.value for c in HUMAN_CHANNEL_ORDER})
        return ordered


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    return path


def emit_tables(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write one CSV per result family plus the JSON bundle.

    CSV: UTF-8, header row, comma separators, LF endings, stable column
    order, floats at 9 significant digits.
    """
    out = Path(out_dir)
    written = []

    rows = ["channel,score,n,dim"]
    rows += [f"{r['channel']},{_fmt(r['score'])},{r['n']},{r['dim']}" for r in report.linearity]
    written.append(_write(out / "linearity.csv", "\n".join(rows) + "\n"))

    rows = ["channel,steps,cells,min,q1,median,q3,max"]
    rows += [
        f"{r['channel']},{r['steps']},{r['cells']},{_fmt(r['min'])},{_fmt(r['q1'])},"
        f"{_fmt(r['median'])},{_fmt(r['q3'])},{_fmt(r['max'])}"
        for r in report.factorial
    ]
    written.append(_write(out / "box_stats.csv", "\n".join(rows) + "\n"))

    rows = ["channel,index,raw,smoothed"]
    for prof in report.profiles:
        rows += [
            f"{prof['channel']},{i},{_fmt(r)},{_fmt(s)}"
            for i, (r, s) in enumerate(zip(prof["raw"], prof["smoothed"]))
        ]
    written.append(_write(out / "distances.csv", "\n".join(rows) + "\n"))

    rows = ["channel,index,prominence"]
    for prof in report.profiles:
        rows += [
            f"{prof['channel']},{i},{_fmt(p)}"
            for i, p in zip(prof["peak_indices"], prof["peak_prominences"])
        ]
    written.append(_write(out / "peaks.csv", "\n".join(rows) + "\n"))

    bundle = json.dumps(report.to_json_dict(), indent=2, allow_nan=False) + "\n"
    written.append(_write(out / "report.json", bundle))
    return written


# figure layout constants
_W, _H = 640, 320
_ML, _MR, _MT, _MB = 60, 20, 36, 42


def _axes(doc: SvgDoc, title: str) -> tuple[float, float, float, float]:
    x0, y0 = _ML, _H - _MB
    x1, y1 = _W - _MR, _MT
    doc.text(_W / 2, 20, title, size=13, anchor="middle")
    doc.line(x0, y0, x1, y0, stroke="#444")
    doc.line(x0, y0, x0, y1, stroke="#444")
    return x0, y0, x1, y1


def _distance_figure(prof: dict) -> str:
    doc = SvgDoc(_W, _H)
    chan = ChannelId(prof["channel"])
    x0, y0, x1, y1 = _axes(
        doc, f"{DISPLAY_NAMES[chan]}: consecutive embedding distances (sigma={_fmt(prof['sigma'])})"
    )
    raw, smoothed = prof["raw"], prof["smoothed"]
    n = len(raw)
    ymax = max(max(raw, default=0.0), max(smoothed, default=0.0))
    if ymax <= 0.0:
        ymax = 1.0

    def px(i: float) -> float:
        return x0 + (x1 - x0) * (i / max(n - 1, 1))

    def py(v: float) -> float:
        return y0 - (y0 - y1) * (v / ymax) * 0.95

    doc.polyline([(px(i), py(v)) for i, v in enumerate(raw)], stroke="#bbbbbb", width=1.0)
    doc.polyline([(px(i), py(v)) for i, v in enumerate(smoothed)], stroke="#c03030", width=2.0)
    for i in prof["peak_indices"]:
        doc.circle(px(i), py(smoothed[i]), 4.0, fill="none", stroke="#222")
    doc.text(x0, y0 + 16, "0", size=11, anchor="middle")
    doc.text(x1, y0 + 16, str(n - 1), size=11, anchor="middle")
    doc.text(_W / 2, y0 + 30, "consecutive pair index", size=11, anchor="middle")
    doc.text(x0 - 6, py(ymax) + 4, _fmt(canon_float(ymax)), size=10, anchor="end")
    doc.text(x0 - 6, y0 + 4, "0", size=10, anchor="end")
    return doc.to_string()


def _score_rows(report: RunReport, rows: list[dict], title: str, draw_row) -> str:
    ordered = report.channels_in_human_order(rows)
    row_h, gap = 28, 12
    height = _MT + len(ordered) * (row_h + gap) + _MB
    doc = SvgDoc(_W, height)
    x0, x1 = 150, _W - _MR
    doc.text(_W / 2, 20, title, size=13, anchor="middle")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        gx = x0 + (x1 - x0) * frac
        doc.line(gx, _MT, gx, height - _MB, stroke="#dddddd")
        doc.text(gx, height - _MB + 16, _fmt(frac), size=10, anchor="middle")
    doc.text((x0 + x1) / 2, height - 8, "linearity (PC1 explained variance)", size=11, anchor="middle")
    for k, row in enumerate(ordered):
        y = _MT + k * (row_h + gap)
        chan = ChannelId(row["channel"])
        doc.text(x0 - 8, y + row_h / 2 + 4, DISPLAY_NAMES[chan], size=11, anchor="end")
        draw_row(doc, row, x0, x1, y, row_h)
    return doc.to_string()


def _linearity_figure(report: RunReport) -> str:
    def draw(doc: SvgDoc, row: dict, x0: float, x1: float, y: float, h: float) -> None:
        w = (x1 - x0) * max(0.0, min(1.0, row["score"]))
        doc.rect(x0, y, w, h, fill="#4a7fb5")
        doc.text(x0 + w + 6, y + h / 2 + 4, _fmt(row["score"]), size=10)

    return _score_rows(report, report.linearity,
                       "Linearity per channel (human accuracy order, top = best)", draw)


def _box_figure(report: RunReport) -> str:
    def draw(doc: SvgDoc, row: dict, x0: float, x1: float, y: float, h: float) -> None:
        def sx(v: float) -> float:
            return x0 + (x1 - x0) * max(0.0, min(1.0, v))

        mid = y + h / 2
        doc.line(sx(row["min"]), mid, sx(row["max"]), mid, stroke="#333")
        doc.line(sx(row["min"]), mid - 6, sx(row["min"]), mid + 6, stroke="#333")
        doc.line(sx(row["max"]), mid - 6, sx(row["max"]), mid + 6, stroke="#333")
        doc.rect(sx(row["q1"]), y + 3, max(sx(row["q3"]) - sx(row["q1"]), 0.5), h - 6,
                 fill="#e8b24a", stroke="#333")
        doc.line(sx(row["median"]), y + 3, sx(row["median"]), y + h - 3, stroke="#333", width=2.0)

    return _score_rows(report, report.factorial,
                       "Factorial linearity per channel (whiskers = min/max of all cells)", draw)


def emit_figures(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write SVG figures: one distance profile per channel, a linearity bar
    chart in human-ranking order, and (when factorial results exist) a box
    plot with min/max whiskers. Deterministic bytes for a fixed report."""
    out = Path(out_dir) / "figures"
    written = []
    for prof in report.profiles:
        written.append(_write(out / f"distances_{prof['channel']}.svg", _distance_figure(prof)))
    if report.linearity:
        written.append(_write(out / "linearity_bars.svg", _linearity_figure(report)))
    if report.factorial:
        written.append(_write(out / "factorial_box.svg", _box_figure(report)))
    return written
