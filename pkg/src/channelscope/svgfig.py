"""Tiny deterministic SVG writer.

Figures are assembled as plain strings with fixed attribute order and
fixed-precision coordinates, so identical inputs give identical bytes
(matplotlib's SVG output embeds per-process ids, which would break the
byte-stable report contract).
"""

from __future__ import annotations

__all__ = ["SvgDoc"]


def _n(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class SvgDoc:
    def __init__(self, width: int, height: int) -> None:
        self.width = width
        self.height = height
        self._parts: list[str] = []

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0, dash: str | None = None) -> None:
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self._parts.append(
            f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" '
            f'stroke="{stroke}" stroke-width="{_n(width)}"{dash_attr}/>'
        )

    def rect(self, x, y, w, h, fill="none", stroke="none", stroke_width=1.0) -> None:
        self._parts.append(
            f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(w)}" height="{_n(h)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{_n(stroke_width)}"/>'
        )

    def circle(self, cx, cy, r, fill="#000", stroke="none") -> None:
        self._parts.append(
            f'<circle cx="{_n(cx)}" cy="{_n(cy)}" r="{_n(r)}" fill="{fill}" stroke="{stroke}"/>'
        )

    def polyline(self, points: list[tuple[float, float]], stroke="#000", width=1.0) -> None:
        pts = " ".join(f"{_n(x)},{_n(y)}" for x, y in points)
        self._parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{_n(width)}"/>'
        )

    def text(self, x, y, content: str, size=12, anchor="start", fill="#222") -> None:
        self._parts.append(
            f'<text x="{_n(x)}" y="{_n(y)}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}" fill="{fill}">{_escape(content)}</text>'
        )

    def to_string(self) -> str:
        body = "\n".join(self._parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#fff"/>\n'
            f"{body}\n</svg>\n"
        )


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
