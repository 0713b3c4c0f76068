"""
SVG Charts

Small deterministic line and scatter charts written with ElementTree. Every
coordinate is formatted with fixed precision, so equal inputs give
byte-identical files.
"""

import xml.etree.ElementTree as ET
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DataError

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _line(parent: ET.Element, x1: float, y1: float, x2: float, y2: float) -> ET.Element:
    coords = {"x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2), "y2": _fmt(y2)}
    return ET.SubElement(parent, "line", coords)


def _text(
    parent: ET.Element, x: float, y: float, content: str, attrs: Optional[Dict[str, str]] = None
) -> ET.Element:
    element = ET.SubElement(parent, "text", {"x": _fmt(x), "y": _fmt(y), **(attrs or {})})
    element.text = content
    return element


def _tick_label(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e6:
        return str(int(value))
    return f"{value:.3g}"


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray


@dataclass
class Chart(ABC):
    """Axes, ticks, title and legend shared by every chart kind"""

    title: str
    x_label: str
    y_label: str
    width: int = 640
    height: int = 420
    margin_left: int = 70
    margin_right: int = 150
    margin_top: int = 40
    margin_bottom: int = 55
    x_ticks: Optional[Sequence[float]] = None
    y_tick_count: int = 5
    series: List[Series] = field(default_factory=list)

    def add_series(self, label: str, x: Sequence[float], y: Sequence[float]) -> "Chart":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise DataError(f"series {label!r}: x {x.shape} and y {y.shape} differ")
        self.series.append(Series(label, x, y))
        return self

    def _ranges(self) -> Tuple[float, float, float, float]:
        xs = [s.x[np.isfinite(s.x)] for s in self.series]
        ys = [s.y[np.isfinite(s.y)] for s in self.series]
        if self.x_ticks is not None and len(self.x_ticks):
            xs.append(np.asarray(self.x_ticks, dtype=np.float64))
        x_all = np.concatenate(xs) if xs else np.empty(0)
        y_all = np.concatenate(ys) if ys else np.empty(0)
        if x_all.size == 0:
            x_all = np.array([0.0, 1.0])
        if y_all.size == 0:
            y_all = np.array([0.0, 1.0])
        x_min, x_max = float(x_all.min()), float(x_all.max())
        y_min, y_max = float(y_all.min()), float(y_all.max())
        if x_max == x_min:
            x_min, x_max = x_min - 0.5, x_max + 0.5
        if y_max == y_min:
            y_min, y_max = y_min - 0.5, y_max + 0.5
        return x_min, x_max, y_min, y_max

    def _plot_box(self) -> Tuple[float, float, float, float]:
        left = float(self.margin_left)
        top = float(self.margin_top)
        right = float(self.width - self.margin_right)
        bottom = float(self.height - self.margin_bottom)
        return left, top, right, bottom

    def _scale(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x_min, x_max, y_min, y_max = self._ranges()
        left, top, right, bottom = self._plot_box()
        px = left + (x - x_min) / (x_max - x_min) * (right - left)
        py = bottom - (y - y_min) / (y_max - y_min) * (bottom - top)
        return px, py

    def _frame(self, svg: ET.Element) -> None:
        left, top, right, bottom = self._plot_box()
        x_min, x_max, y_min, y_max = self._ranges()

        _text(svg, self.width / 2, 22, self.title, {"text-anchor": "middle", "class": "title"})

        axes = ET.SubElement(svg, "g", {"class": "axes", "stroke": "#000", "stroke-width": "1"})
        _line(axes, left, bottom, right, bottom)
        _line(axes, left, top, left, bottom)

        x_ticks = (
            np.asarray(self.x_ticks, dtype=np.float64)
            if self.x_ticks is not None
            else np.linspace(x_min, x_max, 6)
        )
        y_ticks = np.linspace(y_min, y_max, self.y_tick_count + 1)
        small = {"font-size": "9"}

        tick_px, _ = self._scale(x_ticks, np.full_like(x_ticks, y_min))
        for value, px in zip(x_ticks, tick_px):
            tick = ET.SubElement(svg, "g", {"class": "x-tick", "stroke": "#000"})
            _line(tick, px, bottom, px, bottom + 5)
            _text(tick, px, bottom + 18, _tick_label(value), {"text-anchor": "middle", **small})

        _, tick_py = self._scale(np.full_like(y_ticks, x_min), y_ticks)
        for value, py in zip(y_ticks, tick_py):
            tick = ET.SubElement(svg, "g", {"class": "y-tick", "stroke": "#000"})
            _line(tick, left - 5, py, left, py)
            _text(tick, left - 8, py + 3, _tick_label(float(value)), {"text-anchor": "end", **small})

        middle_x = (left + right) / 2
        middle_y = (top + bottom) / 2
        _text(svg, middle_x, self.height - 12, self.x_label, {"text-anchor": "middle", "class": "x-label"})
        _text(
            svg,
            16,
            middle_y,
            self.y_label,
            {
                "text-anchor": "middle",
                "transform": f"rotate(-90 16 {_fmt(middle_y)})",
                "class": "y-label",
            },
        )

    def _legend(self, svg: ET.Element) -> None:
        _, top, right, _ = self._plot_box()
        legend = ET.SubElement(svg, "g", {"class": "legend"})
        for i, s in enumerate(self.series):
            y = top + 10 + 18 * i
            entry = ET.SubElement(legend, "g", {"class": "legend-entry"})
            swatch = {"width": "10", "height": "10", "fill": PALETTE[i % len(PALETTE)]}
            ET.SubElement(entry, "rect", {"x": _fmt(right + 12), "y": _fmt(y - 8), **swatch})
            _text(entry, right + 28, y + 1, s.label, {"font-size": "11"})

    @abstractmethod
    def _draw_series(self, svg: ET.Element) -> None:
        """Plot the series inside the axes"""

    def render(self) -> str:
        svg = ET.Element(
            "svg",
            {
                "xmlns": "http://www.w3.org/2000/svg",
                "version": "1.1",
                "width": str(self.width),
                "height": str(self.height),
                "viewBox": f"0 0 {self.width} {self.height}",
                "font-family": "sans-serif",
            },
        )
        ET.SubElement(svg, "rect", {"width": "100%", "height": "100%", "fill": "#fff"})
        self._frame(svg)
        self._draw_series(svg)
        self._legend(svg)
        return ET.tostring(svg, encoding="unicode") + "\n"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            path.write_text(self.render())
        except OSError as e:
            raise DataError(f"cannot write chart to {path}: {e}") from e
        return path


class LineChart(Chart):
    """One polyline per series"""

    def _draw_series(self, svg: ET.Element) -> None:
        for i, s in enumerate(self.series):
            keep = np.isfinite(s.y)
            px, py = self._scale(s.x[keep], s.y[keep])
            points = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
            ET.SubElement(
                svg,
                "polyline",
                {
                    "class": "series",
                    "points": points,
                    "fill": "none",
                    "stroke": PALETTE[i % len(PALETTE)],
                    "stroke-width": "1.5",
                },
            )


class ScatterChart(Chart):
    """One circle per point, coloured by series"""

    radius: float = 3.0

    def _draw_series(self, svg: ET.Element) -> None:
        for i, s in enumerate(self.series):
            group = ET.SubElement(svg, "g", {"class": "series", "fill": PALETTE[i % len(PALETTE)]})
            keep = np.isfinite(s.x) & np.isfinite(s.y)
            px, py = self._scale(s.x[keep], s.y[keep])
            for a, b in zip(px, py):
                ET.SubElement(group, "circle", {"cx": _fmt(a), "cy": _fmt(b), "r": _fmt(self.radius)})
