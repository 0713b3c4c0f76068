"""
Unit tests for the SVG charts
"""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from src.errors import DataError
from src.plotting import Chart, LineChart, ScatterChart


def _elements(svg_text, tag):
    return [e for e in ET.fromstring(svg_text).iter() if e.tag.endswith(tag)]


class TestChart:
    """Test suite for the chart base class"""

    def test_base_class_is_abstract(self):
        """Test a chart without a series drawer cannot be built"""
        with pytest.raises(TypeError):
            Chart(title="t", x_label="x", y_label="y")

    def test_subclass_must_draw_series(self):
        """Test a subclass that skips _draw_series stays abstract"""

        class Bare(Chart):
            pass

        with pytest.raises(TypeError):
            Bare(title="t", x_label="x", y_label="y")

    def test_subclass_drawer_is_used(self):
        """Test render calls the subclass drawer"""

        class Marker(Chart):
            def _draw_series(self, svg):
                ET.SubElement(svg, "g", {"class": "marker"})

        svg = Marker(title="t", x_label="x", y_label="y").render()
        assert [e for e in ET.fromstring(svg).iter() if e.get("class") == "marker"]


class TestLineChart:
    """Test suite for LineChart"""

    def test_one_polyline_per_series(self):
        """Test each series becomes one polyline"""
        chart = LineChart(title="t", x_label="x", y_label="y", x_ticks=[1, 2, 3])
        chart.add_series("a", [1, 2, 3], [0.1, 0.2, 0.3])
        chart.add_series("b", [1, 2, 3], [0.3, 0.2, 0.1])
        polylines = _elements(chart.render(), "polyline")
        assert len(polylines) == 2
        assert len(polylines[0].get("points").split()) == 3

    def test_non_finite_points_dropped(self):
        """Test NaN points are left out of the polyline"""
        chart = LineChart(title="t", x_label="x", y_label="y")
        chart.add_series("a", [1, 2, 3], [0.1, np.nan, 0.3])
        assert len(_elements(chart.render(), "polyline")[0].get("points").split()) == 2

    def test_render_is_deterministic(self):
        """Test equal charts render to equal text"""
        def build():
            chart = LineChart(title="t", x_label="x", y_label="y")
            return chart.add_series("a", [1, 2], [0.5, 0.25]).render()

        assert build() == build()

    def test_constant_series_renders(self):
        """Test a flat series does not produce NaN coordinates"""
        chart = LineChart(title="t", x_label="x", y_label="y")
        chart.add_series("flat", [1, 2, 3], [0.3, 0.3, 0.3])
        assert "nan" not in chart.render()

    def test_shape_mismatch(self):
        """Test x and y of different lengths are rejected"""
        chart = LineChart(title="t", x_label="x", y_label="y")
        with pytest.raises(DataError):
            chart.add_series("a", [1, 2], [1])


class TestScatterChart:
    """Test suite for ScatterChart"""

    def test_one_circle_per_point(self):
        """Test each point becomes one circle"""
        chart = ScatterChart(title="t", x_label="x", y_label="y")
        chart.add_series("a", [0.1, 0.2, 0.4], [0.5, 0.6, 0.7])
        assert len(_elements(chart.render(), "circle")) == 3

    def test_empty_chart_renders(self):
        """Test a chart without series still renders"""
        svg = ScatterChart(title="empty", x_label="x", y_label="y").render()
        assert _elements(svg, "circle") == []

    def test_save(self, tmp_path):
        """Test save writes the SVG document"""
        chart = ScatterChart(title="t", x_label="x", y_label="y")
        path = chart.add_series("a", [1.0], [2.0]).save(tmp_path / "c.svg")
        assert path.read_text().startswith("<svg")

    def test_save_unwritable(self, tmp_path):
        """Test a write failure becomes a DataError"""
        with pytest.raises(DataError):
            ScatterChart(title="t", x_label="x", y_label="y").save(tmp_path / "no" / "c.svg")
