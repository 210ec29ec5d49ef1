"""
Spiral Figure
Draws the beginning of the spiral, the unit circle, the iterates and the
circles of radius eps_k used to construct each next iterate, as standalone SVG.
"""
import logging
from pathlib import Path
from typing import Union
from xml.etree import ElementTree as ET

import numpy as np

from schemas.sequence_schemas import SequenceReport
from spiral.curve import curve
from utils.errors import DomainError
from utils.serialization import format_float

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
CURVE_SAMPLES = 2000
EXTENT = 2.2
MARKER_RADIUS = 0.025
STROKE = 0.006


class SpiralFigure:
    """SVG rendering of the first ``n`` iterates of a sequence report."""

    def __init__(self, report: SequenceReport, n: int, size: int = 600):
        if n < 2:
            raise DomainError("the figure needs at least 2 iterates")
        if n > len(report):
            raise DomainError(f"figure asks for {n} iterates, report has {len(report)}")
        self.report = report
        self.n = n
        self.size = size

    def _polyline(self) -> str:
        alpha_last = self.report.records[self.n - 1].alpha
        samples = np.linspace(0.0, alpha_last, CURVE_SAMPLES)
        pts = [curve(float(t)) for t in samples]
        return " ".join(f"{format_float(p[0])},{format_float(p[1])}" for p in pts)

    def render(self) -> str:
        ET.register_namespace("", SVG_NS)
        side = format_float(2.0 * EXTENT)
        svg = ET.Element(f"{{{SVG_NS}}}svg", {
            "width": str(self.size),
            "height": str(self.size),
            "viewBox": f"{format_float(-EXTENT)} {format_float(-EXTENT)} {side} {side}",
        })
        ET.SubElement(svg, f"{{{SVG_NS}}}title").text = f"Spiral iterates x_0..x_{self.n - 1}"
        # Math orientation: y grows upwards.
        group = ET.SubElement(svg, f"{{{SVG_NS}}}g", {"transform": "scale(1,-1)", "fill": "none"})

        ET.SubElement(group, f"{{{SVG_NS}}}circle", {
            "class": "unit-circle", "cx": "0", "cy": "0", "r": "1",
            "stroke": "#888888", "stroke-width": format_float(STROKE),
        })
        ET.SubElement(group, f"{{{SVG_NS}}}polyline", {
            "class": "spiral", "points": self._polyline(),
            "stroke": "#1f77b4", "stroke-width": format_float(STROKE),
        })
        for record in self.report.records[: self.n]:
            cx, cy = format_float(record.x[0]), format_float(record.x[1])
            ET.SubElement(group, f"{{{SVG_NS}}}circle", {
                "class": "radius", "data-n": str(record.n), "cx": cx, "cy": cy,
                "r": format_float(record.eps), "stroke": "#d62728", "stroke-width": format_float(STROKE / 2),
            })
        for record in self.report.records[: self.n]:
            ET.SubElement(group, f"{{{SVG_NS}}}circle", {
                "class": "marker", "data-n": str(record.n),
                "cx": format_float(record.x[0]), "cy": format_float(record.x[1]),
                "r": format_float(MARKER_RADIUS), "fill": "#000000",
            })
        return ET.tostring(svg, encoding="unicode", xml_declaration=True) + "\n"

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.render(), encoding="utf-8")
        logger.info("wrote spiral figure with %d iterates to %s", self.n, path)
        return path


def render_spiral_svg(report: SequenceReport, n: int) -> str:
    return SpiralFigure(report, n).render()
