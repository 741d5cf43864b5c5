"""Writers for bound curves: CSV rows, a standalone SVG chart and a matplotlib figure."""

from .tables import format_number, write_csv
from .svg import render_svg

__all__ = ["format_number", "render_svg", "write_csv"]
