"""Figure renderers for the ltcds CSV outputs."""

__version__ = "0.1.0"

from .figures import (
    FigureSpec,
    PlotError,
    extract_data_table,
    render_degree_overlay,
    render_estimate_hists,
    render_ps_curves,
)

__all__ = [
    "FigureSpec",
    "PlotError",
    "extract_data_table",
    "render_degree_overlay",
    "render_estimate_hists",
    "render_ps_curves",
]
