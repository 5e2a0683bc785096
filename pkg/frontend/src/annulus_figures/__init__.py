"""Figure rendering for annulus CSV outputs."""

from .render import FIGURE_KINDS, FigureSpec, render

__all__ = ["FIGURE_KINDS", "FigureSpec", "render"]
