"""Deterministic SVG figures for gmscore CSV artifacts."""

from .render import KINDS, FigureJob, SchemaError, median_abs_error_by_group, render

__all__ = ["KINDS", "FigureJob", "SchemaError", "median_abs_error_by_group", "render"]
__version__ = "0.1.0"
