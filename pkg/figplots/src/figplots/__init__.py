"""Batch figure rendering for geonresp CSV sweep outputs.

Every plotted quantity is a CSV column or elementwise arithmetic on
columns; no physics is recomputed here.
"""

from figplots.recipes import FigureError, RECIPES, read_csv, render

__all__ = ["FigureError", "RECIPES", "read_csv", "render"]
__version__ = "0.1.0"
