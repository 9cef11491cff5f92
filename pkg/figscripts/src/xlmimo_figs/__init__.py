"""Figure rendering for xlmimo-ee sweep CSV output."""

__version__ = "0.1.0"

from .recipes import (
    FIGURE_IDS,
    EmptyCsvError,
    FigureError,
    FigureRecipe,
    MissingColumnError,
    render,
)
