"""Figure rendering for ratingdyn CSV datasets."""

from .render import (
    Dataset,
    FigureSpec,
    SchemaError,
    diagonal_crossings,
    read_dataset,
    render,
)

__all__ = [
    "Dataset",
    "FigureSpec",
    "SchemaError",
    "diagonal_crossings",
    "read_dataset",
    "render",
]

__version__ = "0.1.0"
