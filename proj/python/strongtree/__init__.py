"""Optimal depth-bounded classification trees learned with flow-based MIO formulations."""

from ._core import (
    Dataset,
    StrongTreeError,
    Tree,
    compare_relaxations,
    evaluate,
    from_arrays,
    load_csv,
    split,
    train,
)

__all__ = [
    "Dataset",
    "StrongTreeError",
    "Tree",
    "compare_relaxations",
    "evaluate",
    "from_arrays",
    "load_csv",
    "split",
    "train",
]
__version__ = "0.1.0"
