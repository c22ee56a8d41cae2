"""Built-in example systems, shipped as data files.

Each example is a complete run configuration under ``thermolyap/data``;
:func:`load_example` parses it like any user config.  Synthetic
pressures are stored as max-of-affine pieces, which evaluate exactly at
arbitrary points (no interpolation error near kinks).
"""

import json
from importlib import resources

import numpy as np

from .convex import GridFunction

BUILTIN_EXAMPLES = ("ex1_1", "additive_binary", "positive_pair",
                    "ex6_1", "ex6_2", "ex6_3")


class MaxAffinePressure:
    """Pressure model P(q) = max over pieces of (intercept + coef . q)."""

    def __init__(self, pieces, domain="all-q", q_grid=None):
        self.pieces = np.asarray(pieces, dtype=float)
        self.domain = domain
        self.q_grid = None if q_grid is None else np.asarray(q_grid, float)

    @property
    def dimension(self):
        return self.pieces.shape[1] - 1

    def __call__(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        return float((self.pieces[:, 0] + self.pieces[:, 1:] @ q).max())

    def grid_function(self, grid=None):
        if self.dimension != 1:
            raise ValueError("grid tabulation is one-dimensional")
        grid = self.q_grid if grid is None else np.asarray(grid, float)
        if grid is None:
            raise ValueError("no grid supplied and none stored")
        vals = (self.pieces[:, 0][:, None]
                + self.pieces[:, 1][:, None] * grid[None, :]).max(axis=0)
        return GridFunction(grid, vals)


def example_document(name):
    """The raw JSON document of a built-in example."""
    if name not in BUILTIN_EXAMPLES:
        raise KeyError(f"unknown example {name!r}; "
                       f"available: {', '.join(BUILTIN_EXAMPLES)}")
    text = resources.files("thermolyap.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def load_example(name):
    """Parse a built-in example into a :class:`~thermolyap.config.RunConfig`."""
    from .config import parse
    return parse(example_document(name))
