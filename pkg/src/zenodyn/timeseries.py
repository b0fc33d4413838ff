"""Sampled time series with named columns and deterministic CSV output."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IntegrityError

__all__ = ["TimeSeries", "format_float", "PROBABILITY_CEILING"]

# Probability columns may exceed 1 by at most this much (rounding slack).
PROBABILITY_CEILING = 1e-9

# CSV floats are written with 17 significant digits, enough to round-trip
# IEEE doubles bit-exactly.
_FLOAT_FORMAT = "{:.17g}"


def format_float(value: float) -> str:
    """Render one float for the CSV contract (17 significant digits)."""
    return _FLOAT_FORMAT.format(float(value))


@dataclass(frozen=True)
class TimeSeries:
    """A strictly increasing sample grid with named real columns.

    Columns whose names start with ``p`` hold probabilities and must lie
    in [0, 1 + 1e-9]; other columns (leakage norms, operator distances,
    rung parameters) are unconstrained. The first CSV column is the grid
    itself under ``grid_name`` (``t`` for time grids, ``N`` or ``K`` for
    convergence ladders).
    """

    grid: np.ndarray
    columns: dict[str, np.ndarray]
    grid_name: str = "t"

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 1:
            raise IntegrityError("time series grid must be a nonempty 1d array")
        if not np.all(np.isfinite(grid)):
            raise IntegrityError("time series grid contains non-finite values")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise IntegrityError("time series grid must be strictly increasing")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        if not self.columns:
            raise IntegrityError("time series needs at least one column")
        clean: dict[str, np.ndarray] = {}
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != grid.shape:
                raise IntegrityError(
                    f"column {name!r} length {arr.shape} does not match grid {grid.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise IntegrityError(f"column {name!r} contains non-finite values")
            if name.startswith("p"):
                bad = np.nonzero((arr < -PROBABILITY_CEILING) | (arr > 1.0 + PROBABILITY_CEILING))[0]
                if bad.size:
                    i = int(bad[0])
                    raise IntegrityError(
                        f"probability column {name!r} out of [0, 1] at "
                        f"{self.grid_name}={grid[i]:.6g}: value {arr[i]:.9g}"
                    )
            arr.setflags(write=False)
            clean[name] = arr
        object.__setattr__(self, "columns", clean)

    def __len__(self) -> int:
        return int(self.grid.size)

    @property
    def header(self) -> list[str]:
        return [self.grid_name, *self.columns.keys()]

    def to_csv(self) -> str:
        """Deterministic CSV text: header row, 17-significant-digit floats,
        '\\n' line endings."""
        lines = [",".join(self.header)]
        series = list(self.columns.values())
        for i in range(len(self)):
            row = [format_float(self.grid[i])]
            row.extend(format_float(col[i]) for col in series)
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="ascii", newline="") as handle:
            handle.write(self.to_csv())
        return path
