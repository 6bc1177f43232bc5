"""Grid data model and plain-text raster I/O.

Grids travel as ESRI-style ASCII text: six header lines

    ncols <int>
    nrows <int>
    xllcorner <real>
    yllcorner <real>
    cellsize <real>
    NODATA_value <real>

followed by ``nrows`` lines of ``ncols`` whitespace-separated cell values,
top row first.  ``xllcorner``, ``yllcorner`` and ``cellsize`` are carried
through untouched; nothing in this package interprets geography.

Canonical output (what :func:`grid_to_text` emits) uses single-space
separators, six decimal places for every real, and a trailing newline.
Parsing accepts any whitespace and case-insensitive header keywords, so
``grid_from_text(grid_to_text(g))`` reproduces ``g`` bit for bit whenever
the cell values survive six-decimal formatting.

Nodata is a sentinel value compared by exact equality against the
header-declared ``NODATA_value``; nodata cells pass through every
operation unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import DimensionMismatchError, GridFormatError, NightlightsError

DEFAULT_NODATA = -9999.0

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value")


@dataclass(frozen=True)
class PixelCoord:
    """Zero-based (row, col) address; row 0 is the top line of the file."""

    row: int
    col: int


@dataclass(frozen=True)
class Window:
    """Square moving window of Chebyshev radius ``radius`` pixels."""

    radius: int

    def __post_init__(self) -> None:
        if int(self.radius) != self.radius or self.radius < 1:
            raise NightlightsError(f"window radius must be an integer >= 1, got {self.radius!r}")
        object.__setattr__(self, "radius", int(self.radius))


@dataclass(frozen=True)
class DNGrid:
    """A raster of 64-bit digital numbers.

    ``values`` has shape (nrows, ncols) and is frozen after construction;
    every non-nodata cell must be finite.  Derive modified grids with
    :meth:`replace_values` so the header fields travel along.
    """

    values: np.ndarray
    nodata: float = DEFAULT_NODATA
    xllcorner: float = 0.0
    yllcorner: float = 0.0
    cellsize: float = 1.0

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise NightlightsError(f"grid values must be a non-empty 2-D array, got shape {v.shape}")
        nodata = float(self.nodata)
        if not math.isfinite(nodata):
            raise NightlightsError("nodata sentinel must be finite")
        if not np.all(np.isfinite(v)):
            raise NightlightsError("grid contains non-finite cell values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "nodata", nodata)
        object.__setattr__(self, "xllcorner", float(self.xllcorner))
        object.__setattr__(self, "yllcorner", float(self.yllcorner))
        object.__setattr__(self, "cellsize", float(self.cellsize))

    @property
    def nrows(self) -> int:
        return self.values.shape[0]

    @property
    def ncols(self) -> int:
        return self.values.shape[1]

    @property
    def valid(self) -> np.ndarray:
        """Boolean array, True where the cell is not nodata."""
        return self.values != self.nodata

    def replace_values(self, values: np.ndarray) -> "DNGrid":
        """New grid with the same header fields and different cell values."""
        return DNGrid(
            values=values,
            nodata=self.nodata,
            xllcorner=self.xllcorner,
            yllcorner=self.yllcorner,
            cellsize=self.cellsize,
        )


@dataclass(frozen=True)
class PixelMask:
    """Boolean raster companion to :class:`DNGrid`."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        b = np.array(self.bits, dtype=bool, order="C", copy=True)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise NightlightsError(f"mask bits must be a non-empty 2-D array, got shape {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def nrows(self) -> int:
        return self.bits.shape[0]

    @property
    def ncols(self) -> int:
        return self.bits.shape[1]


def require_same_shape(a, b, what: str) -> None:
    """Raise :class:`DimensionMismatchError` unless the two rasters agree."""
    if (a.nrows, a.ncols) != (b.nrows, b.ncols):
        raise DimensionMismatchError(
            f"{what}: {a.nrows}x{a.ncols} vs {b.nrows}x{b.ncols}"
        )


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def grid_from_text(text: str) -> DNGrid:
    """Parse ASCII grid text into a :class:`DNGrid`.

    Raises :class:`GridFormatError` naming the offending line on malformed
    headers, wrong cell counts or non-numeric cells.
    """
    lines = text.splitlines()
    if len(lines) < 6:
        raise GridFormatError(f"header truncated: expected 6 header lines, found {len(lines)}")

    header: dict[str, float] = {}
    casters = (int, int, float, float, float, float)
    for i, (key, caster) in enumerate(zip(_HEADER_KEYS, casters)):
        parts = lines[i].split()
        if len(parts) != 2 or parts[0].lower() != key.lower():
            raise GridFormatError(f"line {i + 1}: expected '{key} <value>', got {lines[i]!r}")
        try:
            header[key] = caster(parts[1])
        except ValueError:
            raise GridFormatError(f"line {i + 1}: invalid {key} value {parts[1]!r}") from None

    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols < 1 or nrows < 1:
        raise GridFormatError(f"line 1: grid dimensions must be positive, got {ncols}x{nrows}")

    if len(lines) < 6 + nrows:
        raise GridFormatError(
            f"line {len(lines) + 1}: expected {nrows} data rows, found {len(lines) - 6}"
        )

    values = np.empty((nrows, ncols), dtype=np.float64)
    for r in range(nrows):
        line_no = 7 + r
        tokens = lines[6 + r].split()
        if len(tokens) != ncols:
            raise GridFormatError(f"line {line_no}: expected {ncols} cells, got {len(tokens)}")
        try:
            values[r] = np.asarray(tokens, dtype=np.float64)
        except ValueError:
            for tok in tokens:
                try:
                    float(tok)
                except ValueError:
                    raise GridFormatError(f"line {line_no}: non-numeric cell {tok!r}") from None
            raise GridFormatError(f"line {line_no}: unparseable data row") from None

    for j, extra in enumerate(lines[6 + nrows:]):
        if extra.strip():
            raise GridFormatError(f"line {6 + nrows + j + 1}: unexpected extra data")

    return DNGrid(
        values=values,
        nodata=header["NODATA_value"],
        xllcorner=header["xllcorner"],
        yllcorner=header["yllcorner"],
        cellsize=header["cellsize"],
    )


def grid_to_text(grid: DNGrid) -> str:
    """Render a grid in canonical form (see module docstring)."""
    out = [
        f"ncols {grid.ncols}",
        f"nrows {grid.nrows}",
        f"xllcorner {grid.xllcorner:.6f}",
        f"yllcorner {grid.yllcorner:.6f}",
        f"cellsize {grid.cellsize:.6f}",
        f"NODATA_value {grid.nodata:.6f}",
    ]
    for row in grid.values:
        out.append(" ".join("%.6f" % v for v in row.tolist()))
    return "\n".join(out) + "\n"


def read_grid(source: str | Path | TextIO) -> DNGrid:
    """Read a grid from a path or an open text stream."""
    if hasattr(source, "read"):
        return grid_from_text(source.read())
    return grid_from_text(Path(source).read_text())


def write_grid(grid: DNGrid, target: str | Path | TextIO) -> None:
    """Write a grid in canonical form to a path or an open text stream."""
    text = grid_to_text(grid)
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text)


def mask_from_grid(grid: DNGrid) -> PixelMask:
    """Interpret a 0/1 grid as a mask: nonzero valid cells are True."""
    return PixelMask(bits=grid.valid & (grid.values != 0.0))


def grid_from_mask(mask: PixelMask, nodata: float = DEFAULT_NODATA) -> DNGrid:
    return DNGrid(values=mask.bits.astype(np.float64), nodata=nodata)


def read_mask(source: str | Path | TextIO) -> PixelMask:
    return mask_from_grid(read_grid(source))


def write_mask(mask: PixelMask, target: str | Path | TextIO) -> None:
    write_grid(grid_from_mask(mask), target)


# ---------------------------------------------------------------------------
# raster operations
# ---------------------------------------------------------------------------

def sum_of_lights(grid: DNGrid, mask: PixelMask | None = None) -> float:
    """Sum of valid cell values, optionally restricted to a mask.

    Uses math.fsum, which is correctly rounded: the result does not depend
    on selection order, and summing two disjoint masks agrees exactly with
    summing their union whenever the subset sums are representable.
    """
    if mask is not None:
        require_same_shape(grid, mask, "sum_of_lights mask")
        selected = grid.valid & mask.bits
    else:
        selected = grid.valid
    return math.fsum(grid.values[selected].tolist())


def extract_pairs(pending: DNGrid, reference: DNGrid, mask: PixelMask) -> np.ndarray:
    """Paired (pending, reference) samples over mask-true cells.

    Returns an (n, 2) float array in row-major cell order.  Cells that are
    nodata in either grid are skipped even where the mask is True.
    """
    require_same_shape(pending, reference, "extract_pairs grids")
    require_same_shape(pending, mask, "extract_pairs mask")
    selected = mask.bits & pending.valid & reference.valid
    return np.column_stack((pending.values[selected], reference.values[selected]))


def window_neighbors(
    grid: DNGrid, center: PixelCoord, window: Window
) -> list[tuple[PixelCoord, float, float]]:
    """Valid neighbours of ``center`` inside a square window.

    Returns (coord, value, euclidean distance) triples in row-major order.
    The window is truncated at grid borders, the center cell is excluded,
    and nodata neighbours are skipped, so every distance d satisfies
    1 <= d <= radius * sqrt(2).
    """
    if not (0 <= center.row < grid.nrows and 0 <= center.col < grid.ncols):
        raise NightlightsError(
            f"window center {center.row},{center.col} outside grid {grid.nrows}x{grid.ncols}"
        )
    r = window.radius
    out: list[tuple[PixelCoord, float, float]] = []
    for row in range(max(0, center.row - r), min(grid.nrows, center.row + r + 1)):
        for col in range(max(0, center.col - r), min(grid.ncols, center.col + r + 1)):
            if row == center.row and col == center.col:
                continue
            value = grid.values[row, col]
            if value == grid.nodata:
                continue
            dist = math.hypot(row - center.row, col - center.col)
            out.append((PixelCoord(row, col), float(value), dist))
    return out
