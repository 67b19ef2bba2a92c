"""Map views rendered as PNG images.

The U-matrix view spans black (most similar) to white at the map's own
maximum; component planes run through the frozen dark-blue-to-yellow
table.  Items can be overlaid as filled dots at their cell centers, one
color per label.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from PIL import Image, ImageColor, ImageDraw

from .colormap import COLORMAP
from .fileio import atomic_write_bytes
from .som import FloatArray

DEFAULT_CELL_SIZE = 24
DOT_RADIUS_FRACTION = 0.3

# fallback colors for labels that are not themselves color names, assigned
# in order of first appearance
FALLBACK_PALETTE = (
    (214, 39, 40),
    (44, 160, 44),
    (31, 119, 180),
    (255, 127, 14),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (23, 190, 207),
)

# one mark per item: lattice row, lattice col, label text
Mark = tuple[int, int, str]


@dataclass(frozen=True, eq=False)
class ImageGrid:
    """Rendered cell raster: (height, width, 3) uint8 pixels."""

    pixels: np.ndarray
    cell: int

    def __post_init__(self) -> None:
        pix = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if pix.ndim != 3 or pix.shape[2] != 3:
            raise ValueError("pixels must be an (height, width, 3) array")
        if self.cell < 1:
            raise ValueError("cell size must be positive")
        if pix.shape[0] % self.cell or pix.shape[1] % self.cell:
            raise ValueError("image dimensions must be whole multiples of the cell size")
        pix.setflags(write=False)
        object.__setattr__(self, "pixels", pix)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def to_png_bytes(self) -> bytes:
        buffer = io.BytesIO()
        Image.fromarray(np.asarray(self.pixels), mode="RGB").save(buffer, format="PNG")
        return buffer.getvalue()

    def save(self, path: str) -> None:
        atomic_write_bytes(path, self.to_png_bytes())


def label_colors(labels: Iterable[str]) -> dict[str, tuple[int, int, int]]:
    """Deterministic label-to-color assignment.

    Labels that parse as color names or hex codes keep that color; the
    rest draw from a fixed palette in order of first appearance.
    """
    colors: dict[str, tuple[int, int, int]] = {}
    next_fallback = 0
    for label in labels:
        if label in colors:
            continue
        try:
            colors[label] = ImageColor.getrgb(label)[:3]
        except ValueError:
            colors[label] = FALLBACK_PALETTE[next_fallback % len(FALLBACK_PALETTE)]
            next_fallback += 1
    return colors


def _validate_matrix(values: FloatArray, name: str) -> FloatArray:
    matrix = np.asarray(values, dtype=np.float64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{name} contains non-finite values")
    return matrix


def _paint_cells(colors: np.ndarray, cell: int) -> np.ndarray:
    """Expand an (rows, cols, 3) color matrix into a pixel raster."""
    return np.repeat(np.repeat(colors, cell, axis=0), cell, axis=1)


def _draw_marks(pixels: np.ndarray, marks: Sequence[Mark], cell: int, rows: int, cols: int):
    colors = label_colors(label for _, _, label in marks)
    image = Image.fromarray(pixels, mode="RGB")
    draw = ImageDraw.Draw(image)
    radius = DOT_RADIUS_FRACTION * cell
    for row, col, label in marks:
        if not (0 <= row < rows and 0 <= col < cols):
            raise ValueError(f"mark at ({row}, {col}) outside {rows}x{cols} lattice")
        cx = (col + 0.5) * cell
        cy = (row + 0.5) * cell
        box = (cx - radius, cy - radius, cx + radius, cy + radius)
        draw.ellipse(box, fill=colors[label])
    return np.asarray(image)


def render_umatrix_image(
    umatrix: FloatArray,
    marks: Sequence[Mark] | None = None,
    cell: int = DEFAULT_CELL_SIZE,
) -> ImageGrid:
    """Grayscale distance view: 0 is black, the map's maximum is white.

    A uniform map (including all zeros) renders all black.
    """
    matrix = _validate_matrix(umatrix, "umatrix")
    if matrix.min() < 0.0:
        raise ValueError("umatrix contains negative values")
    rows, cols = matrix.shape
    peak = float(matrix.max())
    levels = np.zeros_like(matrix) if peak == 0.0 else matrix / peak
    gray = np.floor(levels * 255.0 + 0.5).astype(np.uint8)
    colors = np.repeat(gray[:, :, None], 3, axis=2)
    pixels = _paint_cells(colors, cell)
    if marks:
        pixels = _draw_marks(pixels, marks, cell, rows, cols)
    return ImageGrid(pixels=pixels, cell=cell)


def render_component_image(
    plane: FloatArray,
    marks: Sequence[Mark] | None = None,
    cell: int = DEFAULT_CELL_SIZE,
) -> ImageGrid:
    """Component-plane view through the dark-blue-to-yellow table."""
    matrix = _validate_matrix(plane, "component plane")
    if matrix.min() < 0.0 or matrix.max() > 1.0:
        raise ValueError("component plane values must lie in [0, 1]")
    rows, cols = matrix.shape
    table = np.asarray(COLORMAP, dtype=np.uint8)
    index = np.floor(matrix * 255.0 + 0.5).astype(np.intp)
    colors = table[index]
    pixels = _paint_cells(colors, cell)
    if marks:
        pixels = _draw_marks(pixels, marks, cell, rows, cols)
    return ImageGrid(pixels=pixels, cell=cell)
