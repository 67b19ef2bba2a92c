"""Self-organizing map: normalization, training, and map statistics.

A rectangular lattice of nodes, each holding a pointer vector in the unit
hypercube, is fitted to a set of feature vectors.  Every training step pulls
all pointers toward one sample, weighted by a Gaussian over lattice distance
to the best-matching unit.  After training, the lattice supports distance
(U-matrix) and per-feature (component plane) views, plus item placement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

DEFAULT_ROWS = 16
DEFAULT_COLS = 16


@dataclass(frozen=True, eq=False)
class Item:
    """One data point: identifier, style label, and raw feature vector."""

    id: str
    label: str
    features: FloatArray

    def __post_init__(self) -> None:
        vec = np.asarray(self.features, dtype=np.float64)
        if vec.ndim != 1 or vec.size == 0:
            raise ValueError(f"item {self.id!r}: features must be a non-empty 1-D vector")
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"item {self.id!r}: features contain non-finite values")
        vec.setflags(write=False)
        object.__setattr__(self, "features", vec)

    @property
    def dim(self) -> int:
        return int(self.features.size)


@dataclass(frozen=True)
class GridShape:
    """Lattice extent in nodes."""

    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 2 or self.cols < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.rows}x{self.cols}")

    @property
    def n_nodes(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Per-feature min/max scaler onto [0, 1].

    Degenerate features (min equals max) map to 0.5.  Values outside the
    fitted range, as can happen for items added after fitting, are clamped.
    """

    minimum: FloatArray
    maximum: FloatArray

    def __post_init__(self) -> None:
        lo = np.asarray(self.minimum, dtype=np.float64)
        hi = np.asarray(self.maximum, dtype=np.float64)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise ValueError("normalizer bounds must be 1-D vectors of equal, non-zero length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("normalizer bounds contain non-finite values")
        if np.any(lo > hi):
            raise ValueError("normalizer minimum exceeds maximum")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)

    @property
    def dim(self) -> int:
        return int(self.minimum.size)

    def transform(self, values: FloatArray) -> FloatArray:
        """Scale one raw vector into the unit hypercube."""
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} features, got shape {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise ValueError("cannot normalize non-finite values")
        span = self.maximum - self.minimum
        flat = span == 0.0
        safe = np.where(flat, 1.0, span)
        out = (vec - self.minimum) / safe
        out[flat] = 0.5
        return np.clip(out, 0.0, 1.0)

    def transform_many(self, items: list[Item]) -> FloatArray:
        """Normalize a list of items into an (n, dim) matrix, preserving order."""
        return np.stack([self.transform(item.features) for item in items])


def check_items(items: list[Item]) -> int:
    """Validate a dataset: non-empty, uniform dimensionality, unique ids.

    Returns the shared feature dimensionality.
    """
    if not items:
        raise ValueError("item list is empty")
    dim = items[0].dim
    for item in items:
        if item.dim != dim:
            raise ValueError(
                f"item {item.id!r} has {item.dim} features, expected {dim}"
            )
    seen: set[str] = set()
    for item in items:
        if item.id in seen:
            raise ValueError(f"duplicate item id {item.id!r}")
        seen.add(item.id)
    return dim


def fit_normalizer(items: list[Item]) -> Normalizer:
    """Fit per-feature min/max bounds over a dataset."""
    check_items(items)
    stacked = np.stack([item.features for item in items])
    return Normalizer(minimum=stacked.min(axis=0), maximum=stacked.max(axis=0))


@dataclass(frozen=True)
class TrainingConfig:
    """Round count, linear coefficient schedules, and the seed.

    ``sigma_start`` defaults to half the larger lattice extent and is filled
    in by :meth:`with_defaults` once the grid shape is known.
    """

    rounds: int = 2000
    alpha_start: float = 0.5
    alpha_end: float = 0.01
    sigma_start: float | None = None
    sigma_end: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if not (0.0 < self.alpha_end <= self.alpha_start <= 1.0):
            raise ValueError(
                "learning rate must satisfy 0 < alpha_end <= alpha_start <= 1, "
                f"got {self.alpha_start} -> {self.alpha_end}"
            )
        if self.sigma_start is not None and self.sigma_start < self.sigma_end:
            raise ValueError("sigma_start must be >= sigma_end")
        if self.sigma_end <= 0.0:
            raise ValueError("sigma_end must be positive")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")

    def with_defaults(self, shape: GridShape) -> "TrainingConfig":
        """Resolve the radius default against a concrete lattice shape."""
        if self.sigma_start is not None:
            return self
        return replace(self, sigma_start=max(shape.rows, shape.cols) / 2.0)


@dataclass(frozen=True, eq=False)
class SomGrid:
    """An immutable lattice of pointer vectors.

    Pointers are stored row-major as an (rows * cols, dim) matrix; node k
    sits at lattice position (k // cols, k % cols).
    """

    shape: GridShape
    dim: int
    pointers: FloatArray

    def __post_init__(self) -> None:
        pts = np.asarray(self.pointers, dtype=np.float64)
        if pts.shape != (self.shape.n_nodes, self.dim):
            raise ValueError(
                f"pointer matrix shape {pts.shape} does not match "
                f"{self.shape.rows}x{self.shape.cols} grid of dim {self.dim}"
            )
        if not np.all(np.isfinite(pts)):
            raise ValueError("pointers contain non-finite values")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("pointers must lie in the unit hypercube")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "pointers", pts)

    def node_coords(self, index: int) -> tuple[int, int]:
        """Lattice (row, col) of a row-major node index."""
        if not 0 <= index < self.shape.n_nodes:
            raise ValueError(f"node index {index} out of range")
        return divmod(index, self.shape.cols)

    def pointer_grid(self) -> FloatArray:
        """Read-only (rows, cols, dim) view of the pointer matrix."""
        return self.pointers.reshape(self.shape.rows, self.shape.cols, self.dim)


def lattice_coords(shape: GridShape) -> FloatArray:
    """Row-major (n_nodes, 2) array of lattice (row, col) positions."""
    rows = np.repeat(np.arange(shape.rows, dtype=np.float64), shape.cols)
    cols = np.tile(np.arange(shape.cols, dtype=np.float64), shape.rows)
    return np.column_stack([rows, cols])


def init_grid(
    shape: GridShape, dim: int, seed: int | np.random.Generator
) -> SomGrid:
    """Draw initial pointers uniformly from the unit hypercube.

    Accepts either a seed or a live generator so a caller can share one
    generator between initialization and training.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return SomGrid(shape=shape, dim=dim, pointers=rng.random((shape.n_nodes, dim)))


def find_bmu(grid: SomGrid, x: FloatArray) -> int:
    """Row-major index of the node whose pointer is Euclidean-nearest to x.

    Ties resolve to the smallest row-major index.
    """
    vec = np.asarray(x, dtype=np.float64)
    if vec.shape != (grid.dim,):
        raise ValueError(f"expected a vector of dim {grid.dim}, got shape {vec.shape}")
    diff = grid.pointers - vec
    # argmin returns the first minimum, which is the row-major-least node
    return int(np.argmin(np.einsum("nd,nd->n", diff, diff)))


def schedule(round_index: int, config: TrainingConfig) -> tuple[float, float]:
    """Learning rate and neighborhood radius for one round.

    Both move linearly from their start to end values; a single-round
    schedule stays at the start values.
    """
    if config.sigma_start is None:
        raise ValueError("config radius unresolved; call with_defaults(shape) first")
    if not 0 <= round_index < config.rounds:
        raise ValueError(f"round {round_index} outside 0..{config.rounds - 1}")
    if config.rounds == 1:
        return config.alpha_start, config.sigma_start
    frac = round_index / (config.rounds - 1)
    # lerp as a two-product sum so both endpoints are hit exactly
    alpha = config.alpha_start * (1.0 - frac) + config.alpha_end * frac
    sigma = config.sigma_start * (1.0 - frac) + config.sigma_end * frac
    return alpha, sigma


def neighborhood(coords: FloatArray, bmu: int, sigma: float) -> FloatArray:
    """Gaussian weight per node: exp(-d^2 / (2 sigma^2)) over lattice distance."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    delta = coords - coords[bmu]
    d2 = np.einsum("nd,nd->n", delta, delta)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def train_step(
    pointers: FloatArray, coords: FloatArray, x: FloatArray, alpha: float, sigma: float
) -> int:
    """One sample presentation, updating every pointer in place.

    Each pointer moves toward the sample by alpha times its neighborhood
    weight relative to the best-matching unit.  Returns the BMU index.
    """
    diff = pointers - x
    bmu = int(np.argmin(np.einsum("nd,nd->n", diff, diff)))
    weights = neighborhood(coords, bmu, sigma)
    pointers -= (alpha * weights)[:, np.newaxis] * diff
    # the update is a convex mix of pointer and sample; clip guards the
    # last-ulp rounding case so containment in [0, 1] is unconditional
    np.clip(pointers, 0.0, 1.0, out=pointers)
    return bmu


def train(
    grid: SomGrid,
    items: list[Item],
    config: TrainingConfig,
    normalizer: Normalizer,
    rng: np.random.Generator | None = None,
) -> SomGrid:
    """Run the full training schedule and return the trained grid.

    Every round visits all items once in a freshly shuffled order; each
    visit runs one :func:`train_step` with that round's coefficients.  When
    ``rng`` is omitted a generator is seeded from ``config.seed``; passing
    one instead lets initialization and shuffling share a single stream.
    """
    dim = check_items(items)
    if dim != grid.dim:
        raise ValueError(f"items have dim {dim}, grid has dim {grid.dim}")
    if normalizer.dim != grid.dim:
        raise ValueError("normalizer dimensionality does not match grid")
    cfg = config.with_defaults(grid.shape)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    data = normalizer.transform_many(items)
    pointers = grid.pointers.copy()
    coords = lattice_coords(grid.shape)
    for round_index in range(cfg.rounds):
        alpha, sigma = schedule(round_index, cfg)
        for item_index in rng.permutation(len(items)):
            train_step(pointers, coords, data[item_index], alpha, sigma)
    return SomGrid(shape=grid.shape, dim=grid.dim, pointers=pointers)


def quantization_error(grid: SomGrid, data: FloatArray) -> float:
    """Mean Euclidean distance from each normalized sample to its BMU pointer."""
    mat = np.asarray(data, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] != grid.dim or mat.shape[0] == 0:
        raise ValueError(f"expected a non-empty (n, {grid.dim}) matrix, got {mat.shape}")
    total = 0.0
    for row in mat:
        bmu = find_bmu(grid, row)
        total += float(np.linalg.norm(grid.pointers[bmu] - row))
    return total / mat.shape[0]


def place_items(
    grid: SomGrid, items: list[Item], normalizer: Normalizer
) -> dict[str, tuple[int, int]]:
    """Map each item id to the lattice (row, col) of its best-matching unit."""
    check_items(items)
    placement: dict[str, tuple[int, int]] = {}
    for item in items:
        bmu = find_bmu(grid, normalizer.transform(item.features))
        placement[item.id] = grid.node_coords(bmu)
    return placement


# offsets of the 8-connected lattice neighborhood
_NEIGHBOR_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)


def u_matrix(grid: SomGrid) -> FloatArray:
    """Mean pointer distance from each node to its existing 8-neighbors.

    Corner nodes average 3 terms, edge nodes 5, interior nodes 8.
    """
    pts = grid.pointer_grid()
    rows, cols = grid.shape.rows, grid.shape.cols
    total = np.zeros((rows, cols))
    count = np.zeros((rows, cols))
    for dr, dc in _NEIGHBOR_OFFSETS:
        r0, r1 = max(0, -dr), min(rows, rows - dr)
        c0, c1 = max(0, -dc), min(cols, cols - dc)
        here = pts[r0:r1, c0:c1]
        there = pts[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
        dist = np.sqrt(((here - there) ** 2).sum(axis=2))
        total[r0:r1, c0:c1] += dist
        count[r0:r1, c0:c1] += 1.0
    return total / count


def component_plane(grid: SomGrid, feature: int) -> FloatArray:
    """The (rows, cols) plane of one raw pointer component."""
    if not 0 <= feature < grid.dim:
        raise ValueError(f"feature index {feature} outside 0..{grid.dim - 1}")
    return grid.pointer_grid()[:, :, feature].copy()


@dataclass(frozen=True, eq=False)
class SomFit:
    """A trained map together with everything derived from it."""

    grid: SomGrid
    normalizer: Normalizer
    config: TrainingConfig
    placement: dict[str, tuple[int, int]]
    umatrix: FloatArray
    items: list[Item]


def fit_som(
    items: list[Item],
    shape: GridShape = GridShape(DEFAULT_ROWS, DEFAULT_COLS),
    config: TrainingConfig = TrainingConfig(),
) -> SomFit:
    """Normalize, initialize, train, and place in one deterministic pass.

    A single generator seeded from the config drives the whole run: pointer
    initialization consumes it first, then one shuffle per round.  Repeating
    the call with identical inputs reproduces the fit exactly.
    """
    dim = check_items(items)
    cfg = config.with_defaults(shape)
    normalizer = fit_normalizer(items)
    rng = np.random.default_rng(cfg.seed)
    grid = init_grid(shape, dim, rng)
    trained = train(grid, items, cfg, normalizer, rng=rng)
    return SomFit(
        grid=trained,
        normalizer=normalizer,
        config=cfg,
        placement=place_items(trained, items, normalizer),
        umatrix=u_matrix(trained),
        items=list(items),
    )
