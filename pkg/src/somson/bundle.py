"""Feature-file ingestion and the versioned map-bundle document.

A bundle is a single JSON file carrying everything a viewer needs: the
trained pointer lattice, the normalizer, the item placements, the U-matrix,
and an echo of the training configuration.  Serialization is canonical
(fixed key order, full-precision floats), so equal bundles are equal bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .fileio import atomic_write_bytes
from .som import (
    FloatArray,
    GridShape,
    Item,
    Normalizer,
    SomGrid,
    TrainingConfig,
    find_bmu,
    u_matrix,
)

BUNDLE_VERSION = "1"

# recomputing the U-matrix from the stored pointers must agree with the
# stored U-matrix to this tolerance for the bundle to be accepted
UMATRIX_CHECK_TOLERANCE = 1e-9


class FeatureFileError(ValueError):
    """A feature file violates the expected tabular layout."""


class BundleError(ValueError):
    """A bundle document is malformed or internally inconsistent."""


# ------------------------------------------------------------ feature files


@dataclass(frozen=True)
class FeatureSet:
    """Parsed feature file: header names plus the item rows."""

    feature_names: tuple[str, ...]
    items: tuple[Item, ...]

    @property
    def dim(self) -> int:
        return len(self.feature_names)


def load_features(path: str) -> FeatureSet:
    """Read a comma-separated feature table.

    Layout: header ``id,label,<name>,...`` followed by one row per item.
    Every problem is reported with its line number.
    """
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise FeatureFileError(f"{path}: empty file, expected a header row")
    header = rows[0]
    if len(header) < 3 or header[0] != "id" or header[1] != "label":
        raise FeatureFileError(
            f"{path}:1: header must be 'id,label,<feature names...>', got {header!r}"
        )
    names = tuple(header[2:])
    if len(set(names)) != len(names):
        raise FeatureFileError(f"{path}:1: duplicate feature names in header")

    items: list[Item] = []
    seen: dict[str, int] = {}
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            continue  # blank line
        if len(row) != len(header):
            raise FeatureFileError(
                f"{path}:{line}: expected {len(header)} cells, got {len(row)}"
            )
        item_id, label = row[0], row[1]
        if item_id in seen:
            raise FeatureFileError(
                f"{path}:{line}: duplicate id {item_id!r} (first seen on line {seen[item_id]})"
            )
        seen[item_id] = line
        values = []
        for name, cell in zip(names, row[2:]):
            try:
                values.append(float(cell))
            except ValueError:
                raise FeatureFileError(
                    f"{path}:{line}: feature {name!r} is not numeric: {cell!r}"
                ) from None
        items.append(Item(id=item_id, label=label, features=np.array(values)))
    if not items:
        raise FeatureFileError(f"{path}: no data rows after the header")
    return FeatureSet(feature_names=names, items=tuple(items))


# ----------------------------------------------------------------- bundles


@dataclass(frozen=True, eq=False)
class BundleItem:
    """One placed item as stored in a bundle."""

    id: str
    label: str
    features: FloatArray
    normalized: FloatArray
    bmu: int

    def __post_init__(self) -> None:
        for field in ("features", "normalized"):
            vec = np.asarray(getattr(self, field), dtype=np.float64)
            if vec.ndim != 1 or vec.size == 0 or not np.all(np.isfinite(vec)):
                raise BundleError(f"item {self.id!r}: bad {field} vector")
            vec.setflags(write=False)
            object.__setattr__(self, field, vec)


@dataclass(frozen=True, eq=False)
class MapBundle:
    """A trained map with its companions, checked for internal consistency."""

    grid: SomGrid
    feature_names: tuple[str, ...]
    normalizer: Normalizer
    items: tuple[BundleItem, ...]
    umatrix: FloatArray
    config: TrainingConfig
    version: str = BUNDLE_VERSION

    def __post_init__(self) -> None:
        if len(self.feature_names) != self.grid.dim:
            raise BundleError(
                f"feature_names: {len(self.feature_names)} names for dim {self.grid.dim}"
            )
        if self.normalizer.minimum.size != self.grid.dim:
            raise BundleError("normalizer: bounds length does not match dim")
        if self.config.sigma_start is None:
            raise BundleError("training: sigma_start unresolved")
        shape = self.grid.shape
        for item in self.items:
            if item.features.size != self.grid.dim or item.normalized.size != self.grid.dim:
                raise BundleError(f"items: {item.id!r} vector length does not match dim")
            if not 0 <= item.bmu < shape.n_nodes:
                raise BundleError(
                    f"items: {item.id!r} bmu {item.bmu} outside 0..{shape.n_nodes - 1}"
                )
        stored = np.asarray(self.umatrix, dtype=np.float64)
        if stored.shape != (shape.rows, shape.cols):
            raise BundleError(
                f"umatrix: shape {stored.shape} does not match {shape.rows}x{shape.cols}"
            )
        recomputed = u_matrix(self.grid)
        drift = float(np.max(np.abs(stored - recomputed))) if stored.size else 0.0
        if drift > UMATRIX_CHECK_TOLERANCE:
            raise BundleError(
                f"umatrix: stored values disagree with pointers (max diff {drift:.3e})"
            )
        stored = stored.copy()
        stored.setflags(write=False)
        object.__setattr__(self, "umatrix", stored)

    def placement(self) -> dict[str, tuple[int, int]]:
        """Item id to lattice (row, col)."""
        return {item.id: self.grid.node_coords(item.bmu) for item in self.items}

    def to_document(self) -> dict:
        """Plain-data form with a fixed key order."""
        cfg = self.config
        return {
            "version": self.version,
            "shape": {"rows": self.grid.shape.rows, "cols": self.grid.shape.cols},
            "feature_names": list(self.feature_names),
            "normalizer": {
                "minimum": self.normalizer.minimum.tolist(),
                "maximum": self.normalizer.maximum.tolist(),
            },
            "pointers": self.grid.pointers.tolist(),
            "umatrix": self.umatrix.tolist(),
            "items": [
                {
                    "id": item.id,
                    "label": item.label,
                    "features": item.features.tolist(),
                    "normalized": item.normalized.tolist(),
                    "bmu": item.bmu,
                }
                for item in self.items
            ],
            "training": {
                "rounds": cfg.rounds,
                "alpha_start": cfg.alpha_start,
                "alpha_end": cfg.alpha_end,
                "sigma_start": cfg.sigma_start,
                "sigma_end": cfg.sigma_end,
                "seed": cfg.seed,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2, ensure_ascii=False) + "\n"

    def save(self, path: str) -> None:
        atomic_write_bytes(path, self.to_json().encode("utf-8"))


def build_bundle(
    grid: SomGrid,
    features: FeatureSet,
    normalizer: Normalizer,
    config: TrainingConfig,
) -> MapBundle:
    """Assemble a bundle from a trained grid and its companions.

    Placements and the U-matrix are computed here, so the stored document
    is consistent by construction.
    """
    placed = tuple(
        BundleItem(
            id=item.id,
            label=item.label,
            features=item.features,
            normalized=(norm := normalizer.transform(item.features)),
            bmu=find_bmu(grid, norm),
        )
        for item in features.items
    )
    return MapBundle(
        grid=grid,
        feature_names=features.feature_names,
        normalizer=normalizer,
        items=placed,
        umatrix=u_matrix(grid),
        config=config.with_defaults(grid.shape),
    )


def export_bundle(
    grid: SomGrid,
    features: FeatureSet,
    normalizer: Normalizer,
    config: TrainingConfig,
    path: str,
) -> MapBundle:
    """Build a bundle and write it as canonical JSON."""
    bundle = build_bundle(grid, features, normalizer, config)
    bundle.save(path)
    return bundle


def _require(doc: dict, key: str, kind, where: str = "bundle"):
    if key not in doc:
        raise BundleError(f"{where}: missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise BundleError(f"{where}: field {key!r} must be {names}")
    return value


def _float_matrix(raw, field: str) -> FloatArray:
    try:
        matrix = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError):
        raise BundleError(f"{field}: not a numeric matrix") from None
    if matrix.ndim != 2:
        raise BundleError(f"{field}: expected a 2-D matrix")
    return matrix


def bundle_from_document(doc: dict) -> MapBundle:
    """Validate a parsed document and build the bundle.

    Unknown fields are ignored so long as the major version matches.
    """
    if not isinstance(doc, dict):
        raise BundleError("bundle: document is not an object")
    version = _require(doc, "version", str)
    major = version.split(".", 1)[0]
    if major != BUNDLE_VERSION:
        raise BundleError(
            f"version: {version!r} not supported (expected major {BUNDLE_VERSION})"
        )

    shape_doc = _require(doc, "shape", dict)
    rows = _require(shape_doc, "rows", int, "shape")
    cols = _require(shape_doc, "cols", int, "shape")
    names = _require(doc, "feature_names", list)
    if not names or not all(isinstance(n, str) for n in names):
        raise BundleError("feature_names: expected a non-empty list of strings")

    norm_doc = _require(doc, "normalizer", dict)
    pointers = _float_matrix(_require(doc, "pointers", list), "pointers")
    umatrix = _float_matrix(_require(doc, "umatrix", list), "umatrix")
    training = _require(doc, "training", dict)

    items = []
    for k, item_doc in enumerate(_require(doc, "items", list)):
        if not isinstance(item_doc, dict):
            raise BundleError(f"items[{k}]: not an object")
        where = f"items[{k}]"
        items.append(
            BundleItem(
                id=_require(item_doc, "id", str, where),
                label=_require(item_doc, "label", str, where),
                features=np.asarray(_require(item_doc, "features", list, where)),
                normalized=np.asarray(_require(item_doc, "normalized", list, where)),
                bmu=_require(item_doc, "bmu", int, where),
            )
        )

    try:
        shape = GridShape(rows=rows, cols=cols)
        grid = SomGrid(shape=shape, dim=len(names), pointers=pointers)
        normalizer = Normalizer(
            minimum=np.asarray(_require(norm_doc, "minimum", list, "normalizer")),
            maximum=np.asarray(_require(norm_doc, "maximum", list, "normalizer")),
        )
        config = TrainingConfig(
            rounds=_require(training, "rounds", int, "training"),
            alpha_start=float(_require(training, "alpha_start", (int, float), "training")),
            alpha_end=float(_require(training, "alpha_end", (int, float), "training")),
            sigma_start=float(_require(training, "sigma_start", (int, float), "training")),
            sigma_end=float(_require(training, "sigma_end", (int, float), "training")),
            seed=_require(training, "seed", int, "training"),
        )
    except BundleError:
        raise
    except ValueError as exc:
        raise BundleError(str(exc)) from exc

    return MapBundle(
        grid=grid,
        feature_names=tuple(names),
        normalizer=normalizer,
        items=tuple(items),
        umatrix=umatrix,
        config=config,
        version=version,
    )


def import_bundle(path: str) -> MapBundle:
    """Read and validate a bundle file."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"{path}: not valid JSON: {exc}") from exc
    return bundle_from_document(doc)
