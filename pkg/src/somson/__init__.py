"""Self-organizing maps with psychoacoustic sonification.

Train a map over labeled feature vectors, explore it as U-matrix and
component-plane images, and render any lattice node or parameter vector
to sound.
"""

from somson.audio import AudioBlock, pan_gains, read_wav, write_wav
from somson.bundle import (
    BundleError,
    FeatureFileError,
    FeatureSet,
    MapBundle,
    build_bundle,
    export_bundle,
    import_bundle,
    load_features,
)
from somson.images import ImageGrid, render_component_image, render_umatrix_image
from somson.noise import noise_block, noise_mono, spectral_slope_db
from somson.som import (
    GridShape,
    Item,
    Normalizer,
    SomFit,
    SomGrid,
    TrainingConfig,
    component_plane,
    find_bmu,
    fit_normalizer,
    fit_som,
    init_grid,
    place_items,
    quantization_error,
    schedule,
    train,
    u_matrix,
)
from somson.sonify import (
    LiveSession,
    ModMatrix,
    SonifierParams,
    apply_mod_matrix,
    carrier_frequencies,
    master_gain,
    modulation_index,
    partial_amplitudes,
    render_wav,
    synthesize,
    tremolo_frequency,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBlock",
    "BundleError",
    "FeatureFileError",
    "FeatureSet",
    "GridShape",
    "ImageGrid",
    "Item",
    "LiveSession",
    "MapBundle",
    "ModMatrix",
    "Normalizer",
    "SomFit",
    "SomGrid",
    "SonifierParams",
    "TrainingConfig",
    "apply_mod_matrix",
    "build_bundle",
    "carrier_frequencies",
    "component_plane",
    "export_bundle",
    "find_bmu",
    "fit_normalizer",
    "fit_som",
    "import_bundle",
    "init_grid",
    "load_features",
    "master_gain",
    "modulation_index",
    "noise_block",
    "noise_mono",
    "pan_gains",
    "partial_amplitudes",
    "place_items",
    "quantization_error",
    "read_wav",
    "render_component_image",
    "render_umatrix_image",
    "render_wav",
    "schedule",
    "spectral_slope_db",
    "synthesize",
    "train",
    "tremolo_frequency",
    "u_matrix",
    "write_wav",
    "__version__",
]
