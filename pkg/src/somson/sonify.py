"""Psychoacoustic parameter-mapping synthesis.

The tone is a Shepard-style complex of nine octave-spaced partials under a
Gaussian spectral envelope, frequency-modulated by one shared low-frequency
modulator.  Four normalized inputs steer it:

* ``chroma``       shifts all partials together, up to four semitones
* ``roughness``    deepens the shared frequency modulation
* ``sharpness``    slides the spectral envelope toward brighter partials
* ``fluctuation``  speeds up a slow loudness tremolo, 0 to 8 Hz

Three optional inputs extend the display with a colored-noise stream and
stereo placement: ``noise_color``, ``noise_pan``, ``tone_pan``.

Everything renders as a pure function of absolute time, so consecutive
blocks concatenate bit-exactly and live retargeting stays phase-continuous.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from somson.audio import (
    DEFAULT_SAMPLE_RATE,
    MIN_SAMPLE_RATE,
    AudioBlock,
    pan_gains,
    write_wav,
)
from somson.noise import noise_mono

FloatArray = NDArray[np.float64]

# Fixed voice constants.  These define the instrument itself and are not
# configurable anywhere downstream.
PARTIAL_COUNT = 9
BASE_FREQUENCY_HZ = 25.0
CHROMA_SPAN_SEMITONES = 4.0
FM_FREQUENCY_HZ = 30.0
FM_INDEX_CURVE_WEIGHT = 0.4
FM_INDEX_BASE = 5.0
FM_INDEX_EXPONENT = 2.8
FM_INDEX_LINEAR_WEIGHT = 0.6
ENVELOPE_STEEPNESS = 6.66
ENVELOPE_OCTAVE_RANGE = 9.0
ENVELOPE_CENTER_BASE = 0.5
ENVELOPE_CENTER_SPAN = 0.24
TREMOLO_MAX_HZ = 8.0

# Headroom applied when the tone and noise streams are mixed to stereo.
EXTENDED_MIX_GAIN = 0.5

CORE_SLOTS = ("chroma", "roughness", "sharpness", "fluctuation")
EXTENDED_SLOTS = CORE_SLOTS + ("noise_color", "noise_pan", "tone_pan")


def _check_unit(value: float, name: str) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or not math.isfinite(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class SonifierParams:
    """Normalized control vector: four core inputs, three optional extras.

    The extended trio must be given together or not at all.
    """

    chroma: float
    roughness: float
    sharpness: float
    fluctuation: float
    noise_color: float | None = None
    noise_pan: float | None = None
    tone_pan: float | None = None

    def __post_init__(self) -> None:
        for name in CORE_SLOTS:
            object.__setattr__(self, name, _check_unit(getattr(self, name), name))
        extras = [self.noise_color, self.noise_pan, self.tone_pan]
        given = [v for v in extras if v is not None]
        if given and len(given) != 3:
            raise ValueError("noise_color, noise_pan, and tone_pan must be set together")
        for name in EXTENDED_SLOTS[4:]:
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _check_unit(value, name))

    @property
    def extended(self) -> bool:
        return self.noise_color is not None

    def core_vector(self) -> FloatArray:
        return np.array([self.chroma, self.roughness, self.sharpness, self.fluctuation])

    def to_vector(self) -> FloatArray:
        if self.extended:
            return np.array([getattr(self, name) for name in EXTENDED_SLOTS])
        return self.core_vector()

    @classmethod
    def from_vector(cls, values: Iterable[float]) -> "SonifierParams":
        vec = [float(v) for v in values]
        if len(vec) == 4:
            return cls(*vec)
        if len(vec) == 7:
            return cls(*vec)
        raise ValueError(f"expected 4 or 7 parameters, got {len(vec)}")


# ------------------------------------------------------------- the mapping


def carrier_frequencies(chroma: float) -> FloatArray:
    """Nine partial frequencies in Hz, spaced exactly one octave apart.

    ``chroma`` shifts the whole stack by up to four semitones; at 0 the
    partials sit at 25 * 2^i for i = 0..8.
    """
    chroma = _check_unit(chroma, "chroma")
    shift = np.exp2(CHROMA_SPAN_SEMITONES * chroma / 12.0)
    # one shared shift factor times exact powers of two keeps the octave
    # ratio between adjacent partials exactly 2.0 in floating point
    return BASE_FREQUENCY_HZ * np.exp2(np.arange(PARTIAL_COUNT, dtype=np.float64)) * shift


def modulation_index(roughness: float) -> float:
    """Depth of the shared 30 Hz frequency modulation.

    Grows from 0.4 at rest to 5^2.8 at full roughness, blending an
    exponential curve with a linear ramp.
    """
    roughness = _check_unit(roughness, "roughness")
    ceiling = FM_INDEX_BASE**FM_INDEX_EXPONENT
    curved = FM_INDEX_CURVE_WEIGHT * FM_INDEX_BASE ** (FM_INDEX_EXPONENT * roughness)
    linear = FM_INDEX_LINEAR_WEIGHT * roughness * ceiling
    return curved + linear


def partial_amplitudes(frequencies: FloatArray, sharpness: float) -> FloatArray:
    """Gaussian spectral envelope over log2 frequency.

    The envelope center sits at a fraction 0.5 + 0.24 * sharpness of a
    nine-octave log range, so raising sharpness favors higher partials.
    """
    sharpness = _check_unit(sharpness, "sharpness")
    freqs = np.asarray(frequencies, dtype=np.float64)
    if freqs.size == 0 or np.any(freqs <= 0.0):
        raise ValueError("frequencies must be positive")
    center = ENVELOPE_CENTER_BASE + ENVELOPE_CENTER_SPAN * sharpness
    deviation = ENVELOPE_STEEPNESS * (np.log2(freqs) / ENVELOPE_OCTAVE_RANGE - center)
    return np.exp(-0.5 * deviation**2)


def tremolo_frequency(fluctuation: float) -> float:
    """Loudness-fluctuation rate in Hz, 0 to 8."""
    return TREMOLO_MAX_HZ * _check_unit(fluctuation, "fluctuation")


def master_gain(amplitudes: FloatArray) -> float:
    """Output scale 1 / (2 * max(1, sum of partial amplitudes)).

    The tremolo factor peaks at 2, so this bounds every sample to [-1, 1]
    regardless of the parameter vector.
    """
    return 1.0 / (2.0 * max(1.0, float(np.sum(amplitudes))))


def synthesize(
    params: SonifierParams, t0: float, n: int, rate: int = DEFAULT_SAMPLE_RATE
) -> AudioBlock:
    """Render ``n`` mono tone samples starting at time ``t0``.

    ``t0`` is quantized to the sample grid, and every sample is evaluated
    at its absolute time, so rendering one long block or many consecutive
    short ones produces bit-identical output.
    """
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    if rate < MIN_SAMPLE_RATE:
        raise ValueError(f"sample rate must be >= {MIN_SAMPLE_RATE}, got {rate}")
    if not math.isfinite(t0) or t0 < 0.0:
        raise ValueError(f"start time must be finite and >= 0, got {t0}")
    start = round(t0 * rate)
    t = (start + np.arange(n, dtype=np.float64)) / rate

    freqs = carrier_frequencies(params.chroma)
    amps = partial_amplitudes(freqs, params.sharpness)
    fm_depth = modulation_index(params.roughness)
    tremolo_hz = tremolo_frequency(params.fluctuation)

    two_pi = 2.0 * math.pi
    shared_phase = fm_depth * np.sin(two_pi * FM_FREQUENCY_HZ * t)
    tone = np.zeros(n)
    for amp, freq in zip(amps, freqs):
        tone += amp * np.sin(two_pi * freq * t + shared_phase)
    tremolo = 1.0 + np.sin(two_pi * tremolo_hz * t)
    samples = master_gain(amps) * tremolo * tone
    return AudioBlock(rate=rate, start=start, samples=samples)


def render_wav(
    params: SonifierParams,
    duration: float,
    path: str,
    rate: int = DEFAULT_SAMPLE_RATE,
    noise_seed: int = 0,
) -> None:
    """Render a parameter vector to a PCM file.

    Core parameters give a mono file.  An extended vector renders stereo:
    the tone and a colored-noise stream are scaled to equal pre-pan RMS,
    placed by their pan positions, and mixed with 0.5 headroom.
    """
    if not math.isfinite(duration) or duration <= 0.0:
        raise ValueError(f"duration must be positive, got {duration}")
    n = round(duration * rate)
    tone_block = synthesize(params, 0.0, n, rate)
    if not params.extended:
        write_wav(path, tone_block)
        return

    tone = tone_block.samples
    noise = noise_mono(params.noise_color, 0.0, n, rate, seed=noise_seed)
    tone_rms = float(np.sqrt(np.mean(tone**2))) if n else 0.0
    noise_rms = float(np.sqrt(np.mean(noise**2))) if n else 0.0
    if noise_rms > 0.0:
        noise = noise * (tone_rms / noise_rms)
    tone_left, tone_right = pan_gains(params.tone_pan)
    noise_left, noise_right = pan_gains(params.noise_pan)
    frames = EXTENDED_MIX_GAIN * np.stack(
        [
            tone_left * tone + noise_left * noise,
            tone_right * tone + noise_right * noise,
        ],
        axis=1,
    )
    np.clip(frames, -1.0, 1.0, out=frames)
    write_wav(path, AudioBlock(rate=rate, start=0, samples=frames))


# ------------------------------------------------------------- mod matrix


def _normalize_routes(
    routes: Mapping[int, int] | Iterable[tuple[int, int]] | None, n_slots: int
) -> tuple[tuple[int, int], ...]:
    if routes is None:
        return tuple((k, k) for k in range(n_slots))
    pairs = list(routes.items()) if isinstance(routes, Mapping) else [tuple(p) for p in routes]
    seen_features: set[int] = set()
    seen_slots: set[int] = set()
    for feature, slot in pairs:
        if feature < 0:
            raise ValueError(f"feature index {feature} is negative")
        if not 0 <= slot < n_slots:
            raise ValueError(f"slot index {slot} outside 0..{n_slots - 1}")
        if feature in seen_features:
            raise ValueError(f"feature {feature} routed twice")
        if slot in seen_slots:
            raise ValueError(f"slot {slot} assigned twice")
        seen_features.add(feature)
        seen_slots.add(slot)
    return tuple(sorted((int(f), int(s)) for f, s in pairs))


@dataclass(frozen=True, eq=False)
class ModMatrix:
    """Feature-to-slot routing with per-route inversion and per-slot mute.

    Routes map data-feature indices to sound-parameter slots injectively;
    slots nothing routes to, and muted slots, render at the neutral value 0.
    """

    n_slots: int = 4
    routes: object = None
    invert: frozenset[int] = frozenset()
    mute: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.n_slots not in (4, 7):
            raise ValueError(f"slot count must be 4 or 7, got {self.n_slots}")
        object.__setattr__(self, "routes", _normalize_routes(self.routes, self.n_slots))
        object.__setattr__(self, "invert", frozenset(int(f) for f in self.invert))
        object.__setattr__(self, "mute", frozenset(int(s) for s in self.mute))
        routed_features = {f for f, _ in self.routes}
        for feature in self.invert:
            if feature not in routed_features:
                raise ValueError(f"invert flag on unrouted feature {feature}")
        for slot in self.mute:
            if not 0 <= slot < self.n_slots:
                raise ValueError(f"mute flag on unknown slot {slot}")

    @property
    def slot_names(self) -> tuple[str, ...]:
        return EXTENDED_SLOTS if self.n_slots == 7 else CORE_SLOTS


def apply_mod_matrix(features: Iterable[float], matrix: ModMatrix) -> SonifierParams:
    """Resolve a normalized feature vector into sonifier parameters."""
    vec = np.asarray(list(features), dtype=np.float64)
    if vec.ndim != 1:
        raise ValueError("features must be a flat vector")
    if vec.size and (vec.min() < 0.0 or vec.max() > 1.0 or not np.all(np.isfinite(vec))):
        raise ValueError("features must lie in [0, 1]")
    values = [0.0] * matrix.n_slots
    for feature, slot in matrix.routes:
        if feature >= vec.size:
            raise ValueError(
                f"route for feature {feature} exceeds vector of length {vec.size}"
            )
        value = float(vec[feature])
        if feature in matrix.invert:
            value = 1.0 - value
        values[slot] = value
    for slot in matrix.mute:
        values[slot] = 0.0
    return SonifierParams.from_vector(values)


# ------------------------------------------------------------ live session


class LiveSession:
    """Block-by-block tone renderer with click-free retargeting.

    One writer pulls blocks; parameter changes land at block boundaries.
    During a ramp each parameter moves linearly from its value at retarget
    time to the target; the value applied to a block is the ramp evaluated
    at that block's end.  A zero-length ramp therefore jumps at the next
    block boundary.  Because synthesis is a pure function of absolute time,
    the output after the ramp is exactly a fresh render at the new vector.
    """

    def __init__(
        self,
        params: SonifierParams,
        rate: int = DEFAULT_SAMPLE_RATE,
        block_size: int = 256,
    ) -> None:
        if params.extended:
            raise ValueError("live sessions render the mono tone path only")
        if block_size < 1:
            raise ValueError(f"block size must be >= 1, got {block_size}")
        if rate < MIN_SAMPLE_RATE:
            raise ValueError(f"sample rate must be >= {MIN_SAMPLE_RATE}, got {rate}")
        self._rate = rate
        self._block_size = block_size
        self._cursor = 0
        self._current = params.core_vector()
        self._ramp_from = self._current.copy()
        self._ramp_target = self._current.copy()
        self._ramp_start = 0
        self._ramp_samples = 0

    @property
    def rate(self) -> int:
        return self._rate

    @property
    def cursor(self) -> int:
        """Absolute position of the next block, in samples."""
        return self._cursor

    @property
    def current_params(self) -> SonifierParams:
        return SonifierParams(*self._current)

    def retarget(self, params: SonifierParams, ramp_ms: float = 30.0) -> None:
        """Glide to a new vector over ``ramp_ms`` milliseconds."""
        if params.extended:
            raise ValueError("live sessions render the mono tone path only")
        if not math.isfinite(ramp_ms) or ramp_ms < 0.0:
            raise ValueError(f"ramp must be >= 0 ms, got {ramp_ms}")
        self._ramp_from = self._current.copy()
        self._ramp_target = params.core_vector()
        self._ramp_start = self._cursor
        self._ramp_samples = round(ramp_ms / 1000.0 * self._rate)

    def next_block(self) -> AudioBlock:
        end = self._cursor + self._block_size
        if self._ramp_samples == 0:
            frac = 1.0
        else:
            frac = min(1.0, max(0.0, (end - self._ramp_start) / self._ramp_samples))
        vec = self._ramp_from * (1.0 - frac) + self._ramp_target * frac
        self._current = vec
        block = synthesize(
            SonifierParams(*vec),
            t0=self._cursor / self._rate,
            n=self._block_size,
            rate=self._rate,
        )
        self._cursor = end
        return block


# ---------------------------------------------------------- golden vectors

GOLDEN_RANDOM_ROWS = 16
GOLDEN_RANDOM_SEED = 1903


def golden_params() -> list[SonifierParams]:
    """The documented parameter rows of the shared golden-vector table.

    A full {0, 0.5, 1} grid over the four core inputs, in nested order with
    chroma varying slowest, followed by 16 seeded uniform draws.
    """
    levels = (0.0, 0.5, 1.0)
    rows = [
        SonifierParams(c, r, s, f)
        for c in levels
        for r in levels
        for s in levels
        for f in levels
    ]
    rng = np.random.default_rng(GOLDEN_RANDOM_SEED)
    for _ in range(GOLDEN_RANDOM_ROWS):
        rows.append(SonifierParams(*rng.random(4)))
    return rows


def golden_vector_table(params_list: list[SonifierParams] | None = None) -> str:
    """Tab-separated table of derived quantities per parameter row.

    Columns: the four inputs, nine partial frequencies, the modulation
    index, nine partial amplitudes, and the tremolo rate.  Values carry
    full float precision so independent implementations can be checked
    to tight tolerances.
    """
    if params_list is None:
        params_list = golden_params()
    header = (
        CORE_SLOTS
        + tuple(f"omega_{i}" for i in range(PARTIAL_COUNT))
        + ("fm_index",)
        + tuple(f"amp_{i}" for i in range(PARTIAL_COUNT))
        + ("tremolo_hz",)
    )
    lines = ["\t".join(header)]
    for params in params_list:
        freqs = carrier_frequencies(params.chroma)
        amps = partial_amplitudes(freqs, params.sharpness)
        row = (
            [params.chroma, params.roughness, params.sharpness, params.fluctuation]
            + [float(f) for f in freqs]
            + [modulation_index(params.roughness)]
            + [float(a) for a in amps]
            + [tremolo_frequency(params.fluctuation)]
        )
        lines.append("\t".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"
