"""Deterministic colored noise with a continuously variable spectral slope.

The stream is white noise hashed from absolute sample indices, shaped by a
linear-phase FIR whose power spectral density tilts from -6 dB/octave at
color 0 (brown) through flat at 0.5 (white) to +6 dB/octave at 1 (purple).
Filtering runs overlap-save on segments aligned to the absolute sample
grid, so any blocking of the same time range yields identical samples.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from somson.audio import MIN_SAMPLE_RATE, AudioBlock, pan_gains

FloatArray = NDArray[np.float64]

SLOPE_MIN_DB_PER_OCTAVE = -6.0
SLOPE_SPAN_DB_PER_OCTAVE = 12.0

FILTER_TAPS = 4096
SEGMENT_FFT = 16384
SEGMENT_STEP = SEGMENT_FFT - FILTER_TAPS + 1
SHELF_FREQUENCY_HZ = 20.0
REFERENCE_FREQUENCY_HZ = 1000.0
NOISE_RMS = 0.15

_SPLITMIX_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SPLITMIX_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SPLITMIX_MIX2 = np.uint64(0x94D049BB133111EB)


def spectral_slope_db(noise_color: float) -> float:
    """Power-density slope in dB per octave for a color position in [0, 1]."""
    if not (0.0 <= noise_color <= 1.0) or not math.isfinite(noise_color):
        raise ValueError(f"noise_color must lie in [0, 1], got {noise_color}")
    return SLOPE_MIN_DB_PER_OCTAVE + SLOPE_SPAN_DB_PER_OCTAVE * noise_color


def _white(seed: int, start: int, count: int) -> FloatArray:
    """Uniform white noise in [-1, 1), a pure function of (seed, index).

    Index k yields the k-th output of a splitmix64 stream, so any sample
    is addressable in O(1) and negative indices wrap consistently.
    """
    index = np.arange(start, start + count, dtype=np.int64).astype(np.uint64)
    z = np.uint64(seed) + (index + np.uint64(1)) * _SPLITMIX_GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _SPLITMIX_MIX1
    z = (z ^ (z >> np.uint64(27))) * _SPLITMIX_MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) / float(1 << 52) - 1.0


@lru_cache(maxsize=32)
def _color_kernel(slope_db: float, rate: int) -> FloatArray:
    """Linear-phase FIR whose amplitude response follows the slope.

    Amplitude goes as f^(slope/6.02) relative to 1 kHz, shelved flat below
    20 Hz to keep descending slopes bounded.  The kernel is pre-scaled so
    unit-variance input noise comes out at NOISE_RMS.
    """
    freqs = np.fft.rfftfreq(FILTER_TAPS, 1.0 / rate)
    exponent = slope_db / (20.0 * math.log10(2.0))
    magnitude = (np.maximum(freqs, SHELF_FREQUENCY_HZ) / REFERENCE_FREQUENCY_HZ) ** exponent
    kernel = np.fft.irfft(magnitude)
    kernel = np.roll(kernel, FILTER_TAPS // 2)
    kernel *= np.hanning(FILTER_TAPS)
    # white input is uniform on [-1, 1): variance 1/3
    expected_rms = math.sqrt(float(np.sum(kernel**2)) / 3.0)
    kernel *= NOISE_RMS / expected_rms
    kernel.setflags(write=False)
    return kernel


@lru_cache(maxsize=32)
def _kernel_spectrum(slope_db: float, rate: int) -> NDArray[np.complex128]:
    spectrum = np.fft.rfft(_color_kernel(slope_db, rate), SEGMENT_FFT)
    spectrum.setflags(write=False)
    return spectrum


def noise_mono(
    noise_color: float, t0: float, n: int, rate: int, seed: int = 0
) -> FloatArray:
    """Shaped mono noise for an absolute sample range.

    Overlap-save segments are anchored at multiples of the step size on the
    absolute grid, which makes every sample a pure function of (seed, index)
    regardless of how a caller splits the range into blocks.
    """
    slope_db = spectral_slope_db(noise_color)
    if rate < MIN_SAMPLE_RATE:
        raise ValueError(f"sample rate must be >= {MIN_SAMPLE_RATE}, got {rate}")
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    if not math.isfinite(t0) or t0 < 0.0:
        raise ValueError(f"start time must be finite and >= 0, got {t0}")
    start = round(t0 * rate)
    out = np.empty(n)
    if n == 0:
        return out
    spectrum = _kernel_spectrum(slope_db, rate)
    first_segment = start // SEGMENT_STEP
    last_segment = (start + n - 1) // SEGMENT_STEP
    for segment in range(first_segment, last_segment + 1):
        segment_start = segment * SEGMENT_STEP
        white = _white(seed, segment_start - FILTER_TAPS + 1, SEGMENT_FFT)
        shaped = np.fft.irfft(np.fft.rfft(white) * spectrum)
        valid = shaped[FILTER_TAPS - 1 :]
        lo = max(segment_start, start)
        hi = min(segment_start + SEGMENT_STEP, start + n)
        out[lo - start : hi - start] = valid[lo - segment_start : hi - segment_start]
    return out


def noise_block(
    noise_color: float,
    noise_pan: float,
    t0: float,
    n: int,
    rate: int,
    seed: int = 0,
) -> AudioBlock:
    """Stereo colored-noise block, placed by constant-power panning."""
    mono = noise_mono(noise_color, t0, n, rate, seed=seed)
    left_gain, right_gain = pan_gains(noise_pan)
    frames = np.stack([left_gain * mono, right_gain * mono], axis=1)
    # RMS targets leave generous headroom; clipping is a formal guard only
    np.clip(frames, -1.0, 1.0, out=frames)
    return AudioBlock(rate=rate, start=round(t0 * rate), samples=frames)
