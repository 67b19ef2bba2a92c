"""Audio blocks, stereo placement, and PCM file output."""

from __future__ import annotations

import math
import os
import tempfile
import wave
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

MIN_SAMPLE_RATE = 8000
DEFAULT_SAMPLE_RATE = 48000
PCM16_FULL_SCALE = 32767


@dataclass(frozen=True, eq=False)
class AudioBlock:
    """A run of samples anchored at an absolute position on the sample grid.

    ``start`` counts samples from time zero, so ``t0`` is exact and blocks
    rendered back to back line up without accumulated drift.  Samples are
    float64 in [-1, 1]: shape (n,) for mono, (n, 2) frames for stereo.
    """

    rate: int
    start: int
    samples: FloatArray

    def __post_init__(self) -> None:
        if self.rate < MIN_SAMPLE_RATE:
            raise ValueError(f"sample rate must be >= {MIN_SAMPLE_RATE}, got {self.rate}")
        data = np.asarray(self.samples, dtype=np.float64)
        if data.ndim not in (1, 2) or (data.ndim == 2 and data.shape[1] != 2):
            raise ValueError(f"samples must be (n,) or (n, 2), got shape {data.shape}")
        if data.size and not np.all(np.isfinite(data)):
            raise ValueError("samples contain non-finite values")
        if data.size and (data.min() < -1.0 or data.max() > 1.0):
            raise ValueError("samples exceed [-1, 1]")
        data.setflags(write=False)
        object.__setattr__(self, "samples", data)

    @property
    def t0(self) -> float:
        """Start time in seconds."""
        return self.start / self.rate

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    @property
    def channels(self) -> int:
        return 1 if self.samples.ndim == 1 else 2


def pan_gains(position: float) -> tuple[float, float]:
    """Constant-power stereo gains (left, right) for a position in [0, 1].

    Left gain is cos, right gain sin of position * pi/2, so the summed
    power is 1 everywhere.  The endpoints are exact: 0 is hard left with a
    silent right channel, 1 the mirror image.
    """
    if not (0.0 <= position <= 1.0) or not math.isfinite(position):
        raise ValueError(f"pan position must lie in [0, 1], got {position}")
    if position == 0.0:
        return 1.0, 0.0
    if position == 1.0:
        return 0.0, 1.0
    angle = position * math.pi / 2.0
    return math.cos(angle), math.sin(angle)


def encode_pcm16(samples: FloatArray) -> bytes:
    """Little-endian 16-bit PCM; stereo frames interleave left then right."""
    clipped = np.clip(samples, -1.0, 1.0)
    ints = np.round(clipped * PCM16_FULL_SCALE).astype("<i2")
    return ints.tobytes()


def write_wav(path: str, block: AudioBlock) -> None:
    """Write one block as a RIFF/WAVE file, atomically.

    The file appears at ``path`` only once completely written: output goes
    to a temporary sibling first and is moved into place.
    """
    payload = encode_pcm16(block.samples)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            with wave.open(handle, "wb") as wav:
                wav.setnchannels(block.channels)
                wav.setsampwidth(2)
                wav.setframerate(block.rate)
                wav.writeframes(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def read_wav(path: str) -> tuple[int, FloatArray]:
    """Read a 16-bit PCM file back to float samples; returns (rate, samples)."""
    with wave.open(path, "rb") as wav:
        if wav.getsampwidth() != 2:
            raise ValueError(f"{path}: expected 16-bit PCM")
        rate = wav.getframerate()
        channels = wav.getnchannels()
        raw = wav.readframes(wav.getnframes())
    ints = np.frombuffer(raw, dtype="<i2")
    floats = ints.astype(np.float64) / PCM16_FULL_SCALE
    if channels == 2:
        floats = floats.reshape(-1, 2)
    elif channels != 1:
        raise ValueError(f"{path}: unsupported channel count {channels}")
    return rate, floats
