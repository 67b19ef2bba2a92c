/**
 * Sonification math, re-implemented natively for the browser.
 *
 * The server package owns the reference implementation; this copy is kept
 * honest by the shared golden table in golden/sonification_vectors.tsv,
 * which the test suite replays against these functions.
 *
 * All four inputs are normalized to [0, 1]:
 *   chroma       shifts the whole partial stack by up to four semitones
 *   roughness    depth of a shared 30 Hz frequency modulation
 *   sharpness    center of the Gaussian spectral envelope
 *   fluctuation  loudness tremolo rate, 0 to 8 Hz
 */

export const PARTIAL_COUNT = 9;
export const BASE_FREQUENCY_HZ = 25;
export const CHROMA_SPAN_SEMITONES = 4;
export const FM_FREQUENCY_HZ = 30;
export const TREMOLO_MAX_HZ = 8;

const FM_INDEX_CURVE_WEIGHT = 0.4;
const FM_INDEX_BASE = 5;
const FM_INDEX_EXPONENT = 2.8;
const FM_INDEX_LINEAR_WEIGHT = 0.6;
const ENVELOPE_STEEPNESS = 6.66;
const ENVELOPE_OCTAVE_RANGE = 9;
const ENVELOPE_CENTER_BASE = 0.5;
const ENVELOPE_CENTER_SPAN = 0.24;

function checkUnit(value: number, name: string): number {
  if (!Number.isFinite(value) || value < 0 || value > 1) {
    throw new RangeError(`${name} must lie in [0, 1], got ${value}`);
  }
  return value;
}

/** Nine partial frequencies in Hz, adjacent ones exactly an octave apart. */
export function carrierFrequencies(chroma: number): number[] {
  checkUnit(chroma, "chroma");
  // one shared shift factor times exact powers of two, so the ratio between
  // neighbors stays exactly 2 in floating point
  const shift = Math.pow(2, (CHROMA_SPAN_SEMITONES * chroma) / 12);
  const freqs: number[] = [];
  for (let i = 0; i < PARTIAL_COUNT; i++) {
    freqs.push(BASE_FREQUENCY_HZ * Math.pow(2, i) * shift);
  }
  return freqs;
}

/** Depth of the shared frequency modulation: 0.4 at rest, 5^2.8 at full. */
export function modulationIndex(roughness: number): number {
  checkUnit(roughness, "roughness");
  const ceiling = Math.pow(FM_INDEX_BASE, FM_INDEX_EXPONENT);
  const curved =
    FM_INDEX_CURVE_WEIGHT * Math.pow(FM_INDEX_BASE, FM_INDEX_EXPONENT * roughness);
  return curved + FM_INDEX_LINEAR_WEIGHT * roughness * ceiling;
}

/** Gaussian envelope over log2 frequency; sharpness slides the center up. */
export function partialAmplitudes(frequencies: number[], sharpness: number): number[] {
  checkUnit(sharpness, "sharpness");
  if (frequencies.length === 0 || frequencies.some((f) => !(f > 0))) {
    throw new RangeError("frequencies must be positive");
  }
  const center = ENVELOPE_CENTER_BASE + ENVELOPE_CENTER_SPAN * sharpness;
  return frequencies.map((f) => {
    const deviation = ENVELOPE_STEEPNESS * (Math.log2(f) / ENVELOPE_OCTAVE_RANGE - center);
    return Math.exp(-0.5 * deviation * deviation);
  });
}

/** Tremolo rate in Hz. */
export function tremoloFrequency(fluctuation: number): number {
  return TREMOLO_MAX_HZ * checkUnit(fluctuation, "fluctuation");
}

/**
 * Output scale 1 / (2 * max(1, sum of partial amplitudes)); with the
 * tremolo factor peaking at 2 this bounds every sample to [-1, 1].
 */
export function masterGain(amplitudes: number[]): number {
  const total = amplitudes.reduce((acc, a) => acc + a, 0);
  return 1 / (2 * Math.max(1, total));
}

/** Everything the audio engine needs for one parameter vector. */
export interface Voice {
  frequencies: number[];
  amplitudes: number[];
  fmIndex: number;
  tremoloHz: number;
  gain: number;
}

export function voiceFor(chroma: number, roughness: number, sharpness: number, fluctuation: number): Voice {
  const frequencies = carrierFrequencies(chroma);
  const amplitudes = partialAmplitudes(frequencies, sharpness);
  return {
    frequencies,
    amplitudes,
    fmIndex: modulationIndex(roughness),
    tremoloHz: tremoloFrequency(fluctuation),
    gain: masterGain(amplitudes),
  };
}
