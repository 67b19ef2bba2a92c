// Golden parity: the browser re-implementation must reproduce the shared
// vector table to within 1e-6 relative, row for row.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  carrierFrequencies,
  masterGain,
  modulationIndex,
  partialAmplitudes,
  tremoloFrequency,
} from "../src/synth-math.js";

const TABLE_URL = new URL("../../golden/sonification_vectors.tsv", import.meta.url);

interface GoldenRow {
  chroma: number;
  roughness: number;
  sharpness: number;
  fluctuation: number;
  omegas: number[];
  fmIndex: number;
  amps: number[];
  tremoloHz: number;
}

function loadTable(): GoldenRow[] {
  const text = readFileSync(TABLE_URL, "utf8").trim();
  const lines = text.split("\n");
  const header = lines[0].split("\t");
  const col = (name: string): number => {
    const index = header.indexOf(name);
    if (index < 0) throw new Error(`missing column ${name}`);
    return index;
  };
  const omegaCols = Array.from({ length: 9 }, (_, i) => col(`omega_${i}`));
  const ampCols = Array.from({ length: 9 }, (_, i) => col(`amp_${i}`));
  return lines.slice(1).map((line) => {
    const cells = line.split("\t").map(Number);
    return {
      chroma: cells[col("chroma")],
      roughness: cells[col("roughness")],
      sharpness: cells[col("sharpness")],
      fluctuation: cells[col("fluctuation")],
      omegas: omegaCols.map((i) => cells[i]),
      fmIndex: cells[col("fm_index")],
      amps: ampCols.map((i) => cells[i]),
      tremoloHz: cells[col("tremolo_hz")],
    };
  });
}

function relativeError(actual: number, expected: number): number {
  if (expected === 0) return Math.abs(actual);
  return Math.abs(actual - expected) / Math.abs(expected);
}

describe("golden vector parity", () => {
  const rows = loadTable();

  it("has a non-trivial table to check against", () => {
    expect(rows.length).toBeGreaterThan(50);
  });

  it("reproduces every row within 1e-6 relative", () => {
    let worst = 0;
    for (const row of rows) {
      const freqs = carrierFrequencies(row.chroma);
      const amps = partialAmplitudes(freqs, row.sharpness);
      const index = modulationIndex(row.roughness);
      const tremolo = tremoloFrequency(row.fluctuation);
      for (let i = 0; i < 9; i++) {
        worst = Math.max(worst, relativeError(freqs[i], row.omegas[i]));
        worst = Math.max(worst, relativeError(amps[i], row.amps[i]));
      }
      worst = Math.max(worst, relativeError(index, row.fmIndex));
      worst = Math.max(worst, relativeError(tremolo, row.tremoloHz));
    }
    expect(worst).toBeLessThan(1e-6);
  });
});

describe("synth math shape", () => {
  it("keeps adjacent partials exactly an octave apart", () => {
    for (const chroma of [0, 0.31, 0.77, 1]) {
      const freqs = carrierFrequencies(chroma);
      expect(freqs).toHaveLength(9);
      for (let i = 1; i < freqs.length; i++) {
        expect(freqs[i] / freqs[i - 1]).toBe(2);
      }
    }
  });

  it("anchors the endpoints", () => {
    expect(carrierFrequencies(0)[0]).toBe(25);
    expect(carrierFrequencies(0)[8]).toBe(6400);
    expect(modulationIndex(0)).toBe(0.4);
    expect(modulationIndex(1)).toBeCloseTo(Math.pow(5, 2.8), 10);
    expect(tremoloFrequency(0)).toBe(0);
    expect(tremoloFrequency(1)).toBe(8);
  });

  it("bounds the master gain at 1/2", () => {
    expect(masterGain([0, 0, 0])).toBe(0.5);
    expect(masterGain([2, 1])).toBe(1 / 6);
  });

  it("rejects out-of-range inputs", () => {
    expect(() => carrierFrequencies(-0.01)).toThrow(RangeError);
    expect(() => modulationIndex(1.01)).toThrow(RangeError);
    expect(() => partialAmplitudes([100], 2)).toThrow(RangeError);
    expect(() => partialAmplitudes([0], 0.5)).toThrow(RangeError);
    expect(() => tremoloFrequency(Number.NaN)).toThrow(RangeError);
  });
});
