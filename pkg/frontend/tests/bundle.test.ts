import { describe, expect, it } from "vitest";

import { BundleFormatError, componentPlane, parseBundle, pointerAt } from "../src/bundle.js";
import { testBundle } from "./helpers.js";

function minimalDoc(): Record<string, unknown> {
  return {
    version: "1",
    shape: { rows: 1, cols: 2 },
    feature_names: ["a", "b"],
    pointers: [
      [0.25, 0.75],
      [1, 0],
    ],
    umatrix: [[0.3, 0.3]],
    items: [{ id: "x", label: "blue", features: [3, 4], normalized: [0.5, 0.5], bmu: 1 }],
  };
}

describe("bundle parsing", () => {
  it("accepts a well-formed document", () => {
    const bundle = parseBundle(minimalDoc());
    expect(bundle.rows).toBe(1);
    expect(bundle.cols).toBe(2);
    expect(bundle.featureNames).toEqual(["a", "b"]);
    expect(pointerAt(bundle, 0, 1)).toEqual([1, 0]);
    expect(bundle.items[0].bmu).toBe(1);
  });

  it("accepts any 1.x version and ignores unknown fields", () => {
    const doc = minimalDoc();
    doc.version = "1.9";
    doc.somebody_elses_field = { nested: true };
    expect(() => parseBundle(doc)).not.toThrow();
  });

  it("rejects other major versions", () => {
    const doc = minimalDoc();
    doc.version = "2";
    expect(() => parseBundle(doc)).toThrow(BundleFormatError);
    expect(() => parseBundle(doc)).toThrow(/version 2/);
  });

  it("rejects a pointer table of the wrong size", () => {
    const doc = minimalDoc();
    doc.pointers = [[0.25, 0.75]];
    expect(() => parseBundle(doc)).toThrow(/2 rows/);
  });

  it("rejects pointer rows of the wrong width", () => {
    const doc = minimalDoc();
    doc.pointers = [
      [0.25, 0.75, 0.5],
      [1, 0],
    ];
    expect(() => parseBundle(doc)).toThrow(/pointers\[0\]/);
  });

  it("rejects pointer components outside [0, 1]", () => {
    const doc = minimalDoc();
    doc.pointers = [
      [0.25, 1.75],
      [1, 0],
    ];
    expect(() => parseBundle(doc)).toThrow(/\[0, 1\]/);
  });

  it("rejects a BMU outside the lattice", () => {
    const doc = minimalDoc();
    (doc.items as Array<{ bmu: number }>)[0].bmu = 2;
    expect(() => parseBundle(doc)).toThrow(/bmu 2 outside/);
  });

  it("rejects missing sections with a named message", () => {
    for (const key of ["shape", "feature_names", "pointers", "umatrix", "items"]) {
      const doc = minimalDoc();
      delete doc[key];
      expect(() => parseBundle(doc), key).toThrow(BundleFormatError);
    }
  });

  it("rejects non-object documents", () => {
    expect(() => parseBundle(null)).toThrow(BundleFormatError);
    expect(() => parseBundle([1, 2])).toThrow(BundleFormatError);
    expect(() => parseBundle("{}")).toThrow(BundleFormatError);
  });
});

describe("component planes", () => {
  it("slices one feature across the lattice in row-major order", () => {
    const bundle = testBundle();
    const plane = componentPlane(bundle, 2);
    expect(plane).toHaveLength(3);
    expect(plane[0]).toEqual([0, 0.1, 0.2]);
    expect(plane[2]).toEqual([0.6, 0.7, 0.8]);
  });

  it("rejects out-of-range features", () => {
    expect(() => componentPlane(testBundle(), 4)).toThrow(RangeError);
    expect(() => componentPlane(testBundle(), -1)).toThrow(RangeError);
  });
});
