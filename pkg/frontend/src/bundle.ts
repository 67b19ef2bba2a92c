// Map bundle document: parsing and structural validation.
//
// The document is produced by the server package; here we only need enough
// checking to fail loudly with a message instead of rendering garbage.
// Unknown fields are ignored and any "1.x" version is accepted.

export interface BundleItem {
  id: string;
  label: string;
  features: number[];
  normalized: number[];
  bmu: number;
}

export interface Bundle {
  rows: number;
  cols: number;
  featureNames: string[];
  /** Row-major, rows*cols entries of featureNames.length values each, in [0, 1]. */
  pointers: number[][];
  /** rows x cols. */
  umatrix: number[][];
  items: BundleItem[];
}

export class BundleFormatError extends Error {}

function fail(message: string): never {
  throw new BundleFormatError(message);
}

function asObject(value: unknown, where: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(`${where} must be an object`);
  }
  return value as Record<string, unknown>;
}

function asIndex(value: unknown, where: string): number {
  if (typeof value !== "number" || !Number.isInteger(value) || value < 0) {
    fail(`${where} must be a non-negative integer`);
  }
  return value;
}

function asString(value: unknown, where: string): string {
  if (typeof value !== "string") fail(`${where} must be a string`);
  return value;
}

function numberRow(value: unknown, length: number | null, where: string): number[] {
  if (!Array.isArray(value)) fail(`${where} must be an array`);
  if (length !== null && value.length !== length) {
    fail(`${where} must have ${length} entries, got ${value.length}`);
  }
  for (const v of value) {
    if (typeof v !== "number" || !Number.isFinite(v)) {
      fail(`${where} must contain finite numbers`);
    }
  }
  return value as number[];
}

export function parseBundle(doc: unknown): Bundle {
  const root = asObject(doc, "bundle");

  const version = asString(root.version, "version");
  if (version.split(".", 1)[0] !== "1") {
    fail(`unsupported bundle version ${version}`);
  }

  const shape = asObject(root.shape, "shape");
  const rows = asIndex(shape.rows, "shape.rows");
  const cols = asIndex(shape.cols, "shape.cols");
  if (rows < 1 || cols < 1) fail("grid shape must be at least 1x1");

  if (!Array.isArray(root.feature_names) || root.feature_names.length === 0) {
    fail("feature_names must be a non-empty array");
  }
  const featureNames = root.feature_names.map((n, i) => asString(n, `feature_names[${i}]`));
  const dim = featureNames.length;

  const nodeCount = rows * cols;
  if (!Array.isArray(root.pointers) || root.pointers.length !== nodeCount) {
    fail(`pointers must hold ${nodeCount} rows`);
  }
  const pointers = root.pointers.map((p, i) => numberRow(p, dim, `pointers[${i}]`));
  for (const p of pointers) {
    for (const v of p) {
      if (v < 0 || v > 1) fail("pointer components must lie in [0, 1]");
    }
  }

  if (!Array.isArray(root.umatrix) || root.umatrix.length !== rows) {
    fail(`umatrix must hold ${rows} rows`);
  }
  const umatrix = root.umatrix.map((r, i) => numberRow(r, cols, `umatrix[${i}]`));

  if (!Array.isArray(root.items)) fail("items must be an array");
  const items: BundleItem[] = root.items.map((raw, i) => {
    const entry = asObject(raw, `items[${i}]`);
    const bmu = asIndex(entry.bmu, `items[${i}].bmu`);
    if (bmu >= nodeCount) {
      fail(`items[${i}].bmu ${bmu} outside 0..${nodeCount - 1}`);
    }
    return {
      id: asString(entry.id, `items[${i}].id`),
      label: asString(entry.label, `items[${i}].label`),
      features: numberRow(entry.features, dim, `items[${i}].features`),
      normalized: numberRow(entry.normalized, dim, `items[${i}].normalized`),
      bmu,
    };
  });

  return { rows, cols, featureNames, pointers, umatrix, items };
}

export function nodeIndex(bundle: Bundle, row: number, col: number): number {
  return row * bundle.cols + col;
}

export function pointerAt(bundle: Bundle, row: number, col: number): number[] {
  return bundle.pointers[nodeIndex(bundle, row, col)];
}

/** Per-node value of one pointer component, shaped rows x cols. */
export function componentPlane(bundle: Bundle, feature: number): number[][] {
  if (!Number.isInteger(feature) || feature < 0 || feature >= bundle.featureNames.length) {
    throw new RangeError(`feature index ${feature} out of range`);
  }
  const plane: number[][] = [];
  for (let r = 0; r < bundle.rows; r++) {
    const rowVals: number[] = [];
    for (let c = 0; c < bundle.cols; c++) {
      rowVals.push(bundle.pointers[r * bundle.cols + c][feature]);
    }
    plane.push(rowVals);
  }
  return plane;
}
