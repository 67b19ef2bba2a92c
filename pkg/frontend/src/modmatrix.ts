// Feature-to-slot routing, mirroring the server's rules exactly: routes are
// injective in both directions, inversion applies per routed feature, muted
// slots win over everything and render the neutral value 0.

export const CORE_SLOTS = ["chroma", "roughness", "sharpness", "fluctuation"] as const;
export const EXTENDED_SLOTS = [...CORE_SLOTS, "noise_color", "noise_pan", "tone_pan"] as const;

export interface ModMatrix {
  nSlots: 4 | 7;
  /** [featureIndex, slotIndex] pairs, sorted by feature. */
  routes: Array<[number, number]>;
  invert: Set<number>;
  mute: Set<number>;
}

export function identityMatrix(nSlots: 4 | 7, featureCount: number): ModMatrix {
  const routes: Array<[number, number]> = [];
  for (let k = 0; k < Math.min(nSlots, featureCount); k++) {
    routes.push([k, k]);
  }
  return { nSlots, routes, invert: new Set(), mute: new Set() };
}

/** Throws with a human-readable message when the matrix is inconsistent. */
export function validateMatrix(matrix: ModMatrix): void {
  if (matrix.nSlots !== 4 && matrix.nSlots !== 7) {
    throw new Error(`slot count must be 4 or 7, got ${matrix.nSlots}`);
  }
  const seenFeatures = new Set<number>();
  const seenSlots = new Set<number>();
  for (const [feature, slot] of matrix.routes) {
    if (!Number.isInteger(feature) || feature < 0) {
      throw new Error(`feature index ${feature} is invalid`);
    }
    if (!Number.isInteger(slot) || slot < 0 || slot >= matrix.nSlots) {
      throw new Error(`slot index ${slot} outside 0..${matrix.nSlots - 1}`);
    }
    if (seenFeatures.has(feature)) {
      throw new Error(`feature ${feature} routed twice`);
    }
    if (seenSlots.has(slot)) {
      throw new Error(`slot ${slot} assigned twice`);
    }
    seenFeatures.add(feature);
    seenSlots.add(slot);
  }
  for (const feature of matrix.invert) {
    if (!seenFeatures.has(feature)) {
      throw new Error(`invert flag on unrouted feature ${feature}`);
    }
  }
  for (const slot of matrix.mute) {
    if (slot < 0 || slot >= matrix.nSlots) {
      throw new Error(`mute flag on unknown slot ${slot}`);
    }
  }
}

/** Resolve a normalized feature vector into one value per sound slot. */
export function applyModMatrix(features: number[], matrix: ModMatrix): number[] {
  validateMatrix(matrix);
  for (const v of features) {
    if (!Number.isFinite(v) || v < 0 || v > 1) {
      throw new Error(`features must lie in [0, 1], got ${v}`);
    }
  }
  const values = new Array<number>(matrix.nSlots).fill(0);
  for (const [feature, slot] of matrix.routes) {
    if (feature >= features.length) {
      throw new Error(`route for feature ${feature} exceeds vector of length ${features.length}`);
    }
    let value = features[feature];
    if (matrix.invert.has(feature)) {
      value = 1 - value;
    }
    values[slot] = value;
  }
  for (const slot of matrix.mute) {
    values[slot] = 0;
  }
  return values;
}

/** Which slot the given feature currently drives, or null if unrouted. */
export function slotRoutedFrom(matrix: ModMatrix, feature: number): number | null {
  for (const [f, slot] of matrix.routes) {
    if (f === feature) return slot;
  }
  return null;
}
