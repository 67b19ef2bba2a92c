// Explorer state as a pure reducer.  Pointer and widget events come in as
// actions; out come the next state and the commands the audio engine must
// run.  Keeping this free of DOM and WebAudio is what lets the interaction
// contract run under plain vitest.
//
// Contract highlights:
//   - at most one audio stream exists; press starts it, dragging across
//     cells only retargets it, release stops it unless sustain is armed
//   - selecting a node copies its pointer components into the sliders
//     verbatim (no rounding), so readouts equal the bundle exactly
//   - 1D mode is only available on a component plane and moves exactly
//     one slider per map interaction

import { Bundle, pointerAt } from "./bundle.js";
import { ModMatrix, applyModMatrix, identityMatrix, slotRoutedFrom, validateMatrix } from "./modmatrix.js";

export type View = { kind: "umatrix" } | { kind: "component"; feature: number };

export interface ExplorerState {
  view: View;
  showItems: boolean;
  oneD: boolean;
  selected: { row: number; col: number } | null;
  /** One value per sound slot, each in [0, 1]. */
  sliders: number[];
  holding: boolean;
  sustain: boolean;
  extended: boolean;
  matrix: ModMatrix;
  streaming: boolean;
  matrixError: string | null;
}

export type Action =
  | { type: "select-view"; view: View }
  | { type: "toggle-items" }
  | { type: "set-one-d"; enabled: boolean }
  | { type: "press"; row: number; col: number }
  | { type: "drag"; row: number; col: number }
  | { type: "release" }
  | { type: "slider"; slot: number; value: number }
  | { type: "toggle-sustain" }
  | { type: "set-extended"; enabled: boolean }
  | { type: "set-matrix"; matrix: ModMatrix };

export type EngineCommand =
  | { kind: "start"; params: number[] }
  | { kind: "retarget"; params: number[] }
  | { kind: "stop" };

export interface Step {
  state: ExplorerState;
  commands: EngineCommand[];
}

export function initialState(bundle: Bundle): ExplorerState {
  const nSlots = 4;
  return {
    view: { kind: "umatrix" },
    showItems: false,
    oneD: false,
    selected: null,
    sliders: new Array(nSlots).fill(0),
    holding: false,
    sustain: false,
    extended: false,
    matrix: identityMatrix(nSlots, bundle.featureNames.length),
    streaming: false,
    matrixError: null,
  };
}

export function extendedAvailable(bundle: Bundle): boolean {
  return bundle.featureNames.length >= 4;
}

function inGrid(bundle: Bundle, row: number, col: number): boolean {
  return Number.isInteger(row) && Number.isInteger(col) && row >= 0 && row < bundle.rows && col >= 0 && col < bundle.cols;
}

/** Slot values for a node under the current routing. */
export function nodeSliderValues(bundle: Bundle, state: ExplorerState, row: number, col: number): number[] {
  return applyModMatrix(pointerAt(bundle, row, col), state.matrix);
}

function soundCommand(state: ExplorerState, params: number[]): EngineCommand {
  return state.streaming ? { kind: "retarget", params } : { kind: "start", params };
}

function slidersAfterNode(bundle: Bundle, state: ExplorerState, row: number, col: number): number[] {
  const resolved = nodeSliderValues(bundle, state, row, col);
  if (!state.oneD || state.view.kind !== "component") {
    return resolved;
  }
  // 1D mode: only the slider fed by the active plane's feature may move
  const slot = slotRoutedFrom(state.matrix, state.view.feature);
  const next = state.sliders.slice();
  if (slot !== null) {
    next[slot] = resolved[slot];
  }
  return next;
}

export function reduce(bundle: Bundle, state: ExplorerState, action: Action): Step {
  switch (action.type) {
    case "select-view": {
      if (action.view.kind === "component") {
        const feature = action.view.feature;
        if (!Number.isInteger(feature) || feature < 0 || feature >= bundle.featureNames.length) {
          return { state, commands: [] };
        }
        return { state: { ...state, view: action.view }, commands: [] };
      }
      // leaving the component planes also leaves 1D mode
      return { state: { ...state, view: action.view, oneD: false }, commands: [] };
    }

    case "toggle-items":
      return { state: { ...state, showItems: !state.showItems }, commands: [] };

    case "set-one-d": {
      if (action.enabled && state.view.kind !== "component") {
        return { state, commands: [] };
      }
      return { state: { ...state, oneD: action.enabled }, commands: [] };
    }

    case "press": {
      if (!inGrid(bundle, action.row, action.col)) {
        return { state, commands: [] };
      }
      const sliders = slidersAfterNode(bundle, state, action.row, action.col);
      const command = soundCommand(state, sliders);
      return {
        state: {
          ...state,
          selected: { row: action.row, col: action.col },
          sliders,
          holding: true,
          streaming: true,
        },
        commands: [command],
      };
    }

    case "drag": {
      if (!state.holding || !inGrid(bundle, action.row, action.col)) {
        return { state, commands: [] };
      }
      if (state.selected && state.selected.row === action.row && state.selected.col === action.col) {
        return { state, commands: [] };
      }
      const sliders = slidersAfterNode(bundle, state, action.row, action.col);
      return {
        state: { ...state, selected: { row: action.row, col: action.col }, sliders },
        commands: [{ kind: "retarget", params: sliders }],
      };
    }

    case "release": {
      if (!state.holding) {
        return { state, commands: [] };
      }
      if (state.sustain) {
        return { state: { ...state, holding: false }, commands: [] };
      }
      return { state: { ...state, holding: false, streaming: false }, commands: [{ kind: "stop" }] };
    }

    case "slider": {
      if (!Number.isInteger(action.slot) || action.slot < 0 || action.slot >= state.sliders.length) {
        return { state, commands: [] };
      }
      const value = Math.min(1, Math.max(0, action.value));
      const sliders = state.sliders.slice();
      sliders[action.slot] = value;
      const commands: EngineCommand[] = state.streaming ? [{ kind: "retarget", params: sliders }] : [];
      // hand-moved sliders no longer describe any one node
      return { state: { ...state, sliders, selected: null }, commands };
    }

    case "toggle-sustain": {
      const sustain = !state.sustain;
      if (!sustain && state.streaming && !state.holding) {
        return { state: { ...state, sustain, streaming: false }, commands: [{ kind: "stop" }] };
      }
      return { state: { ...state, sustain }, commands: [] };
    }

    case "set-extended": {
      if (action.enabled === state.extended) {
        return { state, commands: [] };
      }
      if (action.enabled && !extendedAvailable(bundle)) {
        return { state, commands: [] };
      }
      const nSlots = action.enabled ? 7 : 4;
      const commands: EngineCommand[] = state.streaming ? [{ kind: "stop" }] : [];
      return {
        state: {
          ...state,
          extended: action.enabled,
          sliders: new Array(nSlots).fill(0),
          matrix: identityMatrix(nSlots, bundle.featureNames.length),
          selected: null,
          holding: false,
          streaming: false,
          matrixError: null,
        },
        commands,
      };
    }

    case "set-matrix": {
      try {
        validateMatrix(action.matrix);
      } catch (err) {
        return {
          state: { ...state, matrixError: err instanceof Error ? err.message : String(err) },
          commands: [],
        };
      }
      if (action.matrix.nSlots !== state.matrix.nSlots) {
        return { state: { ...state, matrixError: "slot count cannot change here" }, commands: [] };
      }
      const next: ExplorerState = { ...state, matrix: action.matrix, matrixError: null };
      if (state.streaming && state.selected) {
        const sliders = nodeSliderValues(bundle, next, state.selected.row, state.selected.col);
        return {
          state: { ...next, sliders },
          commands: [{ kind: "retarget", params: sliders }],
        };
      }
      return { state: next, commands: [] };
    }
  }
}
