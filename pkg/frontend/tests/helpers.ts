// Shared fixtures: a small parsed bundle and an engine stub that records
// every command it is asked to run.

import { Bundle, parseBundle } from "../src/bundle.js";
import { Action, EngineCommand, ExplorerState, initialState, reduce } from "../src/state.js";

/** 3x3 grid, four features; pointer values are distinct per node. */
export function testBundle(): Bundle {
  const pointers: number[][] = [];
  for (let node = 0; node < 9; node++) {
    pointers.push([
      0.1 + node * 0.05,
      0.9 - node * 0.05,
      node / 10,
      (node * 7) % 10 / 10,
    ]);
  }
  return parseBundle({
    version: "1",
    shape: { rows: 3, cols: 3 },
    feature_names: ["tempo", "energy", "brightness", "complexity"],
    normalizer: { minimum: [0, 0, 0, 0], maximum: [1, 1, 1, 1] },
    pointers,
    umatrix: [
      [0.1, 0.2, 0.3],
      [0.2, 0.5, 0.2],
      [0.3, 0.2, 0.1],
    ],
    items: [
      { id: "a", label: "red", features: [1, 2, 3, 4], normalized: [0.1, 0.9, 0, 0], bmu: 0 },
      { id: "b", label: "green", features: [4, 3, 2, 1], normalized: [0.5, 0.5, 0.8, 0.6], bmu: 8 },
    ],
    training: { rounds: 10, alpha_start: 0.5, alpha_end: 0.01, sigma_start: 1.5, sigma_end: 0.5, seed: 0 },
  });
}

export class RecordingEngine {
  log: EngineCommand[] = [];

  run(command: EngineCommand): void {
    this.log.push(command);
  }

  kinds(): string[] {
    return this.log.map((c) => c.kind);
  }

  /** Net number of live streams after replaying the log; never above 1. */
  streamBalance(): number {
    let live = 0;
    let peak = 0;
    for (const command of this.log) {
      if (command.kind === "start") live += 1;
      if (command.kind === "stop") live -= 1;
      peak = Math.max(peak, live);
    }
    if (peak > 1 || live < 0) {
      throw new Error(`stream misuse in log: ${this.kinds().join(",")}`);
    }
    return live;
  }
}

/** Drive the reducer through a scripted action list. */
export function play(bundle: Bundle, actions: Action[], from?: ExplorerState): { state: ExplorerState; engine: RecordingEngine } {
  const engine = new RecordingEngine();
  let state = from ?? initialState(bundle);
  for (const action of actions) {
    const step = reduce(bundle, state, action);
    state = step.state;
    for (const command of step.commands) {
      engine.run(command);
    }
  }
  return { state, engine };
}
