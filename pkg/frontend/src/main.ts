// App wiring: fetch the bundle, build the DOM, translate browser events into
// reducer actions, and feed the resulting commands to the audio engine.

import { Bundle, parseBundle } from "./bundle.js";
import { WebAudioEngine } from "./engine.js";
import { cellAt, drawMap } from "./heatmap.js";
import { CORE_SLOTS, EXTENDED_SLOTS, ModMatrix } from "./modmatrix.js";
import { Action, ExplorerState, View, extendedAvailable, initialState, reduce } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(tag: K, className?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function showError(message: string): void {
  const box = document.getElementById("error");
  if (box) {
    box.textContent = message;
    box.style.display = "block";
  }
}

interface Ui {
  canvas: HTMLCanvasElement;
  viewButtons: Array<{ button: HTMLButtonElement; view: View | null }>;
  itemsButton: HTMLButtonElement;
  oneDBox: HTMLInputElement;
  sliderRows: Array<{ input: HTMLInputElement; readout: HTMLSpanElement; row: HTMLElement }>;
  status: HTMLSpanElement;
  extendedBox: HTMLInputElement | null;
  matrixPanel: HTMLElement | null;
  matrixError: HTMLElement | null;
}

function buildUi(root: HTMLElement, bundle: Bundle, dispatch: (action: Action) => void): Ui {
  const layout = el("div", "layout");
  const left = el("div", "left");
  const right = el("div", "right");
  layout.append(left, right);
  root.append(layout);

  const canvas = el("canvas", "map");
  left.append(canvas);

  // Map, one button per feature plane, and the item toggle: for four
  // features that is exactly six buttons
  const buttonRow = el("div", "buttons");
  const viewButtons: Ui["viewButtons"] = [];
  const mapButton = el("button", "view", "Map");
  mapButton.addEventListener("click", () => dispatch({ type: "select-view", view: { kind: "umatrix" } }));
  viewButtons.push({ button: mapButton, view: { kind: "umatrix" } });
  buttonRow.append(mapButton);
  bundle.featureNames.forEach((name, feature) => {
    const button = el("button", "view", name);
    button.addEventListener("click", () => dispatch({ type: "select-view", view: { kind: "component", feature } }));
    viewButtons.push({ button, view: { kind: "component", feature } });
    buttonRow.append(button);
  });
  const itemsButton = el("button", "view", "Items");
  itemsButton.addEventListener("click", () => dispatch({ type: "toggle-items" }));
  viewButtons.push({ button: itemsButton, view: null });
  buttonRow.append(itemsButton);
  left.append(buttonRow);

  const oneDRow = el("label", "one-d");
  const oneDBox = el("input");
  oneDBox.type = "checkbox";
  oneDBox.addEventListener("change", () => dispatch({ type: "set-one-d", enabled: oneDBox.checked }));
  oneDRow.append(oneDBox, document.createTextNode(" 1D (vary only the active plane's slider)"));
  left.append(oneDRow);

  const hint = el("p", "hint", "Press and hold a cell to hear it; drag to glide. Space toggles sustain.");
  left.append(hint);

  const sliderRows: Ui["sliderRows"] = [];
  const sliderBox = el("div", "sliders");
  for (const name of EXTENDED_SLOTS) {
    const row = el("div", "slider-row");
    const label = el("span", "slider-label", name.replace("_", " "));
    const input = el("input");
    input.type = "range";
    input.min = "0";
    input.max = "1";
    input.step = "any";
    input.value = "0";
    const slot = sliderRows.length;
    input.addEventListener("input", () => dispatch({ type: "slider", slot, value: Number(input.value) }));
    const readout = el("span", "readout", "0.00");
    row.append(label, input, readout);
    sliderBox.append(row);
    sliderRows.push({ input, readout, row });
  }
  right.append(sliderBox);

  const status = el("span", "status", "no node selected");
  right.append(status);

  let extendedBox: HTMLInputElement | null = null;
  let matrixPanel: HTMLElement | null = null;
  let matrixError: HTMLElement | null = null;
  if (extendedAvailable(bundle)) {
    const extRow = el("label", "extended");
    extendedBox = el("input");
    extendedBox.type = "checkbox";
    extendedBox.addEventListener("change", () => dispatch({ type: "set-extended", enabled: extendedBox!.checked }));
    extRow.append(extendedBox, document.createTextNode(" extended (noise + panning, 7 slots)"));
    right.append(extRow);
    matrixPanel = el("div", "matrix");
    matrixError = el("div", "matrix-error");
    right.append(matrixPanel, matrixError);
  }

  return { canvas, viewButtons, itemsButton, oneDBox, sliderRows, status, extendedBox, matrixPanel, matrixError };
}

function sameView(a: View | null, b: View): boolean {
  if (!a) return false;
  if (a.kind !== b.kind) return false;
  return a.kind === "umatrix" || b.kind === "umatrix" || a.feature === b.feature;
}

function renderMatrixPanel(panel: HTMLElement, bundle: Bundle, state: ExplorerState, dispatch: (action: Action) => void): void {
  panel.replaceChildren();
  if (!state.extended) return;

  const slotNames = state.matrix.nSlots === 7 ? EXTENDED_SLOTS : CORE_SLOTS;
  const routeOf = new Map<number, number>(state.matrix.routes.map(([f, s]) => [s, f]));

  const readPanel = (): ModMatrix => {
    const routes: Array<[number, number]> = [];
    const invert = new Set<number>();
    const mute = new Set<number>();
    panel.querySelectorAll<HTMLSelectElement>("select").forEach((select) => {
      const slot = Number(select.dataset.slot);
      if (select.value !== "") routes.push([Number(select.value), slot]);
    });
    panel.querySelectorAll<HTMLInputElement>("input[data-kind='invert']").forEach((box) => {
      if (box.checked) invert.add(Number(box.dataset.feature));
    });
    panel.querySelectorAll<HTMLInputElement>("input[data-kind='mute']").forEach((box) => {
      if (box.checked) mute.add(Number(box.dataset.slot));
    });
    // drop invert flags whose feature is no longer routed, the server
    // treats that as an error and the panel should not get stuck
    const routed = new Set(routes.map(([f]) => f));
    for (const f of [...invert]) if (!routed.has(f)) invert.delete(f);
    return { nSlots: state.matrix.nSlots, routes, invert, mute };
  };

  slotNames.forEach((slotName, slot) => {
    const row = el("div", "matrix-row");
    row.append(el("span", "matrix-slot", slotName.replace("_", " ")));
    const select = el("select");
    select.dataset.slot = String(slot);
    const none = el("option", undefined, "(none)");
    none.value = "";
    select.append(none);
    bundle.featureNames.forEach((name, feature) => {
      const option = el("option", undefined, name);
      option.value = String(feature);
      if (routeOf.get(slot) === feature) option.selected = true;
      select.append(option);
    });
    select.addEventListener("change", () => dispatch({ type: "set-matrix", matrix: readPanel() }));

    const invertBox = el("input");
    invertBox.type = "checkbox";
    invertBox.dataset.kind = "invert";
    const routedFeature = routeOf.get(slot);
    invertBox.dataset.feature = routedFeature === undefined ? "-1" : String(routedFeature);
    invertBox.disabled = routedFeature === undefined;
    invertBox.checked = routedFeature !== undefined && state.matrix.invert.has(routedFeature);
    invertBox.addEventListener("change", () => dispatch({ type: "set-matrix", matrix: readPanel() }));

    const muteBox = el("input");
    muteBox.type = "checkbox";
    muteBox.dataset.kind = "mute";
    muteBox.dataset.slot = String(slot);
    muteBox.checked = state.matrix.mute.has(slot);
    muteBox.addEventListener("change", () => dispatch({ type: "set-matrix", matrix: readPanel() }));

    const invertLabel = el("label", "flag");
    invertLabel.append(invertBox, document.createTextNode(" inv"));
    const muteLabel = el("label", "flag");
    muteLabel.append(muteBox, document.createTextNode(" mute"));
    row.append(select, invertLabel, muteLabel);
    panel.append(row);
  });
}

function sync(ui: Ui, bundle: Bundle, state: ExplorerState, dispatch: (action: Action) => void): void {
  drawMap(ui.canvas, bundle, state.view, { showItems: state.showItems, selected: state.selected });

  for (const { button, view } of ui.viewButtons) {
    if (view) {
      button.classList.toggle("active", sameView(view, state.view) && (view.kind === state.view.kind));
    }
  }
  ui.itemsButton.classList.toggle("active", state.showItems);

  ui.oneDBox.disabled = state.view.kind !== "component";
  ui.oneDBox.checked = state.oneD;

  ui.sliderRows.forEach(({ input, readout, row }, slot) => {
    const visible = slot < state.sliders.length;
    row.style.display = visible ? "" : "none";
    if (visible) {
      input.value = String(state.sliders[slot]);
      readout.textContent = state.sliders[slot].toFixed(2);
    }
  });

  ui.status.textContent = state.selected
    ? `node ${state.selected.row},${state.selected.col}${state.holding ? " (held)" : ""}${state.sustain ? " [sustain]" : ""}`
    : `no node selected${state.sustain ? " [sustain]" : ""}`;

  if (ui.extendedBox) ui.extendedBox.checked = state.extended;
  if (ui.matrixPanel) renderMatrixPanel(ui.matrixPanel, bundle, state, dispatch);
  if (ui.matrixError) ui.matrixError.textContent = state.matrixError ?? "";
}

function start(bundle: Bundle): void {
  const root = document.getElementById("app");
  if (!root) return;

  const engine = new WebAudioEngine();
  let state = initialState(bundle);

  const dispatch = (action: Action): void => {
    const step = reduce(bundle, state, action);
    state = step.state;
    for (const command of step.commands) {
      engine.run(command);
    }
    sync(ui, bundle, state, dispatch);
  };

  const ui = buildUi(root, bundle, dispatch);

  let pointerDown = false;
  ui.canvas.addEventListener("pointerdown", (event) => {
    event.preventDefault();
    pointerDown = true;
    const cell = cellAt(ui.canvas, bundle, event.clientX, event.clientY);
    if (cell) dispatch({ type: "press", row: cell.row, col: cell.col });
  });
  ui.canvas.addEventListener("pointermove", (event) => {
    if (!pointerDown) return;
    const cell = cellAt(ui.canvas, bundle, event.clientX, event.clientY);
    if (cell) dispatch({ type: "drag", row: cell.row, col: cell.col });
  });
  const endHold = (): void => {
    if (!pointerDown) return;
    pointerDown = false;
    dispatch({ type: "release" });
  };
  ui.canvas.addEventListener("pointerup", endHold);
  ui.canvas.addEventListener("pointercancel", endHold);
  // leaving the map mid-hold counts as a release
  ui.canvas.addEventListener("pointerleave", endHold);
  window.addEventListener("pointerup", endHold);

  window.addEventListener("keydown", (event) => {
    if (event.code === "Space" && !(event.target instanceof HTMLInputElement)) {
      event.preventDefault();
      dispatch({ type: "toggle-sustain" });
    }
  });

  sync(ui, bundle, state, dispatch);
}

async function boot(): Promise<void> {
  try {
    const response = await fetch("/bundle");
    if (!response.ok) {
      throw new Error(`bundle request failed with status ${response.status}`);
    }
    start(parseBundle(await response.json()));
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
  }
}

void boot();
