// Browser entry: DOM wiring only. Game rules never run here; every number on
// screen is read out of the latest snapshot.

import { DEFAULT_CAMERA, type OrbitCamera, orbitBy, zoomBy } from "./camera.js";
import { SessionClient, attachWebSocket } from "./connection.js";
import { CONTROL_CYCLE, logoColor, nextControl, sliderSpecs } from "./controls.js";
import { buildPanelView, cellClass } from "./panelView.js";
import {
  type ActiveControl,
  type Axis,
  type ControlEvent,
  type Snapshot,
  type StepContext,
  toMessage,
} from "./protocol.js";
import { paint } from "./render.js";
import { buildSceneDrawList } from "./sceneView.js";

const params = new URLSearchParams(location.search);
const host = params.get("host") ?? location.hostname ?? "127.0.0.1";
const port = params.get("port") ?? "8737";
const puzzle = params.get("puzzle") ?? "";

interface ViewState {
  snapshot: Snapshot | null;
  camera: OrbitCamera;
  activeControl: ActiveControl;
  status: string;
  lastStep: StepContext["lastStep"];
}

const state: ViewState = {
  snapshot: null,
  camera: { ...DEFAULT_CAMERA },
  activeControl: "translate",
  status: "connecting",
  lastStep: null,
};

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const statusEl = document.getElementById("status")!;
const errorEl = document.getElementById("error-readout")!;
const panelEl = document.getElementById("panel")!;
const slidersEl = document.getElementById("sliders")!;
const logoEl = document.getElementById("logo") as HTMLButtonElement;
const hintEl = document.getElementById("hint-text")!;

const client = new SessionClient();

function redraw(): void {
  statusEl.textContent = state.snapshot
    ? `${state.snapshot.puzzle_id} — ${state.snapshot.status} — moves ${state.snapshot.move_count} (${state.status})`
    : `(${state.status})`;
  if (!state.snapshot) return;
  const snap = state.snapshot;
  paint(canvas, buildSceneDrawList(snap, state.camera, { width: canvas.width, height: canvas.height }, state.activeControl));
  const err = snap.error;
  errorEl.textContent =
    `err: t=${err.translation.toFixed(3)} r=${err.rotation.toFixed(2)}° ` +
    `s=${err.scale.toFixed(3)} total=${err.total.toFixed(3)}`;
  renderPanel(snap);
}

function renderPanel(snap: Snapshot): void {
  const view = buildPanelView(snap);
  panelEl.innerHTML = "";
  if (!view) return;
  for (const row of view.rows) {
    const table = document.createElement("table");
    table.className = `matrix ${row.theme}`;
    for (let r = 0; r < 4; r++) {
      const tr = document.createElement("tr");
      for (let c = 0; c < 4; c++) {
        const cell = row.cells[r * 4 + c];
        const td = document.createElement("td");
        td.className = cellClass(cell, row.theme);
        td.textContent = cell.text;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    panelEl.appendChild(table);
  }
}

function rememberStep(event: ControlEvent): void {
  // mirror of what the engine keeps as the editable step, for slider routing
  const message = toMessage(event, { lastStep: state.lastStep, activeControl: state.activeControl });
  if (!message) return;
  if (message.type === "virtual_step") {
    const step = message.step;
    state.lastStep =
      step.kind === "rotate" ? { kind: "rotate", axis: step.axis } : { kind: step.kind };
  } else if (message.type === "undo" || message.type === "reset") {
    state.lastStep = null;
  }
}

async function dispatch(event: ControlEvent): Promise<void> {
  if (event.kind === "logo_tap") {
    state.activeControl = nextControl(state.activeControl);
    logoEl.textContent = `logo: ${state.activeControl}`;
    logoEl.style.background = logoColor(state.activeControl);
    buildSliders();
    redraw();
    return;
  }
  const message = toMessage(event, { lastStep: state.lastStep, activeControl: state.activeControl });
  rememberStep(event);
  if (!message) return;
  const reply = await client.request(message).catch(() => null);
  if (reply && reply.type === "hint") {
    hintEl.textContent = `hint: ${JSON.stringify(reply.step)} (residual ${reply.residual_after.toFixed(3)})`;
  }
}

function buildSliders(): void {
  slidersEl.innerHTML = "";
  for (const spec of sliderSpecs(state.activeControl)) {
    const wrap = document.createElement("label");
    wrap.className = "slider-row";
    const title = document.createElement("span");
    title.textContent = spec.label;
    title.style.color = spec.color;
    const value = document.createElement("span");
    value.className = "mono";
    value.textContent = String(spec.initial);
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(spec.min);
    input.max = String(spec.max);
    input.step = String(spec.step);
    input.value = String(spec.initial);
    input.addEventListener("input", () => {
      value.textContent = input.value;
      void dispatch({ kind: "slider_change", field: spec.field, value: Number(input.value) });
    });
    wrap.append(title, value, input);
    slidersEl.appendChild(wrap);
  }
}

function wireButtons(): void {
  logoEl.addEventListener("click", () => void dispatch({ kind: "logo_tap" }));
  document.getElementById("undo")!.addEventListener("click", () => void dispatch({ kind: "undo" }));
  document.getElementById("reset")!.addEventListener("click", () => void dispatch({ kind: "reset" }));
  document.getElementById("hint")!.addEventListener("click", () => void dispatch({ kind: "hint_request" }));

  for (const axis of ["x", "y", "z"] as Axis[]) {
    for (const sign of [1, -1]) {
      const button = document.createElement("button");
      button.textContent = `phys ${sign > 0 ? "+" : "-"}${axis}`;
      button.addEventListener("click", () => {
        const delta: [number, number, number] = [0, 0, 0];
        delta[{ x: 0, y: 1, z: 2 }[axis]] = sign * 0.5;
        void dispatch({ kind: "drag", mode: "translate", delta });
      });
      document.getElementById("phys-buttons")!.appendChild(button);
    }
  }
  for (const axis of ["x", "y", "z"] as Axis[]) {
    const button = document.createElement("button");
    button.textContent = `phys ⟳${axis}`;
    button.addEventListener("click", () =>
      void dispatch({ kind: "drag", mode: `rotate_${axis}` as const, degrees: 15 }),
    );
    document.getElementById("phys-buttons")!.appendChild(button);
  }
}

function wireCamera(): void {
  let dragging = false;
  let last: [number, number] = [0, 0];
  canvas.addEventListener("pointerdown", (e) => {
    dragging = true;
    last = [e.clientX, e.clientY];
  });
  window.addEventListener("pointerup", () => (dragging = false));
  window.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    state.camera = orbitBy(state.camera, -(e.clientX - last[0]) * 0.4, (e.clientY - last[1]) * 0.3);
    last = [e.clientX, e.clientY];
    redraw();
  });
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    state.camera = zoomBy(state.camera, e.deltaY > 0 ? 1.1 : 0.9);
    redraw();
  });
}

client.onReply = (reply) => {
  if (reply.type === "snapshot") {
    state.snapshot = reply;
    redraw();
  } else if (reply.type === "error") {
    hintEl.textContent = `error ${reply.code}: ${reply.message}`;
  }
};
client.onStatus = (s) => {
  state.status = s;
  document.body.classList.toggle("disconnected", s !== "open");
  redraw();
};

wireButtons();
wireCamera();
buildSliders();
logoEl.textContent = `logo: ${state.activeControl}`;

const socket = new WebSocket(`ws://${host}:${port}`);
attachWebSocket(client, socket);
socket.addEventListener("open", () => {
  if (puzzle) void client.request({ type: "new_session", puzzle });
  else hintEl.textContent = "add ?puzzle=<id> to the URL to start a session";
});
