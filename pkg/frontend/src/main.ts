/** Browser bootstrap: wires the gateway client to the DOM. */

import { fitTransform, dragToZoneParams, toMap } from "./geometry.js";
import { heatmapPixels } from "./heatmap.js";
import { GatewayClient } from "./net.js";
import {
  makeCompletionResponseFrame,
  makeModeChangeFrame,
  makeUtteranceFrame,
} from "./protocol.js";
import { drawView } from "./render.js";
import { makeForm, validateForm, FormModel } from "./forms.js";

// gateway address: ?ws=ws://host:port/ws overrides the default
const WS_URL =
  new URLSearchParams(location.search).get("ws") ?? `ws://${location.hostname}:8000/ws`;

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const cells = document.createElement("canvas");
const cellsCtx = cells.getContext("2d")!;

const commandInput = document.getElementById("command") as HTMLInputElement;
const toolSelect = document.getElementById("tool") as HTMLSelectElement;
const feedBox = document.getElementById("feed")!;
const gaugeBox = document.getElementById("gauge")!;
const modeBox = document.getElementById("modes")!;
const formBox = document.getElementById("form")!;
const bannerBox = document.getElementById("banner")!;
const statusBox = document.getElementById("status")!;

const client = new GatewayClient(() => new WebSocket(WS_URL) as never);
let form: FormModel | null = null;
let dragStart: [number, number] | null = null;
let lastGesture: { kind: "click" | "drag"; x: number; y: number; x2?: number; y2?: number } | undefined;

function transform() {
  const field = client.state.field;
  const w = field ? field.width * field.cellSize : 1600;
  const h = field ? field.height * field.cellSize : 1600;
  return fitTransform(w, h, canvas.width, canvas.height);
}

function render(): void {
  const state = client.state;
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (state.field) {
    const f = state.field;
    cells.width = f.width;
    cells.height = f.height;
    const pixels = heatmapPixels(f, state.overlays);
    const image = cellsCtx.createImageData(f.width, f.height);
    image.data.set(pixels);
    cellsCtx.putImageData(image, 0, 0);
    ctx.imageSmoothingEnabled = false;
    const t = transform();
    ctx.drawImage(
      cells, t.offsetX, t.offsetY,
      f.width * f.cellSize * t.scale, f.height * f.cellSize * t.scale,
    );
    drawView(ctx as never, state, t);
  }
  renderPanel();
}

function renderPanel(): void {
  const state = client.state;
  statusBox.textContent = client.connected
    ? `tick ${state.tick} | ${state.strategy ? state.strategy.generation : ""}`
    : "disconnected (input queued locally)";
  commandInput.disabled = !client.connected && client.backlog.length > 0 ? false : false;

  if (state.workload) {
    const w = state.workload;
    gaugeBox.innerHTML =
      `<div class="bar" style="width:${Math.min(100, w.continuous * 12)}%"></div>` +
      `<span>level ${w.method === "windowed" ? w.discrete_windowed : w.discrete_continuous}` +
      ` (win ${w.discrete_windowed} / cont ${w.discrete_continuous},` +
      ` ${w.continuous.toFixed(2)})</span>`;
  }

  bannerBox.textContent = state.errorBanner ?? "";
  bannerBox.style.display = state.errorBanner ? "block" : "none";

  feedBox.innerHTML = state.emissions
    .slice(-12)
    .map((e) => `<div class="sev-${e.severity}">[${e.tick}] ${e.text}</div>`)
    .join("");

  if (state.modeTable) {
    modeBox.innerHTML = state.modeTable.cells
      .map((cell) => {
        const options = cell.modes
          .map(
            (m) =>
              `<button class="${m.id === cell.active ? "active" : ""}" ` +
              `data-task="${cell.task}" data-stage="${cell.stage}" data-mode="${m.id}">` +
              `${m.id.split("-").pop()}</button>`,
          )
          .join("");
        return `<div class="cell"><span>${cell.task}/${cell.stage}</span>${options}</div>`;
      })
      .join("");
  }

  if (state.pendingForm && (!form || form.cid !== state.pendingForm.cid)) {
    form = makeForm(state.pendingForm.cid, state.pendingForm.note, state.pendingForm.slots);
  }
  if (form) {
    formBox.style.display = "block";
    formBox.innerHTML =
      `<div class="note">${form.note}</div>` +
      form.slots
        .map((s) => {
          const hint = s.kind === "choice" ? s.choices.map((c, i) => `${i}: ${c}`).join(" | ") : s.kind;
          return `<label>${s.prompt} <i>(${hint})</i>` +
            `<input data-slot="${s.name}" value="${form!.values[s.name] ?? ""}"></label>`;
        })
        .join("") +
      `<button id="form-send">answer</button>`;
  } else {
    formBox.style.display = "none";
    formBox.innerHTML = "";
  }
}

canvas.addEventListener("mousedown", (e) => {
  dragStart = [e.offsetX, e.offsetY];
});

canvas.addEventListener("mouseup", (e) => {
  if (!dragStart) return;
  const t = transform();
  const [x1, y1] = toMap(t, dragStart[0], dragStart[1]);
  const [x2, y2] = toMap(t, e.offsetX, e.offsetY);
  dragStart = null;
  if (Math.hypot(x2 - x1, y2 - y1) < 5) {
    lastGesture = { kind: "click", x: x1, y: y1 };
    if (toolSelect.value === "beacon") {
      commandInput.value = commandInput.value || "place beacon spot here";
    }
  } else {
    lastGesture = { kind: "drag", x: x1, y: y1, x2, y2 };
    if (toolSelect.value === "zone") {
      const params = dragToZoneParams(x1, y1, x2, y2);
      commandInput.value =
        commandInput.value ||
        `define zone area at ${params.cx.toFixed(0)} ${params.cy.toFixed(0)} ` +
          `direction ${params.directionDeg.toFixed(0)} range ${params.rangeM.toFixed(0)}`;
    }
  }
});

commandInput.addEventListener("keydown", (e) => {
  if (e.key !== "Enter" || !commandInput.value.trim()) return;
  const frame = makeUtteranceFrame(0, commandInput.value.trim(), client.nextCid(), lastGesture);
  client.send(frame);
  commandInput.value = "";
  lastGesture = undefined;
});

formBox.addEventListener("input", (e) => {
  const target = e.target as HTMLInputElement;
  if (form && target.dataset.slot) form.values[target.dataset.slot] = target.value;
});

formBox.addEventListener("click", (e) => {
  const target = e.target as HTMLElement;
  if (target.id !== "form-send" || !form) return;
  const check = validateForm(form);
  if (!check.ok) {
    bannerBox.textContent = `fill: ${check.missing.join(", ")}`;
    bannerBox.style.display = "block";
    return;
  }
  client.send(makeCompletionResponseFrame(0, form.cid ?? client.nextCid(), check.parsed));
  client.state.pendingForm = null;
  form = null;
  render();
});

modeBox.addEventListener("click", (e) => {
  const target = e.target as HTMLElement;
  const { task, stage, mode } = target.dataset;
  if (task && stage && mode) {
    client.send(makeModeChangeFrame(0, client.nextCid(), task, stage, mode));
  }
});

for (const name of ["urgency", "presence", "blocked"] as const) {
  const box = document.getElementById(`overlay-${name}`) as HTMLInputElement;
  box.checked = client.state.overlays[name];
  box.addEventListener("change", () => {
    client.state.overlays[name] = box.checked;
    render();
  });
}

client.onChange(render);
client.connect();
render();
