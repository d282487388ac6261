/** Browser bootstrap: wires the websocket client, operator session, drag
 * controller, button bar, and canvas renderer together. All side effects
 * live here; the modules above stay testable headlessly.
 */

import { ConsoleClient } from "./client.js";
import { DragController } from "./drag.js";
import { EventQueue } from "./queue.js";
import { OperatorSession } from "./session.js";
import { defaultView, drawScene } from "./render.js";
import type { Vec3 } from "./math3d.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("scene");
const ctx = canvas.getContext("2d");
if (!ctx) throw new Error("2d canvas unavailable");
const statusLine = el<HTMLElement>("status");
const logLine = el<HTMLElement>("log");

const queue = new EventQueue();
const url = `ws://${location.hostname || "127.0.0.1"}:8765`;
const client = new ConsoleClient(url, (u) => new WebSocket(u), queue);

const t0 = performance.now();
const clock = () => (performance.now() - t0) / 1000;

let banner: string | null = "connecting...";
let controlEnabled = false; // "Sync Control" begins accepting drag input

const session = new OperatorSession(client, clock, {
  onError(frame) {
    logLine.textContent = `error ${frame.payload.code}: ${frame.payload.detail}`;
  },
  onAck(frame, sent) {
    if (sent?.type === "anchor") {
      const info = frame.payload.info as { residual?: number } | undefined;
      logLine.textContent = `anchored (residual ${info?.residual?.toExponential(2) ?? "?"})`;
    }
  },
  onDropped(_body, reason) {
    logLine.textContent = `not sent: ${reason}`;
  },
});

const drag = new DragController(session, clock);
drag.enabled = false;

client.onOpen = () => {
  banner = null;
  statusLine.textContent = "connected";
};
client.onClose = () => {
  banner = "disconnected; drag disabled";
  statusLine.textContent = "disconnected";
  drag.connectionLost();
};
client.onFrame = (raw) => session.handleRaw(raw);
client.connect();

// the digital twin and the simulator share one frame here, so anchoring
// uses four identity-mapped reference points around the base
const ANCHOR_POINTS: Vec3[] = [
  [0, 0, 0],
  [0.2, 0, 0],
  [0, 0.2, 0],
  [0, 0, 0.2],
];

el<HTMLButtonElement>("btn-anchor").onclick = () =>
  queue.push(() => session.requestAnchor(ANCHOR_POINTS.map((p) => [p, p])));
el<HTMLButtonElement>("btn-sync").onclick = () =>
  queue.push(() => {
    controlEnabled = !controlEnabled;
    drag.enabled = controlEnabled;
    logLine.textContent = controlEnabled ? "control enabled" : "control paused";
  });
el<HTMLButtonElement>("btn-remove").onclick = () =>
  queue.push(() => {
    controlEnabled = false;
    drag.enabled = false;
    drag.cancel();
    logLine.textContent = "twin hidden; control paused";
  });
el<HTMLButtonElement>("btn-open").onclick = () => queue.push(() => session.gripperButton("open"));
const closeBtn = el<HTMLButtonElement>("btn-close");
closeBtn.onclick = () => queue.push(() => session.gripperButton("close"));
closeBtn.ondblclick = () => queue.push(() => session.gripperDoubleTap());
el<HTMLButtonElement>("btn-slow").onclick = () =>
  queue.push(() => {
    const next = session.latestState?.speed_mode === "slow" ? "normal" : "slow";
    session.setSpeedMode(next);
  });
el<HTMLButtonElement>("btn-start").onclick = () => queue.push(() => session.sendTaskCommand("start"));
el<HTMLButtonElement>("btn-reset").onclick = () => queue.push(() => session.sendTaskCommand("reset"));
el<HTMLButtonElement>("btn-again").onclick = () =>
  queue.push(() => session.sendTaskCommand("second_attempt"));

const voiceBox = el<HTMLInputElement>("voice");
voiceBox.onkeydown = (ev) => {
  if (ev.key === "Enter") {
    const text = voiceBox.value;
    voiceBox.value = "";
    queue.push(() => session.voiceGripper(text));
  }
};

canvas.onpointerdown = (ev) =>
  queue.push(() => {
    canvas.setPointerCapture(ev.pointerId);
    drag.pointerDown(ev.offsetX, ev.offsetY);
  });
canvas.onpointermove = (ev) =>
  queue.push(() =>
    drag.pointerMove(ev.offsetX, ev.offsetY, { depth: ev.shiftKey, rotate: ev.altKey }),
  );
canvas.onpointerup = () => queue.push(() => drag.pointerUp());
canvas.onpointercancel = () => queue.push(() => drag.cancel());
window.onblur = () => queue.push(() => drag.cancel());

const view = defaultView(canvas.width, canvas.height);

function frame(): void {
  queue.push(() => drag.tick()); // keep engaged frames flowing while held
  drawScene(ctx!, view, session.config?.chain ?? null, session.latestState, {
    banner,
    spherePose: drag.spherePose,
  });
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
