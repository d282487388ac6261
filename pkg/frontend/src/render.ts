/** Canvas renderer: oblique projection of the arm (drawn from broadcast
 * joints through the served chain config), the translucent control sphere,
 * scene objects, and a HUD line. Pure drawing; no network or DOM wiring.
 */

import type { ChainConfig, StatePayload } from "./protocol.js";
import type { PoseLike, Vec3 } from "./math3d.js";
import { jointFrames } from "./fk.js";

export interface View {
  width: number;
  height: number;
  scale: number; // px per meter
  originX: number;
  originY: number;
}

export function defaultView(width: number, height: number): View {
  return { width, height, scale: 420, originX: width / 2, originY: height * 0.78 };
}

/** Oblique projection: x right, z up, y recedes toward upper-left. */
export function project(view: View, p: Vec3): [number, number] {
  const px = view.originX + view.scale * (p[0] - 0.35 * p[1]);
  const py = view.originY - view.scale * (p[2] + 0.25 * p[1]);
  return [px, py];
}

/** The 2D context subset the renderer touches (easy to fake in tests). */
export interface Canvas2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
}

export interface Overlay {
  banner: string | null;
  spherePose: PoseLike | null; // local pose while dragging
}

function circle(ctx: Canvas2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
}

export function drawScene(
  ctx: Canvas2D,
  view: View,
  chain: ChainConfig | null,
  state: StatePayload | null,
  overlay: Overlay,
): void {
  ctx.clearRect(0, 0, view.width, view.height);
  ctx.globalAlpha = 1;
  ctx.font = "13px monospace";

  if (chain === null || state === null) {
    ctx.fillStyle = "#888";
    ctx.fillText(overlay.banner ?? "waiting for server config...", 16, 24);
    return;
  }

  // ground reference cross at the base
  const [bx, by] = project(view, [0, 0, 0]);
  ctx.strokeStyle = "#444";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(bx - 40, by);
  ctx.lineTo(bx + 40, by);
  ctx.stroke();

  // arm links through the joint frame origins
  const frames = jointFrames(chain, state.joints);
  ctx.strokeStyle = "#d8d8d8";
  ctx.lineWidth = 4;
  ctx.beginPath();
  ctx.moveTo(bx, by);
  for (const f of frames) {
    const [x, y] = project(view, f.position);
    ctx.lineTo(x, y);
  }
  ctx.stroke();
  ctx.fillStyle = "#9ad";
  for (const f of frames.slice(0, -1)) {
    const [x, y] = project(view, f.position);
    circle(ctx, x, y, 4);
    ctx.fill();
  }

  // scene objects and the held marker
  for (const [oid, pose] of Object.entries(state.objects)) {
    const [x, y] = project(view, pose.position);
    ctx.fillStyle = state.held === oid ? "#fc6" : "#c96";
    ctx.beginPath();
    ctx.rect(x - 6, y - 6, 12, 12);
    ctx.fill();
    ctx.fillText(oid, x + 8, y - 8);
  }

  // control sphere: local pose while dragging, broadcast tool pose otherwise
  const sphere = overlay.spherePose ?? state.tool;
  const [sx, sy] = project(view, sphere.position);
  ctx.globalAlpha = 0.45;
  ctx.fillStyle = overlay.spherePose ? "#6cf" : "#8f8";
  circle(ctx, sx, sy, 14);
  ctx.fill();
  ctx.globalAlpha = 1;
  ctx.strokeStyle = state.gripper === "closed" ? "#f66" : "#6f6";
  ctx.lineWidth = 2;
  circle(ctx, sx, sy, 14);
  ctx.stroke();

  // HUD
  const tp = state.task_progress;
  const hud = [
    `t=${state.time.toFixed(2)}s`,
    `task ${tp.task} ${tp.cleared}/${tp.total}` + (tp.score !== null ? ` score=${tp.score}` : ""),
    `gripper=${state.gripper}`,
    `speed=${state.speed_mode}`,
    state.engaged ? "ENGAGED" : "idle",
    state.anchored ? "anchored" : "NOT ANCHORED",
  ].join("  ");
  ctx.fillStyle = "#eee";
  ctx.fillText(hud, 16, 24);
  if (overlay.banner) {
    ctx.fillStyle = "#f88";
    ctx.fillText(overlay.banner, 16, 44);
  }
}
