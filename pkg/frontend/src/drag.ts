/** Drag-sphere controller: press-and-hold steers the tool.
 *
 * Pointer down grabs the sphere at the broadcast tool pose; while held,
 * engaged=true pose targets stream at no more than the control rate. The
 * release guarantee: every pointer-up during a drag produces exactly one
 * engaged=false message, bypassing the rate limiter so the stop is never
 * dropped. With the transport closed or the session unanchored, a drag
 * cannot begin and nothing is sent.
 */

import type { PoseLike } from "./math3d.js";
import { clonePose, quatFromAxisAngle, quatMultiply, quatNormalize } from "./math3d.js";
import { poseTarget } from "./protocol.js";
import type { OperatorSession, Clock } from "./session.js";

export interface PointerMods {
  depth?: boolean;
  rotate?: boolean;
}

/** Maps a pointer delta in pixels to an updated sphere pose. */
export type DragMapper = (target: PoseLike, dx: number, dy: number, mods: PointerMods) => PoseLike;

/** Screen plane = world x (right) / z (up); depth modifier moves along y;
 * rotate modifier runs a trackball about the world z then x axes. */
export function orthographicMapper(metersPerPixel = 0.0015, radiansPerPixel = 0.008): DragMapper {
  return (target, dx, dy, mods) => {
    if (mods.rotate) {
      const yaw = quatFromAxisAngle([0, 0, 1], -dx * radiansPerPixel);
      const pitch = quatFromAxisAngle([1, 0, 0], -dy * radiansPerPixel);
      return {
        position: [...target.position],
        orientation: quatNormalize(quatMultiply(quatMultiply(yaw, pitch), target.orientation)),
      };
    }
    const [x, y, z] = target.position;
    if (mods.depth) {
      return { position: [x + dx * metersPerPixel, y - dy * metersPerPixel, z], orientation: [...target.orientation] };
    }
    return { position: [x + dx * metersPerPixel, y, z - dy * metersPerPixel], orientation: [...target.orientation] };
  };
}

export class DragController {
  /** "Sync Control" gate: drag input is ignored until enabled. */
  enabled = true;

  private readonly session: OperatorSession;
  private readonly mapper: DragMapper;
  private readonly now: Clock;
  private dragging = false;
  private target: PoseLike | null = null;
  private lastEngagedSend = -Infinity;
  private lastX = 0;
  private lastY = 0;

  constructor(session: OperatorSession, clock: Clock, mapper: DragMapper = orthographicMapper()) {
    this.session = session;
    this.mapper = mapper;
    this.now = clock;
  }

  get isDragging(): boolean {
    return this.dragging;
  }

  /** Local sphere pose while dragging; callers fall back to the broadcast
   * tool pose when this is null. */
  get spherePose(): PoseLike | null {
    return this.target;
  }

  private intervalSeconds(): number {
    const rate = this.session.config?.control_rate;
    return rate && rate > 0 ? 1 / rate : 0.02;
  }

  pointerDown(x: number, y: number): boolean {
    if (this.dragging) return true;
    if (!this.enabled || !this.session.connected || !this.session.anchored) return false;
    const state = this.session.latestState;
    if (!state) return false;
    this.target = clonePose(state.tool);
    this.dragging = true;
    this.lastX = x;
    this.lastY = y;
    this.emit(true);
    return true;
  }

  pointerMove(x: number, y: number, mods: PointerMods = {}): void {
    if (!this.dragging || !this.target) return;
    this.target = this.mapper(this.target, x - this.lastX, y - this.lastY, mods);
    this.lastX = x;
    this.lastY = y;
    if (this.now() - this.lastEngagedSend >= this.intervalSeconds() - 1e-9) this.emit(true);
  }

  /** Re-sends the held pose while the pointer is pressed but idle. */
  tick(): void {
    if (!this.dragging) return;
    if (this.now() - this.lastEngagedSend >= this.intervalSeconds() - 1e-9) this.emit(true);
  }

  pointerUp(): void {
    if (!this.dragging) return;
    this.dragging = false;
    this.emit(false);
    this.target = null;
  }

  /** Pointer capture lost, window blur: same contract as a release. */
  cancel(): void {
    this.pointerUp();
  }

  /** Transport is gone; nothing can or should be sent. */
  connectionLost(): void {
    this.dragging = false;
    this.target = null;
  }

  private emit(engaged: boolean): void {
    if (!this.target) return;
    const seq = this.session.send(
      poseTarget(this.target.position, this.target.orientation, engaged),
    );
    if (engaged && seq !== null) this.lastEngagedSend = this.now();
  }
}
