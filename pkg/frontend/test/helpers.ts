/** Shared fakes for the headless tests: a transport that records frames, a
 * manual clock, and factories for structurally valid server frames.
 */

import type { WireFrame } from "../src/protocol.js";
import type { Transport } from "../src/session.js";

export class FakeTransport implements Transport {
  open = true;
  raw: string[] = [];
  frames: WireFrame[] = [];

  send(data: string): void {
    this.raw.push(data);
    this.frames.push(JSON.parse(data) as WireFrame);
  }

  ofType(type: string): WireFrame[] {
    return this.frames.filter((f) => f.type === type);
  }
}

export class ManualClock {
  t = 0;

  now = (): number => this.t;

  set(t: number): void {
    this.t = t;
  }

  advance(dt: number): void {
    this.t += dt;
  }
}

let serverSeq = 1000;

export function ackFrame(seq: number, info?: Record<string, unknown>): string {
  const payload: Record<string, unknown> = { seq };
  if (info) payload["info"] = info;
  return JSON.stringify({ type: "ack", seq, timestamp: 0, payload });
}

export function errorFrame(seq: number, code: string, detail: string): string {
  return JSON.stringify({ type: "error", seq, timestamp: 0, payload: { code, detail } });
}

export interface StateOverrides {
  time?: number;
  joints?: number[];
  tool?: { position: number[]; orientation: number[] };
  anchored?: boolean;
  engaged?: boolean;
  gripper?: string;
  speed_mode?: string;
  held?: string | null;
}

export function stateFrame(overrides: StateOverrides = {}): string {
  serverSeq += 1;
  const payload = {
    time: overrides.time ?? 0,
    joints: overrides.joints ?? [0, 0, 0],
    tool: overrides.tool ?? { position: [0.4, 0.0, 0.3], orientation: [1, 0, 0, 0] },
    gripper: overrides.gripper ?? "open",
    engaged: overrides.engaged ?? false,
    speed_mode: overrides.speed_mode ?? "normal",
    task_progress: { task: "POUR", cleared: 0, total: 7, trial_active: false, attempts: 0, score: null },
    anchored: overrides.anchored ?? false,
    held: overrides.held ?? null,
    objects: {},
    stale_drops: 0,
    clamp_events: 0,
  };
  return JSON.stringify({ type: "state", seq: serverSeq, timestamp: payload.time, payload });
}

export function configFrame(controlRate = 50): string {
  serverSeq += 1;
  const joint = {
    axis: [0, 0, 1],
    offset: { position: [0, 0, 0.2], orientation: [1, 0, 0, 0] },
    limits: [-6.3, 6.3],
    velocity_limit: 1.5,
  };
  const payload = {
    chain: {
      name: "toy",
      joints: [joint, joint, joint],
      tool: { position: [0.1, 0, 0], orientation: [1, 0, 0, 0] },
    },
    scene: { id: "POUR", time_limit: 180, start_joints: [0, 0, 0], objects: [], checkpoints: [] },
    control_rate: controlRate,
    broadcast_rate: 20,
    limits: { v_max: 0.0625, w_max: 0.25, slow_factor: 1 / 3, ramp_radius: 0.05, ramp_angle: 0.2 },
    watchdog: 0.5,
  };
  return JSON.stringify({ type: "config", seq: serverSeq, timestamp: 0, payload });
}
