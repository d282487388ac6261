/** Wire schema the console speaks: one JSON object per frame,
 * {type, seq, timestamp, payload}.
 *
 * Client types: pose_target, device_twist, gripper, speed_mode, anchor,
 * task_control. Server types: state, ack, error, config. The parser here
 * validates server frames structurally; outgoing payloads are built by
 * typed constructors so malformed sends cannot be expressed.
 */

import type { Quat, Vec3 } from "./math3d.js";

export type GripperAction = "open" | "close" | "toggle";
export type GripperSource = "voice" | "button" | "double_tap";
export type SpeedModeName = "normal" | "slow";
export type TaskCommand = "start" | "reset" | "second_attempt";

export interface PosePayload {
  position: Vec3;
  orientation: Quat;
}

export interface MessageBody {
  type: string;
  payload: Record<string, unknown>;
}

export interface WireFrame extends MessageBody {
  seq: number;
  timestamp: number;
}

export class ProtocolError extends Error {
  readonly field: string;

  constructor(message: string, field: string) {
    super(message);
    this.field = field;
  }
}

// ---------------------------------------------------------------------------
// Outgoing message constructors

export function poseTarget(position: Vec3, orientation: Quat, engaged: boolean): MessageBody {
  return {
    type: "pose_target",
    payload: { position: [...position], orientation: [...orientation], engaged },
  };
}

export function deviceTwist(translation: Vec3, rotation: Vec3, button: boolean): MessageBody {
  for (const [name, v] of [["translation", translation], ["rotation", rotation]] as const) {
    if (v.some((x) => !Number.isFinite(x) || Math.abs(x) > 1)) {
      throw new ProtocolError(`device_twist: '${name}' components must be within [-1, 1]`, name);
    }
  }
  return { type: "device_twist", payload: { translation: [...translation], rotation: [...rotation], button } };
}

export function gripper(action: GripperAction, source: GripperSource): MessageBody {
  return { type: "gripper", payload: { action, source } };
}

export function speedMode(mode: SpeedModeName): MessageBody {
  return { type: "speed_mode", payload: { mode } };
}

export function anchor(pairs: Array<[Vec3, Vec3]>): MessageBody {
  return {
    type: "anchor",
    payload: { pairs: pairs.map(([d, r]) => [[...d], [...r]]) },
  };
}

export function taskControl(task: string, command: TaskCommand): MessageBody {
  return { type: "task_control", payload: { task, command } };
}

export function encodeFrame(frame: WireFrame): string {
  return JSON.stringify({
    type: frame.type,
    seq: frame.seq,
    timestamp: frame.timestamp,
    payload: frame.payload,
  });
}

// ---------------------------------------------------------------------------
// Incoming (server) frames

export interface AckFrame {
  type: "ack";
  seq: number;
  timestamp: number;
  payload: { seq: number; info?: Record<string, unknown> };
}

export interface ErrorFrame {
  type: "error";
  seq: number;
  timestamp: number;
  payload: { code: string; detail: string };
}

export interface TaskProgress {
  task: string;
  cleared: number;
  total: number;
  trial_active: boolean;
  attempts: number;
  score: number | null;
}

export interface StatePayload {
  time: number;
  joints: number[];
  tool: PosePayload;
  gripper: "open" | "closed";
  engaged: boolean;
  speed_mode: SpeedModeName;
  task_progress: TaskProgress;
  anchored: boolean;
  held: string | null;
  objects: Record<string, PosePayload>;
  stale_drops: number;
  clamp_events: number;
}

export interface StateFrame {
  type: "state";
  seq: number;
  timestamp: number;
  payload: StatePayload;
}

export interface JointConfig {
  axis: Vec3;
  offset: PosePayload;
  limits: [number, number];
  velocity_limit: number;
}

export interface ChainConfig {
  name: string;
  joints: JointConfig[];
  tool: PosePayload;
}

export interface SceneConfig {
  id: string;
  time_limit: number;
  start_joints: number[];
  objects: Array<{ id: string; position: Vec3; orientation: Quat }>;
  checkpoints: Array<Record<string, unknown>>;
}

export interface ConfigPayload {
  chain: ChainConfig;
  scene: SceneConfig;
  control_rate: number;
  broadcast_rate: number;
  limits: {
    v_max: number;
    w_max: number;
    slow_factor: number;
    ramp_radius: number;
    ramp_angle: number;
  };
  watchdog: number | null;
}

export interface ConfigFrame {
  type: "config";
  seq: number;
  timestamp: number;
  payload: ConfigPayload;
}

export type ServerFrame = AckFrame | ErrorFrame | StateFrame | ConfigFrame;

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function numberField(obj: Record<string, unknown>, name: string, ctx: string): number {
  const v = obj[name];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`${ctx}: field '${name}' must be a finite number`, name);
  }
  return v;
}

function vectorField(obj: Record<string, unknown>, name: string, len: number, ctx: string): number[] {
  const v = obj[name];
  if (!Array.isArray(v) || v.length !== len || v.some((x) => typeof x !== "number")) {
    throw new ProtocolError(`${ctx}: field '${name}' must be a list of ${len} numbers`, name);
  }
  return v as number[];
}

function poseField(obj: Record<string, unknown>, name: string, ctx: string): PosePayload {
  const v = obj[name];
  if (!isRecord(v)) throw new ProtocolError(`${ctx}: field '${name}' must be an object`, name);
  return {
    position: vectorField(v, "position", 3, `${ctx}.${name}`) as Vec3,
    orientation: vectorField(v, "orientation", 4, `${ctx}.${name}`) as Quat,
  };
}

/** Decode and structurally validate one server frame. */
export function parseServerFrame(raw: string): ServerFrame {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch (e) {
    throw new ProtocolError(`invalid JSON: ${String(e)}`, "");
  }
  if (!isRecord(doc)) throw new ProtocolError("frame must be a JSON object", "");
  const type = doc["type"];
  if (typeof type !== "string") throw new ProtocolError("missing or non-string 'type'", "type");
  const seq = doc["seq"];
  if (typeof seq !== "number" || !Number.isInteger(seq)) {
    throw new ProtocolError(`${type}: 'seq' must be an integer`, "seq");
  }
  const timestamp = doc["timestamp"];
  if (typeof timestamp !== "number" || !Number.isFinite(timestamp)) {
    throw new ProtocolError(`${type}: 'timestamp' must be a number`, "timestamp");
  }
  const payload = doc["payload"];
  if (!isRecord(payload)) throw new ProtocolError(`${type}: payload must be an object`, "payload");

  if (type === "ack") {
    const acked = payload["seq"];
    if (typeof acked !== "number" || !Number.isInteger(acked)) {
      throw new ProtocolError("ack: payload 'seq' must be an integer", "seq");
    }
    return { type, seq, timestamp, payload: payload as AckFrame["payload"] };
  }
  if (type === "error") {
    if (typeof payload["code"] !== "string" || typeof payload["detail"] !== "string") {
      throw new ProtocolError("error: payload needs string 'code' and 'detail'", "code");
    }
    return { type, seq, timestamp, payload: payload as ErrorFrame["payload"] };
  }
  if (type === "state") {
    numberField(payload, "time", "state");
    const joints = payload["joints"];
    if (!Array.isArray(joints) || joints.some((x) => typeof x !== "number")) {
      throw new ProtocolError("state: field 'joints' must be a list of numbers", "joints");
    }
    poseField(payload, "tool", "state");
    for (const name of ["gripper", "speed_mode"]) {
      if (typeof payload[name] !== "string") {
        throw new ProtocolError(`state: field '${name}' must be a string`, name);
      }
    }
    if (typeof payload["engaged"] !== "boolean" || typeof payload["anchored"] !== "boolean") {
      throw new ProtocolError("state: 'engaged' and 'anchored' must be booleans", "engaged");
    }
    if (!isRecord(payload["task_progress"])) {
      throw new ProtocolError("state: field 'task_progress' must be an object", "task_progress");
    }
    return { type, seq, timestamp, payload: payload as unknown as StatePayload };
  }
  if (type === "config") {
    const chain = payload["chain"];
    if (!isRecord(chain) || !Array.isArray(chain["joints"])) {
      throw new ProtocolError("config: field 'chain' must carry a joint list", "chain");
    }
    if (!isRecord(payload["scene"]) || !isRecord(payload["limits"])) {
      throw new ProtocolError("config: needs 'scene' and 'limits' objects", "scene");
    }
    numberField(payload, "control_rate", "config");
    return { type, seq, timestamp, payload: payload as unknown as ConfigPayload };
  }
  throw new ProtocolError(`unknown server frame type '${type}'`, "type");
}
