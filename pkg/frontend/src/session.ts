/** Operator session: sequencing, timestamping, and send discipline.
 *
 * All outgoing traffic funnels through send(), which enforces the two
 * console invariants: nothing goes out on a closed transport, and an
 * engaged=true pose target never goes out before a successful anchor
 * acknowledgment. Incoming frames update cached state and resolve the
 * pending record their seq echoes.
 */

import type { MessageBody, WireFrame, AckFrame, ErrorFrame, StateFrame, StatePayload, ConfigPayload, GripperAction, SpeedModeName, TaskCommand } from "./protocol.js";
import { ProtocolError, anchor, encodeFrame, gripper, parseServerFrame, poseTarget, speedMode, taskControl } from "./protocol.js";
import type { Quat, Vec3 } from "./math3d.js";

export interface Transport {
  readonly open: boolean;
  send(data: string): void;
}

export interface SentRecord {
  seq: number;
  type: string;
  body: MessageBody;
}

export interface SessionHooks {
  onState?(state: StatePayload, frame: StateFrame): void;
  onConfig?(config: ConfigPayload): void;
  onAck?(frame: AckFrame, sent?: SentRecord): void;
  onError?(frame: ErrorFrame, sent?: SentRecord): void;
  onSent?(frame: WireFrame): void;
  onDropped?(body: MessageBody, reason: string): void;
}

export type Clock = () => number;

export class OperatorSession {
  readonly hooks: SessionHooks;

  anchored = false;
  config: ConfigPayload | null = null;
  latestState: StatePayload | null = null;
  malformedFrames = 0;

  private readonly transport: Transport;
  private readonly clock: Clock;
  private seq = 0;
  private lastTimestamp = 0;
  private readonly pending = new Map<number, SentRecord>();

  constructor(transport: Transport, clock: Clock, hooks: SessionHooks = {}) {
    this.transport = transport;
    this.clock = clock;
    this.hooks = hooks;
  }

  get connected(): boolean {
    return this.transport.open;
  }

  /** Stamp, log, and transmit one message; null when discipline drops it. */
  send(body: MessageBody): number | null {
    if (!this.transport.open) {
      this.hooks.onDropped?.(body, "disconnected");
      return null;
    }
    if (body.type === "pose_target" && body.payload["engaged"] === true && !this.anchored) {
      this.hooks.onDropped?.(body, "not anchored");
      return null;
    }
    this.seq += 1;
    // timestamps never regress even if the wall clock hiccups
    this.lastTimestamp = Math.max(this.clock(), this.lastTimestamp);
    const frame: WireFrame = {
      type: body.type,
      seq: this.seq,
      timestamp: this.lastTimestamp,
      payload: body.payload,
    };
    this.transport.send(encodeFrame(frame));
    this.pending.set(this.seq, { seq: this.seq, type: body.type, body });
    this.hooks.onSent?.(frame);
    return this.seq;
  }

  /** Feed one raw server frame; malformed input is counted, not fatal. */
  handleRaw(raw: string): void {
    let frame;
    try {
      frame = parseServerFrame(raw);
    } catch (e) {
      if (e instanceof ProtocolError) {
        this.malformedFrames += 1;
        return;
      }
      throw e;
    }
    if (frame.type === "ack") {
      const sent = this.pending.get(frame.seq);
      this.pending.delete(frame.seq);
      if (sent?.type === "anchor") this.anchored = true;
      this.hooks.onAck?.(frame, sent);
      return;
    }
    if (frame.type === "error") {
      const sent = this.pending.get(frame.seq);
      this.pending.delete(frame.seq);
      this.hooks.onError?.(frame, sent);
      return;
    }
    if (frame.type === "state") {
      this.latestState = frame.payload;
      this.anchored = frame.payload.anchored;
      this.hooks.onState?.(frame.payload, frame);
      return;
    }
    this.config = frame.payload;
    this.hooks.onConfig?.(frame.payload);
  }

  // -------------------------------------------------------------------------
  // Menu actions (button bar semantics)

  requestAnchor(pairs: Array<[Vec3, Vec3]>): number | null {
    return this.send(anchor(pairs));
  }

  gripperButton(action: "open" | "close"): number | null {
    return this.send(gripper(action, "button"));
  }

  gripperDoubleTap(): number | null {
    return this.send(gripper("toggle", "double_tap"));
  }

  /** Text command box standing in for voice input. */
  voiceGripper(text: string): number | null {
    const token = text.trim().toLowerCase();
    if (token !== "open" && token !== "close") {
      this.hooks.onDropped?.(gripper("open", "voice"), `unrecognized voice token '${text}'`);
      return null;
    }
    return this.send(gripper(token as GripperAction, "voice"));
  }

  setSpeedMode(mode: SpeedModeName): number | null {
    return this.send(speedMode(mode));
  }

  sendTaskCommand(command: TaskCommand): number | null {
    if (!this.config) {
      this.hooks.onDropped?.(taskControl("", command), "no config received yet");
      return null;
    }
    return this.send(taskControl(this.config.scene.id, command));
  }

  sendPoseTarget(position: Vec3, orientation: Quat, engaged: boolean): number | null {
    return this.send(poseTarget(position, orientation, engaged));
  }
}
