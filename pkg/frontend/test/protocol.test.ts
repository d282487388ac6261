/** Wire schema construction and server-frame parsing. */

import { describe, expect, it } from "vitest";

import {
  ProtocolError,
  anchor,
  deviceTwist,
  encodeFrame,
  gripper,
  parseServerFrame,
  poseTarget,
  speedMode,
  taskControl,
} from "../src/protocol.js";
import { ackFrame, configFrame, errorFrame, stateFrame } from "./helpers.js";

describe("outgoing constructors", () => {
  it("pose_target copies its vectors", () => {
    const pos: [number, number, number] = [0.1, 0.2, 0.3];
    const body = poseTarget(pos, [1, 0, 0, 0], true);
    pos[0] = 99;
    expect(body.payload).toEqual({ position: [0.1, 0.2, 0.3], orientation: [1, 0, 0, 0], engaged: true });
  });

  it("device_twist rejects out-of-range axes with the field name", () => {
    expect(() => deviceTwist([0, 1.2, 0], [0, 0, 0], false)).toThrowError(ProtocolError);
    try {
      deviceTwist([0, 0, 0], [0, 0, -2], true);
      expect.unreachable();
    } catch (e) {
      expect((e as ProtocolError).field).toBe("rotation");
    }
  });

  it("anchor deep-copies the pairs", () => {
    const device: [number, number, number] = [1, 2, 3];
    const body = anchor([[device, [4, 5, 6]]]);
    device[0] = 0;
    expect(body.payload["pairs"]).toEqual([[[1, 2, 3], [4, 5, 6]]]);
  });

  it("remaining constructors produce the documented payloads", () => {
    expect(gripper("toggle", "double_tap").payload).toEqual({ action: "toggle", source: "double_tap" });
    expect(speedMode("slow").payload).toEqual({ mode: "slow" });
    expect(taskControl("POUR", "second_attempt").payload).toEqual({ task: "POUR", command: "second_attempt" });
  });

  it("encodeFrame emits the envelope in canonical order", () => {
    const raw = encodeFrame({ type: "speed_mode", seq: 7, timestamp: 1.5, payload: { mode: "slow" } });
    expect(raw).toBe('{"type":"speed_mode","seq":7,"timestamp":1.5,"payload":{"mode":"slow"}}');
  });
});

describe("server frame parsing", () => {
  it("parses the four server types", () => {
    expect(parseServerFrame(ackFrame(3)).type).toBe("ack");
    expect(parseServerFrame(errorFrame(4, "bad_seq", "dup")).type).toBe("error");
    const state = parseServerFrame(stateFrame({ time: 2.5 }));
    expect(state.type).toBe("state");
    if (state.type === "state") expect(state.payload.time).toBe(2.5);
    const config = parseServerFrame(configFrame(50));
    expect(config.type).toBe("config");
    if (config.type === "config") expect(config.payload.control_rate).toBe(50);
  });

  it("ack info rides through untouched", () => {
    const frame = parseServerFrame(ackFrame(9, { residual: 1.5e-12 }));
    if (frame.type !== "ack") expect.unreachable();
    expect(frame.payload.info).toEqual({ residual: 1.5e-12 });
  });

  const bad: Array<[string, string, string]> = [
    ["not json at all", "{oops", ""],
    ["non-object", "[1, 2]", ""],
    ["missing type", '{"seq": 1, "timestamp": 0, "payload": {}}', "type"],
    ["unknown type", '{"type": "surprise", "seq": 1, "timestamp": 0, "payload": {}}', "type"],
    ["float seq", '{"type": "ack", "seq": 1.5, "timestamp": 0, "payload": {"seq": 1}}', "seq"],
    ["bad timestamp", '{"type": "ack", "seq": 1, "timestamp": "now", "payload": {"seq": 1}}', "timestamp"],
    ["non-object payload", '{"type": "ack", "seq": 1, "timestamp": 0, "payload": 5}', "payload"],
    ["ack without seq", '{"type": "ack", "seq": 1, "timestamp": 0, "payload": {}}', "seq"],
    ["error without code", '{"type": "error", "seq": 1, "timestamp": 0, "payload": {"detail": "x"}}', "code"],
  ];
  it.each(bad)("rejects %s naming the field", (_label, raw, field) => {
    try {
      parseServerFrame(raw);
      expect.unreachable();
    } catch (e) {
      expect(e).toBeInstanceOf(ProtocolError);
      expect((e as ProtocolError).field).toBe(field);
    }
  });

  it("state frames missing structural fields name the culprit", () => {
    const doc = JSON.parse(stateFrame({}));
    delete doc.payload.tool;
    try {
      parseServerFrame(JSON.stringify(doc));
      expect.unreachable();
    } catch (e) {
      expect((e as ProtocolError).field).toBe("tool");
    }
  });

  it("config frames without a chain are rejected", () => {
    const doc = JSON.parse(configFrame());
    delete doc.payload.chain;
    try {
      parseServerFrame(JSON.stringify(doc));
      expect.unreachable();
    } catch (e) {
      expect((e as ProtocolError).field).toBe("chain");
    }
  });
});
