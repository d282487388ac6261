"""Wire protocol: message envelopes, per-type payload validation, and the
line-delimited encoding used for sockets, trajectory files, and demo logs.

Every frame is one JSON object:

    {"type": ..., "seq": <int>, "timestamp": <s>, "payload": {...}}

Client-to-server types: pose_target, device_twist, gripper, speed_mode,
anchor, task_control. Server-to-client: state, ack, error, config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ProtocolError

CLIENT_TYPES = ("pose_target", "device_twist", "gripper", "speed_mode", "anchor", "task_control")
SERVER_TYPES = ("state", "ack", "error", "config")


@dataclass(frozen=True)
class WireMessage:
    type: str
    seq: int
    timestamp: float
    payload: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "type": self.type,
            "seq": self.seq,
            "timestamp": self.timestamp,
            "payload": self.payload,
        })


def _require(payload: dict, name: str, kind, msg_type: str):
    if name not in payload:
        raise ProtocolError(f"{msg_type}: missing payload field '{name}'", field=name)
    value = payload[name]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ProtocolError(f"{msg_type}: field '{name}' must be a number", field=name)
        return float(value)
    if not isinstance(value, kind):
        raise ProtocolError(
            f"{msg_type}: field '{name}' must be {kind.__name__}", field=name
        )
    return value


def _require_vector(payload: dict, name: str, length: int, msg_type: str) -> list:
    v = _require(payload, name, list, msg_type)
    if len(v) != length or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        raise ProtocolError(
            f"{msg_type}: field '{name}' must be a list of {length} numbers", field=name
        )
    return [float(x) for x in v]


def _require_choice(payload: dict, name: str, choices, msg_type: str) -> str:
    v = _require(payload, name, str, msg_type)
    if v not in choices:
        raise ProtocolError(
            f"{msg_type}: field '{name}' must be one of {sorted(choices)}", field=name
        )
    return v


def validate_payload(msg_type: str, payload) -> dict:
    """Check a client payload against its schema; returns a normalized copy.

    Raises ProtocolError naming the offending field. Unknown types raise
    with field='type' so callers can reply and keep the connection alive.
    """
    if not isinstance(payload, dict):
        raise ProtocolError(f"{msg_type}: payload must be an object", field="payload")

    if msg_type == "pose_target":
        return {
            "position": _require_vector(payload, "position", 3, msg_type),
            "orientation": _require_vector(payload, "orientation", 4, msg_type),
            "engaged": _require(payload, "engaged", bool, msg_type),
        }
    if msg_type == "device_twist":
        out = {
            "translation": _require_vector(payload, "translation", 3, msg_type),
            "rotation": _require_vector(payload, "rotation", 3, msg_type),
            "button": _require(payload, "button", bool, msg_type),
        }
        for name in ("translation", "rotation"):
            if any(abs(x) > 1.0 for x in out[name]):
                raise ProtocolError(
                    f"{msg_type}: field '{name}' components must be within [-1, 1]",
                    field=name,
                )
        return out
    if msg_type == "gripper":
        return {
            "action": _require_choice(payload, "action", ("open", "close", "toggle"), msg_type),
            "source": _require_choice(payload, "source", ("voice", "button", "double_tap"), msg_type),
        }
    if msg_type == "speed_mode":
        return {"mode": _require_choice(payload, "mode", ("normal", "slow"), msg_type)}
    if msg_type == "anchor":
        pairs = _require(payload, "pairs", list, msg_type)
        norm = []
        for i, pair in enumerate(pairs):
            if (
                not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(p, list) and len(p) == 3 for p in pair)
            ):
                raise ProtocolError(
                    f"anchor: pairs[{i}] must be [[x,y,z],[x,y,z]]", field="pairs"
                )
            norm.append([[float(x) for x in pair[0]], [float(x) for x in pair[1]]])
        return {"pairs": norm}
    if msg_type == "task_control":
        return {
            "task": _require(payload, "task", str, msg_type),
            "command": _require_choice(
                payload, "command", ("start", "reset", "second_attempt"), msg_type
            ),
        }
    raise ProtocolError(f"unknown message type '{msg_type}'", field="type")


def parse_message(raw: str | dict) -> WireMessage:
    """Decode and validate one wire frame (client direction)."""
    if isinstance(raw, str):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ProtocolError(f"invalid JSON: {e}", field="") from e
    else:
        doc = raw
    if not isinstance(doc, dict):
        raise ProtocolError("message must be a JSON object", field="")
    msg_type = doc.get("type")
    if not isinstance(msg_type, str):
        raise ProtocolError("missing or non-string 'type'", field="type")
    seq = doc.get("seq")
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise ProtocolError(f"{msg_type}: 'seq' must be an integer", field="seq")
    ts = doc.get("timestamp")
    if not isinstance(ts, (int, float)) or isinstance(ts, bool):
        raise ProtocolError(f"{msg_type}: 'timestamp' must be a number", field="timestamp")
    payload = validate_payload(msg_type, doc.get("payload", {}))
    return WireMessage(type=msg_type, seq=seq, timestamp=float(ts), payload=payload)


def ack_message(seq: int, timestamp: float, info: dict | None = None) -> WireMessage:
    payload = {"seq": seq}
    if info:
        payload["info"] = info
    return WireMessage("ack", seq, timestamp, payload)


def error_message(seq: int, timestamp: float, code: str, detail: str) -> WireMessage:
    return WireMessage("error", seq, timestamp, {"code": code, "detail": detail})


class SequenceGate:
    """Enforces strictly increasing seq numbers on one connection/stream."""

    def __init__(self):
        self.last_seq: int | None = None

    def admit(self, seq: int) -> None:
        if self.last_seq is not None and seq <= self.last_seq:
            raise ProtocolError(
                f"duplicate or regressing seq {seq} (last was {self.last_seq})",
                field="seq",
            )
        self.last_seq = seq
