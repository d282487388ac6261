"""Websocket front end for the teleoperation runtime.

One runtime, many connections: the first connection holds the operator role
(its messages drive the arm); later concurrent connections are read-only
viewers that still receive every state broadcast. All outbound traffic for
a connection flows through one bounded queue that drops the oldest snapshot
on overflow, so a slow viewer can never stall the control loop.

Two clocks are offered. In the default message-clocked mode the simulation
advances to each incoming message's timestamp before the message applies,
which makes a scripted client session exactly reproducible. With
realtime=True a pacer task drives ticks on an absolute wall-clock schedule
(jitter does not accumulate) and client timestamps only order the messages.
"""

from __future__ import annotations

import asyncio
import contextlib

import numpy as np
from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .bridge import TeleopRuntime, _salvage_seq
from .errors import ProtocolError
from .protocol import WireMessage, error_message, parse_message

DEFAULT_PORT = 8765
DEFAULT_QUEUE_LIMIT = 64
DEFAULT_MAX_CATCHUP = 60.0  # s: largest forward timestamp jump honored per message


class BridgeServer:
    def __init__(self, runtime: TeleopRuntime, host: str = "127.0.0.1",
                 port: int = DEFAULT_PORT, realtime: bool = False,
                 queue_limit: int = DEFAULT_QUEUE_LIMIT,
                 max_catchup: float = DEFAULT_MAX_CATCHUP):
        self.runtime = runtime
        self.host = host
        self.port = port
        self.realtime = realtime
        self.queue_limit = queue_limit
        self.max_catchup = max_catchup
        self._clients: dict = {}
        self._operator = None
        self._server = None
        self._stop = asyncio.Event()
        self.started = asyncio.Event()  # set once the listener is bound

    # -- lifecycle -----------------------------------------------------------

    async def run(self) -> None:
        """Serve until request_stop(); closes the runtime (flushing any
        demo recording) on the way out."""
        async with ws_serve(self._handler, self.host, self.port) as server:
            self._server = server
            self.started.set()
            pacer = asyncio.create_task(self._pacer()) if self.realtime else None
            try:
                await self._stop.wait()
            finally:
                if pacer is not None:
                    pacer.cancel()
                    with contextlib.suppress(asyncio.CancelledError):
                        await pacer
                self.runtime.close()

    def request_stop(self) -> None:
        self._stop.set()

    @property
    def bound_port(self) -> int:
        sockets = self._server.sockets if self._server is not None else []
        return sockets[0].getsockname()[1] if sockets else self.port

    # -- connections -----------------------------------------------------------

    async def _handler(self, conn) -> None:
        queue: asyncio.Queue = asyncio.Queue(maxsize=self.queue_limit)
        self._clients[conn] = queue
        sender = asyncio.create_task(self._sender(conn, queue))
        is_operator = self._operator is None
        if is_operator:
            self._operator = conn
            self.runtime.reset_gate()
        self._push(queue, self.runtime.config_message())
        self._push(queue, self.runtime.state_message())
        try:
            async for raw in conn:
                if isinstance(raw, bytes):
                    raw = raw.decode("utf-8", "replace")
                self._receive(queue, raw, is_operator)
                self._flush_outbox()
        except ConnectionClosed:
            pass
        finally:
            del self._clients[conn]
            if self._operator is conn:
                self._operator = None
                self.runtime.disengage()
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender

    def _receive(self, queue: asyncio.Queue, raw: str, is_operator: bool) -> None:
        now = self.runtime.state.sim_time
        if not is_operator:
            self._push(queue, error_message(
                _salvage_seq(raw), now, "read_only",
                "another operator connection is active",
            ))
            return
        try:
            msg = parse_message(raw)
        except ProtocolError as e:
            self._push(queue, error_message(_salvage_seq(raw), now, "bad_message", str(e)))
            return
        if not self.realtime:
            jump = self._advance_clock(msg.timestamp)
            if jump is not None:
                self._push(queue, jump_error(msg, jump))
                return
        self._push(queue, self.runtime.deliver(msg))

    def _advance_clock(self, timestamp: float) -> float | None:
        """Run ticks until the simulation reaches the message's timestamp.
        Returns the jump size if it exceeds the catch-up bound (rejected)."""
        rate = self.runtime.config.control_rate
        target = int(np.ceil(timestamp * rate - 1e-9))
        pending = target - self.runtime.ticks
        if pending > self.max_catchup * rate:
            return pending / rate
        while self.runtime.ticks < target:
            self.runtime.tick()
        return None

    # -- outbound --------------------------------------------------------------

    def _push(self, queue: asyncio.Queue, msg: WireMessage) -> None:
        if queue.full():
            queue.get_nowait()  # slow consumer: drop the oldest snapshot
        queue.put_nowait(msg)

    def _flush_outbox(self) -> None:
        for msg in self.runtime.take_outbox():
            for queue in self._clients.values():
                self._push(queue, msg)

    async def _sender(self, conn, queue: asyncio.Queue) -> None:
        with contextlib.suppress(ConnectionClosed):
            while True:
                msg = await queue.get()
                await conn.send(msg.to_json())

    async def _pacer(self) -> None:
        """Wall-clock tick driver for realtime mode. Targets are absolute
        (t0 + k/rate), so one late tick does not delay the rest."""
        loop = asyncio.get_running_loop()
        rate = self.runtime.config.control_rate
        t0 = loop.time()
        tick0 = self.runtime.ticks
        while not self._stop.is_set():
            target = t0 + (self.runtime.ticks - tick0 + 1) / rate
            delay = target - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            self.runtime.tick()
            self._flush_outbox()


def jump_error(msg, jump: float) -> WireMessage:
    return error_message(
        msg.seq, msg.timestamp, "timestamp_jump",
        f"timestamp {jump:.1f}s ahead of the simulation clock; "
        "use session-relative timestamps",
    )


async def serve_until_interrupt(server: BridgeServer) -> None:
    """Run a server until SIGINT/SIGTERM (or request_stop)."""
    import signal

    loop = asyncio.get_running_loop()
    for sig in (signal.SIGINT, signal.SIGTERM):
        with contextlib.suppress(NotImplementedError):
            loop.add_signal_handler(sig, server.request_stop)
    await server.run()
