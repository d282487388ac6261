/** Websocket transport with an injected socket constructor, so the browser
 * passes window.WebSocket and tests pass the ws package. Every socket
 * callback is pushed through the shared event queue; handlers never run
 * re-entrantly with pointer handlers.
 */

import type { EventQueue } from "./queue.js";
import type { Transport } from "./session.js";

export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  // event params typed any so both DOM WebSocket and ws satisfy this shape
  onopen: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;

export class ConsoleClient implements Transport {
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;
  onFrame: ((raw: string) => void) | null = null;

  private sock: SocketLike | null = null;

  constructor(
    private readonly url: string,
    private readonly factory: SocketFactory,
    private readonly queue: EventQueue,
  ) {}

  get open(): boolean {
    return this.sock !== null && this.sock.readyState === OPEN;
  }

  connect(): void {
    const sock = this.factory(this.url);
    this.sock = sock;
    sock.onopen = () => this.queue.push(() => this.onOpen?.());
    sock.onmessage = (ev: { data: unknown }) => {
      const raw = typeof ev.data === "string" ? ev.data : String(ev.data);
      this.queue.push(() => this.onFrame?.(raw));
    };
    sock.onclose = () => this.queue.push(() => this.onClose?.());
    sock.onerror = () => {
      // close follows; the close handler owns the state transition
    };
  }

  send(data: string): void {
    if (!this.open || this.sock === null) throw new Error("socket not open");
    this.sock.send(data);
  }

  close(): void {
    this.sock?.close();
  }
}
