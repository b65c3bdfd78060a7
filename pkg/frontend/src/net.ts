// WebSocket session with automatic reconnect. Callbacks fire on the browser
// event loop; sends are dropped silently while disconnected so the UI never
// blocks on the network.

import { parseServerFrame, ServerFrame } from "./protocol";

export interface SessionCallbacks {
  onFrame(frame: ServerFrame): void;
  onStatus(connected: boolean): void;
}

const BACKOFF_START_MS = 250;
const BACKOFF_MAX_MS = 4000;

export class TeleopSession {
  private socket: WebSocket | null = null;
  private backoffMs = BACKOFF_START_MS;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly callbacks: SessionCallbacks,
  ) {
    this.open();
  }

  private open(): void {
    if (this.closed) return;
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoffMs = BACKOFF_START_MS;
      this.callbacks.onStatus(true);
    };
    socket.onmessage = (event) => {
      if (typeof event.data !== "string") return;
      const frame = parseServerFrame(event.data);
      if (frame !== null) this.callbacks.onFrame(frame);
    };
    socket.onclose = () => {
      this.socket = null;
      this.callbacks.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.open(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
      }
    };
    socket.onerror = () => {
      socket.close();
    };
  }

  send(payload: string): boolean {
    if (this.socket !== null && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(payload);
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}

export function defaultServerUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/ws`;
}
