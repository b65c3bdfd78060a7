import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { TeleopSession } from "../src/net";

// Scripted stand-in for the browser WebSocket: tests trigger open/close/
// message transitions explicitly.
class FakeWebSocket {
  static OPEN = 1;
  static instances: FakeWebSocket[] = [];
  readyState = 0;
  sent: string[] = [];
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;

  constructor(public url: string) {
    FakeWebSocket.instances.push(this);
  }

  open(): void {
    this.readyState = FakeWebSocket.OPEN;
    this.onopen?.();
  }

  deliver(data: string): void {
    this.onmessage?.({ data });
  }

  send(payload: string): void {
    this.sent.push(payload);
  }

  close(): void {
    this.readyState = 3;
    this.onclose?.();
  }
}

beforeEach(() => {
  FakeWebSocket.instances = [];
  vi.stubGlobal("WebSocket", FakeWebSocket);
  vi.useFakeTimers();
});

afterEach(() => {
  vi.unstubAllGlobals();
  vi.useRealTimers();
});

function statuses() {
  const seen: boolean[] = [];
  const framesSeen: string[] = [];
  const session = new TeleopSession("ws://example/ws", {
    onFrame: (frame) => framesSeen.push(frame.type),
    onStatus: (connected) => seen.push(connected),
  });
  return { session, seen, framesSeen };
}

describe("TeleopSession", () => {
  it("reports connected on open and delivers parsed frames", () => {
    const { seen, framesSeen } = statuses();
    const socket = FakeWebSocket.instances[0];
    socket.open();
    expect(seen).toEqual([true]);
    socket.deliver('{"type":"state","t":0,"vehicles":[]}');
    socket.deliver("garbage");
    socket.deliver('{"type":"error","msg":"x"}');
    expect(framesSeen).toEqual(["state", "error"]);
  });

  it("reconnects with backoff after a drop", () => {
    const { seen } = statuses();
    FakeWebSocket.instances[0].open();
    FakeWebSocket.instances[0].close();
    expect(seen).toEqual([true, false]);
    expect(FakeWebSocket.instances).toHaveLength(1);
    vi.advanceTimersByTime(300);
    expect(FakeWebSocket.instances).toHaveLength(2);
    FakeWebSocket.instances[1].close();
    vi.advanceTimersByTime(200); // first backoff doubled: not yet
    expect(FakeWebSocket.instances).toHaveLength(2);
    vi.advanceTimersByTime(400);
    expect(FakeWebSocket.instances).toHaveLength(3);
  });

  it("drops sends while disconnected instead of blocking", () => {
    const { session } = statuses();
    expect(session.send("hello")).toBe(false);
    const socket = FakeWebSocket.instances[0];
    socket.open();
    expect(session.send("hello")).toBe(true);
    expect(socket.sent).toEqual(["hello"]);
  });

  it("stops reconnecting once closed", () => {
    const { session } = statuses();
    FakeWebSocket.instances[0].open();
    session.close();
    vi.advanceTimersByTime(10_000);
    expect(FakeWebSocket.instances).toHaveLength(1);
  });
});
