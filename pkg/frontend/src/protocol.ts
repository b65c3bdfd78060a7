// Wire protocol shared with the simulation server: JSON text frames over a
// WebSocket. Parsing is defensive; malformed frames yield null so the caller
// can keep rendering the last good state.

export interface VehicleFrame {
  id: string;
  x: number;
  y: number;
  psi: number;
  v: number;
  delta: number;
  d_measure?: number;
  obs_valid?: boolean;
}

export interface StateFrame {
  type: "state";
  t: number;
  vehicles: VehicleFrame[];
}

export interface ErrorFrame {
  type: "error";
  msg: string;
}

export type ServerFrame = StateFrame | ErrorFrame;

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function isVehicle(value: unknown): value is VehicleFrame {
  if (typeof value !== "object" || value === null) return false;
  const v = value as Record<string, unknown>;
  return (
    typeof v.id === "string" &&
    isFiniteNumber(v.x) &&
    isFiniteNumber(v.y) &&
    isFiniteNumber(v.psi) &&
    isFiniteNumber(v.v) &&
    isFiniteNumber(v.delta)
  );
}

export function parseServerFrame(text: string): ServerFrame | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const frame = raw as Record<string, unknown>;
  if (frame.type === "error" && typeof frame.msg === "string") {
    return { type: "error", msg: frame.msg };
  }
  if (
    frame.type === "state" &&
    isFiniteNumber(frame.t) &&
    Array.isArray(frame.vehicles) &&
    frame.vehicles.every(isVehicle)
  ) {
    return { type: "state", t: frame.t, vehicles: frame.vehicles as VehicleFrame[] };
  }
  return null;
}

export function encodeCmd(steer: number, speed: number): string {
  return JSON.stringify({ type: "cmd", steer, speed });
}

export function encodeReset(): string {
  return JSON.stringify({ type: "reset" });
}

export function clamp(value: number, lo: number, hi: number): number {
  return value < lo ? lo : value > hi ? hi : value;
}
