// Operator input state machine. Pure update functions so the ramping,
// self-centering, clamping, and send-gating behavior is unit-testable apart
// from the DOM. main.ts feeds it key events, gamepad polls, and a fixed-rate
// send timer.

import { clamp, StateFrame } from "./protocol";

export type ConnectionStatus = "connecting" | "connected" | "reconnecting";
export type InputMode = "keyboard" | "gamepad";

export interface Limits {
  maxSteer: number;
  maxSpeed: number;
}

export interface CockpitState {
  status: ConnectionStatus;
  frame: StateFrame | null;
  steer: number;
  speed: number;
  steerDirection: -1 | 0 | 1;
  inputMode: InputMode;
  limits: Limits;
  sendRateHz: number;
  // True whenever an output changed since the last transmission, so the
  // final decay back to zero is still sent before the cockpit goes idle.
  pendingSend: boolean;
}

export const STEER_RAMP_RATE = 1.2; // rad/s while a key is held
export const STEER_CENTER_RATE = 2.4; // rad/s back toward zero on release
export const SPEED_STEP = 0.02; // m/s per W/S press
export const DEFAULT_LIMITS: Limits = { maxSteer: 0.5, maxSpeed: 0.5 };

export function initialCockpit(sendRateHz = 20): CockpitState {
  return {
    status: "connecting",
    frame: null,
    steer: 0,
    speed: 0,
    steerDirection: 0,
    inputMode: "keyboard",
    limits: DEFAULT_LIMITS,
    sendRateHz,
    pendingSend: false,
  };
}

export type KeyIntent =
  | { kind: "steer"; direction: -1 | 0 | 1 }
  | { kind: "speed"; step: 1 | -1 }
  | { kind: "stop" };

/** Map a keyboard event to an intent; null for keys the cockpit ignores. */
export function keyIntent(key: string, pressed: boolean): KeyIntent | null {
  switch (key) {
    case "ArrowLeft":
      return { kind: "steer", direction: pressed ? 1 : 0 };
    case "ArrowRight":
      return { kind: "steer", direction: pressed ? -1 : 0 };
    case "w":
    case "W":
    case "ArrowUp":
      return pressed ? { kind: "speed", step: 1 } : null;
    case "s":
    case "S":
    case "ArrowDown":
      return pressed ? { kind: "speed", step: -1 } : null;
    case " ":
      return pressed ? { kind: "stop" } : null;
    default:
      return null;
  }
}

export function applyIntent(state: CockpitState, intent: KeyIntent): CockpitState {
  switch (intent.kind) {
    case "steer":
      return { ...state, steerDirection: intent.direction };
    case "speed": {
      const speed = clamp(
        state.speed + intent.step * SPEED_STEP,
        0,
        state.limits.maxSpeed,
      );
      return { ...state, speed, pendingSend: true };
    }
    case "stop":
      return { ...state, speed: 0, steer: 0, steerDirection: 0, pendingSend: true };
  }
}

/** Advance the steering ramp / self-centering by dt seconds. */
export function tickSteer(state: CockpitState, dt: number): CockpitState {
  let steer = state.steer;
  if (state.steerDirection !== 0) {
    steer = clamp(
      steer + state.steerDirection * STEER_RAMP_RATE * dt,
      -state.limits.maxSteer,
      state.limits.maxSteer,
    );
  } else if (steer !== 0) {
    const decay = STEER_CENTER_RATE * dt;
    steer = Math.abs(steer) <= decay ? 0 : steer - Math.sign(steer) * decay;
  }
  if (steer === state.steer) return state;
  return { ...state, steer, pendingSend: true };
}

/** Absorb a gamepad poll: left-stick x steers, triggers/stick y set speed. */
export function applyGamepad(
  state: CockpitState,
  steerAxis: number,
  throttleAxis: number,
  deadzone = 0.1,
): CockpitState {
  const sx = Math.abs(steerAxis) < deadzone ? 0 : steerAxis;
  const ty = Math.abs(throttleAxis) < deadzone ? 0 : throttleAxis;
  const steer = clamp(-sx * state.limits.maxSteer, -state.limits.maxSteer, state.limits.maxSteer);
  const speed = clamp(-ty * state.limits.maxSpeed, 0, state.limits.maxSpeed);
  if (steer === state.steer && speed === state.speed) return state;
  return { ...state, steer, speed, pendingSend: true, inputMode: "gamepad" };
}

/**
 * Whether the send timer should emit a command frame now. Active inputs
 * stream at the send rate; an idle cockpit stops transmitting once the
 * settled zero command has gone out.
 */
export function shouldSend(state: CockpitState): boolean {
  return (
    state.pendingSend ||
    state.steer !== 0 ||
    state.speed !== 0 ||
    state.steerDirection !== 0
  );
}

export function markSent(state: CockpitState): CockpitState {
  return state.pendingSend ? { ...state, pendingSend: false } : state;
}

export function absorbFrame(state: CockpitState, frame: StateFrame): CockpitState {
  return { ...state, frame, status: "connected" };
}

export function connectionLost(state: CockpitState): CockpitState {
  // Keep the last frame so rendering continues through the stall.
  return { ...state, status: "reconnecting" };
}
