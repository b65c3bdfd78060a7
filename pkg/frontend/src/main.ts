// Cockpit wiring: canvas render loop, keyboard/gamepad input, command timer.

import {
  absorbFrame,
  applyGamepad,
  applyIntent,
  connectionLost,
  initialCockpit,
  keyIntent,
  markSent,
  shouldSend,
  tickSteer,
} from "./cockpit";
import { defaultServerUrl, TeleopSession } from "./net";
import { encodeCmd, encodeReset } from "./protocol";
import { drawScene, followViewport } from "./render";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d");
if (ctx === null) throw new Error("2D canvas unavailable");

const statusEl = document.getElementById("status") as HTMLSpanElement;
const readoutEl = document.getElementById("readout") as HTMLSpanElement;
const resetBtn = document.getElementById("reset") as HTMLButtonElement;

let state = initialCockpit();

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
}
window.addEventListener("resize", resize);
resize();

const url = new URLSearchParams(location.search).get("server") ?? defaultServerUrl();
const session = new TeleopSession(url, {
  onFrame(frame) {
    if (frame.type === "state") {
      state = absorbFrame(state, frame);
    } else {
      console.warn("server:", frame.msg);
    }
  },
  onStatus(connected) {
    state = connected ? { ...state, status: "connected" } : connectionLost(state);
  },
});

window.addEventListener("keydown", (event) => {
  if (event.repeat) return;
  const intent = keyIntent(event.key, true);
  if (intent !== null) {
    state = applyIntent(state, intent);
    event.preventDefault();
  }
});
window.addEventListener("keyup", (event) => {
  const intent = keyIntent(event.key, false);
  if (intent !== null) {
    state = applyIntent(state, intent);
    event.preventDefault();
  }
});
resetBtn.addEventListener("click", () => {
  session.send(encodeReset());
  state = applyIntent(state, { kind: "stop" });
});

function pollGamepad(): void {
  const pads = navigator.getGamepads ? navigator.getGamepads() : [];
  const pad = Array.from(pads).find((p) => p !== null);
  if (pad !== undefined && pad !== null) {
    state = applyGamepad(state, pad.axes[0] ?? 0, pad.axes[1] ?? 0);
  }
}

// Steering ramp advances on its own clock so key-hold behavior is framerate
// independent.
let lastTick = performance.now();
setInterval(() => {
  const now = performance.now();
  state = tickSteer(state, (now - lastTick) / 1000);
  lastTick = now;
  if (state.inputMode === "gamepad") pollGamepad();
}, 20);

// Command frames at the configured send rate, only while inputs are active.
setInterval(() => {
  if (shouldSend(state)) {
    if (session.send(encodeCmd(state.steer, state.speed))) {
      state = markSent(state);
    }
  }
}, 1000 / state.sendRateHz);

window.addEventListener("gamepadconnected", () => {
  state = { ...state, inputMode: "gamepad" };
});

function renderLoop(): void {
  const vp = followViewport(state.frame, canvas.width, canvas.height);
  drawScene(ctx!, state.frame, vp);
  statusEl.textContent = state.status;
  statusEl.className = state.status;
  readoutEl.textContent =
    `steer ${state.steer.toFixed(2)} rad | speed ${state.speed.toFixed(2)} m/s` +
    (state.frame !== null ? ` | t=${state.frame.t.toFixed(2)} s` : "");
  requestAnimationFrame(renderLoop);
}
requestAnimationFrame(renderLoop);
