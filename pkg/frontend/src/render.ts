// Top-down scene drawing. The geometry helpers are pure (world-space corner
// and screen-space transforms) so orientation conventions are testable; the
// draw call takes anything that looks like a 2D canvas context.

import { StateFrame, VehicleFrame } from "./protocol";

export const LANE_CENTERS = [0, 0.9]; // corridor lane centerlines, meters
export const LANE_WIDTH = 0.9;
export const VEHICLE_LENGTH = 0.36;
export const VEHICLE_WIDTH = 0.25;

export interface Viewport {
  width: number; // canvas pixels
  height: number;
  scale: number; // pixels per meter
  centerX: number; // world point shown at the canvas center
  centerY: number;
}

/** Screen x grows right, screen y grows down; world y up => flipped. */
export function worldToScreen(vp: Viewport, x: number, y: number): [number, number] {
  return [
    vp.width / 2 + (x - vp.centerX) * vp.scale,
    vp.height / 2 - (y - vp.centerY) * vp.scale,
  ];
}

/** Viewport that follows the platoon centroid. */
export function followViewport(
  frame: StateFrame | null,
  width: number,
  height: number,
  scale = 120,
): Viewport {
  if (frame === null || frame.vehicles.length === 0) {
    return { width, height, scale, centerX: 0, centerY: LANE_WIDTH / 2 };
  }
  const n = frame.vehicles.length;
  const cx = frame.vehicles.reduce((acc, v) => acc + v.x, 0) / n;
  return { width, height, scale, centerX: cx, centerY: LANE_WIDTH / 2 };
}

/**
 * World-space outline of a vehicle: four body corners ordered
 * front-left, front-right, rear-right, rear-left, plus the nose point.
 * psi = 0 points +x; psi = pi/2 points +y.
 */
export function vehicleOutline(
  v: { x: number; y: number; psi: number },
  length = VEHICLE_LENGTH,
  width = VEHICLE_WIDTH,
): { corners: [number, number][]; nose: [number, number] } {
  const c = Math.cos(v.psi);
  const s = Math.sin(v.psi);
  const hl = length / 2;
  const hw = width / 2;
  const local: [number, number][] = [
    [hl, hw],
    [hl, -hw],
    [-hl, -hw],
    [-hl, hw],
  ];
  const corners = local.map(
    ([lx, ly]): [number, number] => [v.x + lx * c - ly * s, v.y + lx * s + ly * c],
  );
  return { corners, nose: [v.x + hl * 1.4 * c, v.y + hl * 1.4 * s] };
}

/** Midpoint label anchor between a follower and its predecessor. */
export function spacingLabel(
  follower: VehicleFrame,
  predecessor: VehicleFrame,
): { x: number; y: number; text: string } | null {
  if (follower.d_measure === undefined) return null;
  return {
    x: (follower.x + predecessor.x) / 2,
    y: (follower.y + predecessor.y) / 2,
    text: `${follower.d_measure.toFixed(2)} m`,
  };
}

// Minimal surface of CanvasRenderingContext2D the renderer needs; tests pass
// a recording stub.
export interface Canvas2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
}

const VEHICLE_COLORS = ["#4cc2ff", "#8bd67a", "#f2c14e", "#df7bd2"];

export function drawScene(ctx: Canvas2D, frame: StateFrame | null, vp: Viewport): void {
  ctx.clearRect(0, 0, vp.width, vp.height);

  // Lane boundaries: solid outer edges, dashed divider between lane centers.
  const edges = [
    LANE_CENTERS[0] - LANE_WIDTH / 2,
    (LANE_CENTERS[0] + LANE_CENTERS[1]) / 2 + LANE_WIDTH / 2 - LANE_WIDTH / 2,
    LANE_CENTERS[1] + LANE_WIDTH / 2,
  ];
  const xLeft = vp.centerX - vp.width / vp.scale;
  const xRight = vp.centerX + vp.width / vp.scale;
  edges.forEach((edge, i) => {
    ctx.beginPath();
    ctx.setLineDash(i === 1 ? [8, 8] : []);
    ctx.strokeStyle = "#555c66";
    ctx.lineWidth = i === 1 ? 1 : 2;
    const [x0, y0] = worldToScreen(vp, xLeft, edge);
    const [x1, y1] = worldToScreen(vp, xRight, edge);
    ctx.moveTo(x0, y0);
    ctx.lineTo(x1, y1);
    ctx.stroke();
  });
  ctx.setLineDash([]);

  if (frame === null) return;

  frame.vehicles.forEach((vehicle, i) => {
    const { corners, nose } = vehicleOutline(vehicle);
    ctx.beginPath();
    corners.forEach(([wx, wy], k) => {
      const [sx, sy] = worldToScreen(vp, wx, wy);
      if (k === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.closePath();
    ctx.fillStyle = VEHICLE_COLORS[i % VEHICLE_COLORS.length];
    ctx.fill();
    ctx.strokeStyle = "#10131a";
    ctx.lineWidth = 1;
    ctx.stroke();

    // heading tick from center to nose
    ctx.beginPath();
    const [cx, cy] = worldToScreen(vp, vehicle.x, vehicle.y);
    const [nx, ny] = worldToScreen(vp, nose[0], nose[1]);
    ctx.moveTo(cx, cy);
    ctx.lineTo(nx, ny);
    ctx.strokeStyle = "#10131a";
    ctx.stroke();

    // red badge on followers that currently see nothing
    if (vehicle.obs_valid === false) {
      ctx.beginPath();
      ctx.arc(cx, cy - 18, 6, 0, 2 * Math.PI);
      ctx.fillStyle = "#e74c3c";
      ctx.fill();
    }

    if (i > 0) {
      const label = spacingLabel(vehicle, frame.vehicles[i - 1]);
      if (label !== null) {
        const [lx, ly] = worldToScreen(vp, label.x, label.y);
        ctx.fillStyle = "#d8dee9";
        ctx.font = "12px system-ui, sans-serif";
        ctx.textAlign = "center";
        ctx.fillText(label.text, lx, ly - 14);
      }
    }
  });
}
