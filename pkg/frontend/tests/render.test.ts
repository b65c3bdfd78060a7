import { describe, expect, it } from "vitest";

import { StateFrame } from "../src/protocol";
import {
  Canvas2D,
  drawScene,
  followViewport,
  spacingLabel,
  vehicleOutline,
  worldToScreen,
} from "../src/render";

const FRAME: StateFrame = {
  type: "state",
  t: 2.0,
  vehicles: [
    { id: "lead", x: 0.5, y: 0.0, psi: 0.0, v: 0.2, delta: 0.0 },
    { id: "f1", x: 0.0, y: 0.0, psi: 0.0, v: 0.2, delta: 0.0, d_measure: 0.5, obs_valid: true },
    { id: "f2", x: -0.5, y: 0.0, psi: 0.0, v: 0.2, delta: 0.0, d_measure: 0.5, obs_valid: false },
  ],
};

describe("worldToScreen", () => {
  it("maps world +y to screen up", () => {
    const vp = { width: 800, height: 600, scale: 100, centerX: 0, centerY: 0 };
    const [, yLow] = worldToScreen(vp, 0, 0);
    const [, yHigh] = worldToScreen(vp, 0, 1);
    expect(yHigh).toBeLessThan(yLow);
  });

  it("centers the viewport point", () => {
    const vp = { width: 800, height: 600, scale: 100, centerX: 2, centerY: 1 };
    expect(worldToScreen(vp, 2, 1)).toEqual([400, 300]);
  });
});

describe("vehicleOutline", () => {
  it("psi = 0 points +x", () => {
    const { corners, nose } = vehicleOutline({ x: 0, y: 0, psi: 0 });
    expect(nose[0]).toBeGreaterThan(0);
    expect(Math.abs(nose[1])).toBeLessThan(1e-12);
    const frontXs = corners.slice(0, 2).map(([x]) => x);
    const rearXs = corners.slice(2).map(([x]) => x);
    expect(Math.min(...frontXs)).toBeGreaterThan(Math.max(...rearXs));
  });

  it("psi = pi/2 points +y", () => {
    const { nose } = vehicleOutline({ x: 1, y: 2, psi: Math.PI / 2 });
    expect(nose[1]).toBeGreaterThan(2);
    expect(nose[0]).toBeCloseTo(1, 12);
  });
});

describe("spacingLabel", () => {
  it("labels the measured distance at the midpoint", () => {
    const label = spacingLabel(FRAME.vehicles[1], FRAME.vehicles[0]);
    expect(label).not.toBeNull();
    expect(label!.text).toBe("0.50 m");
    expect(label!.x).toBeCloseTo(0.25, 12);
  });

  it("omits the label without a measurement", () => {
    expect(spacingLabel(FRAME.vehicles[0], FRAME.vehicles[1])).toBeNull();
  });
});

describe("followViewport", () => {
  it("tracks the platoon centroid", () => {
    const vp = followViewport(FRAME, 800, 600);
    expect(vp.centerX).toBeCloseTo(0.0, 12);
  });

  it("has a sane default without frames", () => {
    const vp = followViewport(null, 800, 600);
    expect(vp.centerX).toBe(0);
  });
});

class RecordingContext implements Canvas2D {
  calls: string[] = [];
  texts: string[] = [];
  fills: (string | CanvasGradient | CanvasPattern)[] = [];
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  lineWidth = 1;
  font = "";
  textAlign: CanvasTextAlign = "left";
  clearRect() {
    this.calls.push("clearRect");
  }
  beginPath() {
    this.calls.push("beginPath");
  }
  moveTo() {}
  lineTo() {}
  closePath() {}
  stroke() {
    this.calls.push("stroke");
  }
  fill() {
    this.calls.push("fill");
    this.fills.push(this.fillStyle);
  }
  arc() {
    this.calls.push("arc");
  }
  fillText(text: string) {
    this.texts.push(text);
  }
  setLineDash() {}
}

describe("drawScene", () => {
  it("draws lanes, vehicles, labels, and the invalid-observation badge", () => {
    const ctx = new RecordingContext();
    const vp = followViewport(FRAME, 800, 600);
    drawScene(ctx, FRAME, vp);
    expect(ctx.calls[0]).toBe("clearRect");
    expect(ctx.texts).toContain("0.50 m");
    // exactly one red badge: f2 has obs_valid = false
    expect(ctx.calls.filter((c) => c === "arc")).toHaveLength(1);
    expect(ctx.fills).toContain("#e74c3c");
  });

  it("renders lanes even before the first frame", () => {
    const ctx = new RecordingContext();
    drawScene(ctx, null, followViewport(null, 800, 600));
    expect(ctx.calls.filter((c) => c === "stroke").length).toBeGreaterThanOrEqual(3);
    expect(ctx.texts).toHaveLength(0);
  });
});
