import { describe, expect, it } from "vitest";

import { ViewTransform } from "../src/view.js";

describe("ViewTransform", () => {
  it("round-trips image coordinates through zoom and pan", () => {
    const view = new ViewTransform();
    view.fit(128, 128, 800, 600);
    view.zoomAt({ x: 200, y: 150 }, 2.5);
    view.panBy(40, -25);
    const p = { x: 37.25, y: 99.5 };
    const back = view.toImage(view.toScreen(p));
    expect(back.x).toBeCloseTo(p.x, 9);
    expect(back.y).toBeCloseTo(p.y, 9);
  });

  it("zoomAt keeps the anchor point fixed on screen", () => {
    const view = new ViewTransform();
    view.fit(64, 64, 640, 640);
    const anchorScreen = { x: 320, y: 200 };
    const before = view.toImage(anchorScreen);
    view.zoomAt(anchorScreen, 3);
    const after = view.toImage(anchorScreen);
    expect(after.x).toBeCloseTo(before.x, 9);
    expect(after.y).toBeCloseTo(before.y, 9);
  });

  it("fit centers the image", () => {
    const view = new ViewTransform();
    view.fit(100, 50, 200, 200);
    expect(view.scale).toBe(2);
    expect(view.offsetX).toBe(0);
    expect(view.offsetY).toBe(50);
  });
});
