import type { Point } from "./types.js";

/** Integer pixel chain between consecutive polyline points (Bresenham). */
export function polylinePixels(points: Point[]): Point[] {
  if (points.length === 0) return [];
  const px = points.map((p) => ({ x: Math.round(p.x), y: Math.round(p.y) }));
  const out: Point[] = [{ ...px[0] }];
  for (let i = 1; i < px.length; i++) {
    let { x, y } = px[i - 1];
    const { x: x1, y: y1 } = px[i];
    const dx = Math.abs(x1 - x);
    const dy = -Math.abs(y1 - y);
    const sx = x < x1 ? 1 : -1;
    const sy = y < y1 ? 1 : -1;
    let err = dx + dy;
    while (x !== x1 || y !== y1) {
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
      out.push({ x, y });
    }
  }
  return out;
}

/** Exact lattice disk: offsets with dx^2 + dy^2 <= r^2 (matches the server). */
export function diskOffsets(radius: number): Point[] {
  const r = Math.floor(radius);
  const out: Point[] = [];
  for (let dy = -r; dy <= r; dy++) {
    for (let dx = -r; dx <= r; dx++) {
      // dx + 0 normalizes the -0 that -r produces at radius 0
      if (dx * dx + dy * dy <= radius * radius) out.push({ x: dx + 0, y: dy + 0 });
    }
  }
  return out;
}

/** Dilate a pixel set with the exact lattice disk, clipped to the canvas. */
export function dilateDisk(
  pixels: Point[],
  radius: number,
  width: number,
  height: number,
): Uint8Array {
  const out = new Uint8Array(width * height);
  const offs = diskOffsets(radius);
  for (const p of pixels) {
    for (const o of offs) {
      const x = p.x + o.x;
      const y = p.y + o.y;
      if (x >= 0 && x < width && y >= 0 && y < height) out[y * width + x] = 1;
    }
  }
  return out;
}

/**
 * Anti-aliased preview stamp of one disk: a pixel turns on when its
 * center lies inside the circle (the server's exact lattice rule) or
 * when supersampled coverage strictly dominates half the pixel. The
 * result tracks the exact lattice disk to better than 99% agreement
 * (checked by the test suite), so what the annotator sees while
 * painting is what the server rasterizes.
 */
export function previewDiskMask(radius: number): { size: number; mask: Uint8Array } {
  const r = Math.ceil(radius) + 1;
  const size = 2 * r + 1;
  const mask = new Uint8Array(size * size);
  const sub = 4;
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const px = x - r;
      const py = y - r;
      if (px * px + py * py <= radius * radius) {
        mask[y * size + x] = 1;
        continue;
      }
      let cover = 0;
      for (let sy = 0; sy < sub; sy++) {
        for (let sx = 0; sx < sub; sx++) {
          const cx = px + (sx + 0.5) / sub - 0.5;
          const cy = py + (sy + 0.5) / sub - 0.5;
          if (cx * cx + cy * cy <= radius * radius) cover++;
        }
      }
      mask[y * size + x] = cover > (sub * sub) / 2 ? 1 : 0;
    }
  }
  return { size, mask };
}

/** Clip polyline points into image bounds (the submit-time invariant). */
export function clipPoints(points: Point[], width: number, height: number): Point[] {
  return points.map((p) => ({
    x: Math.min(Math.max(p.x, 0), width - 1),
    y: Math.min(Math.max(p.y, 0), height - 1),
  }));
}
