import type { Point } from "./types.js";

/**
 * Zoom/pan transform between screen (canvas) and native image
 * coordinates. Strokes are always stored in image coordinates, so
 * changing the zoom never changes what gets submitted.
 */
export class ViewTransform {
  scale = 1;
  offsetX = 0;
  offsetY = 0;

  toImage(p: Point): Point {
    return { x: (p.x - this.offsetX) / this.scale, y: (p.y - this.offsetY) / this.scale };
  }

  toScreen(p: Point): Point {
    return { x: p.x * this.scale + this.offsetX, y: p.y * this.scale + this.offsetY };
  }

  zoomAt(screen: Point, factor: number): void {
    const before = this.toImage(screen);
    this.scale = Math.min(Math.max(this.scale * factor, 0.1), 32);
    const after = this.toScreen(before);
    this.offsetX += screen.x - after.x;
    this.offsetY += screen.y - after.y;
  }

  panBy(dx: number, dy: number): void {
    this.offsetX += dx;
    this.offsetY += dy;
  }

  fit(imageW: number, imageH: number, canvasW: number, canvasH: number): void {
    this.scale = Math.min(canvasW / imageW, canvasH / imageH);
    this.offsetX = (canvasW - imageW * this.scale) / 2;
    this.offsetY = (canvasH - imageH * this.scale) / 2;
  }
}
