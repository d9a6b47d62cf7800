import { clipPoints } from "./geometry.js";
import type { Channel, Point, ScribbleDocument, Stroke } from "./types.js";
import { DEFAULT_BRUSH_RADIUS } from "./types.js";

/**
 * Pointer-driven stroke capture. Points are stored in native image
 * coordinates no matter the display zoom; the view hands them in already
 * transformed. Coordinates are clipped to the image only when the
 * pending set is serialized for submission.
 */
export class StrokeRecorder {
  readonly width: number;
  readonly height: number;
  channel: Channel = "fn";
  radius: number = DEFAULT_BRUSH_RADIUS;
  private active: Stroke | null = null;
  private pending: Stroke[] = [];

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
  }

  begin(p: Point): void {
    this.active = { channel: this.channel, points: [p], radius: this.radius };
  }

  extend(p: Point): void {
    if (!this.active) return;
    const last = this.active.points[this.active.points.length - 1];
    if (last.x === p.x && last.y === p.y) return;
    this.active.points.push(p);
  }

  finish(): Stroke | null {
    const stroke = this.active;
    this.active = null;
    if (stroke) this.pending.push(stroke);
    return stroke;
  }

  cancel(): void {
    this.active = null;
  }

  undo(): Stroke | undefined {
    return this.pending.pop();
  }

  get pendingStrokes(): readonly Stroke[] {
    return this.pending;
  }

  get activeStroke(): Stroke | null {
    return this.active;
  }

  clear(): void {
    this.pending = [];
    this.active = null;
  }

  /** Restore strokes (submission failed: nothing may be lost). */
  restore(strokes: Stroke[]): void {
    this.pending = strokes.concat(this.pending);
  }

  /** Wire document for the service; clipping happens here, at the edge. */
  takeDocument(): { doc: ScribbleDocument; taken: Stroke[] } {
    const taken = this.pending;
    this.pending = [];
    const doc: ScribbleDocument = {
      strokes: taken.map((s) => ({
        channel: s.channel,
        points: clipPoints(s.points, this.width, this.height).map(
          (p) => [p.x, p.y] as [number, number],
        ),
        radius: Math.max(1, Math.round(s.radius)),
      })),
    };
    return { doc, taken };
  }
}
