import { ServiceClient } from "./client.js";
import { polylinePixels, previewDiskMask } from "./geometry.js";
import { StrokeRecorder } from "./strokes.js";
import type { Point, SessionInfo, Stroke } from "./types.js";
import { CHANNEL_COLORS } from "./types.js";
import { ViewTransform } from "./view.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

class AnnotatorApp {
  private client = new ServiceClient("");
  private view = new ViewTransform();
  private session: SessionInfo | null = null;
  private recorder: StrokeRecorder | null = null;
  private image: ImageBitmap | null = null;
  private obMask: ImageBitmap | null = null;
  private heat: Float32Array | null = null;
  private heatView = false;
  private submitting = false;
  private pointerDown = false;
  private cursor: Point | null = null;

  private readonly canvas = $<HTMLCanvasElement>("canvas");
  private readonly ctx = this.canvas.getContext("2d")!;

  constructor() {
    this.bindUi();
    this.resize();
    window.addEventListener("resize", () => this.resize());
  }

  private bindUi(): void {
    $<HTMLInputElement>("file").addEventListener("change", (e) => {
      const input = e.target as HTMLInputElement;
      if (input.files && input.files[0]) void this.openImage(input.files[0]);
    });
    const radius = $<HTMLInputElement>("radius");
    radius.addEventListener("input", () => {
      if (this.recorder) this.recorder.radius = Number(radius.value);
      $<HTMLSpanElement>("radius-label").textContent = radius.value;
      this.redraw();
    });
    for (const ch of ["fn", "fp"] as const) {
      $<HTMLInputElement>(`channel-${ch}`).addEventListener("change", () => {
        if (this.recorder) this.recorder.channel = ch;
      });
    }
    $<HTMLButtonElement>("undo").addEventListener("click", () => {
      this.recorder?.undo();
      this.redraw();
    });
    $<HTMLButtonElement>("submit").addEventListener("click", () => void this.submit());
    $<HTMLButtonElement>("export").addEventListener("click", () => void this.export());
    $<HTMLInputElement>("heat").addEventListener("change", (e) => {
      this.heatView = (e.target as HTMLInputElement).checked;
      void this.refreshOverlay();
    });

    this.canvas.addEventListener("pointerdown", (e) => {
      if (!this.recorder) return;
      this.canvas.setPointerCapture(e.pointerId);
      this.pointerDown = true;
      this.recorder.begin(this.eventToImage(e));
      this.redraw();
    });
    this.canvas.addEventListener("pointermove", (e) => {
      this.cursor = this.eventToImage(e);
      if (this.pointerDown && this.recorder) this.recorder.extend(this.cursor);
      this.redraw();
    });
    this.canvas.addEventListener("pointerup", () => {
      if (this.pointerDown && this.recorder) {
        this.recorder.finish();
        this.pointerDown = false;
        this.redraw();
      }
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      const rect = this.canvas.getBoundingClientRect();
      this.view.zoomAt(
        { x: e.clientX - rect.left, y: e.clientY - rect.top },
        e.deltaY < 0 ? 1.2 : 1 / 1.2,
      );
      this.redraw();
    });
  }

  private eventToImage(e: PointerEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    return this.view.toImage({ x: e.clientX - rect.left, y: e.clientY - rect.top });
  }

  private async openImage(file: File): Promise<void> {
    try {
      this.session = await this.client.createSession(file);
      this.image = await createImageBitmap(file);
      this.recorder = new StrokeRecorder(this.session.width, this.session.height);
      this.recorder.radius = Number($<HTMLInputElement>("radius").value);
      $<HTMLSpanElement>("round").textContent = "0";
      this.view.fit(this.session.width, this.session.height,
                    this.canvas.width, this.canvas.height);
      await this.refreshOverlay();
      this.setStatus(`session ${this.session.id}`);
    } catch (err) {
      this.banner(String(err));
    }
  }

  private async refreshOverlay(): Promise<void> {
    if (!this.session) return;
    if (this.heatView) {
      this.heat = await this.client.fetchProbability(this.session.id);
      this.obMask = null;
    } else {
      const blob = await this.client.fetchObMask(this.session.id);
      this.obMask = await createImageBitmap(blob);
      this.heat = null;
    }
    this.redraw();
  }

  private async submit(): Promise<void> {
    if (!this.session || !this.recorder || this.submitting) return;
    const { doc, taken } = this.recorder.takeDocument();
    this.submitting = true;
    const btn = $<HTMLButtonElement>("submit");
    btn.disabled = true;
    try {
      const { round } = await this.client.submitScribbles(this.session.id, doc);
      $<HTMLSpanElement>("round").textContent = String(round);
      await this.refreshOverlay();
      this.banner("");
    } catch (err) {
      this.recorder.restore(taken as Stroke[]); // nothing is lost on failure
      this.banner(String(err));
    } finally {
      this.submitting = false;
      btn.disabled = false;
      this.redraw();
    }
  }

  private async export(): Promise<void> {
    if (!this.session) return;
    try {
      const blob = await this.client.exportSession(this.session.id);
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = `${this.session.id}_export.zip`;
      a.click();
      URL.revokeObjectURL(a.href);
    } catch (err) {
      this.banner(String(err));
    }
  }

  private banner(message: string): void {
    const el = $<HTMLDivElement>("banner");
    el.textContent = message;
    el.style.display = message ? "block" : "none";
  }

  private setStatus(message: string): void {
    $<HTMLSpanElement>("status").textContent = message;
  }

  private resize(): void {
    const holder = $<HTMLDivElement>("canvas-holder");
    this.canvas.width = holder.clientWidth;
    this.canvas.height = holder.clientHeight;
    if (this.session) {
      this.view.fit(this.session.width, this.session.height,
                    this.canvas.width, this.canvas.height);
    }
    this.redraw();
  }

  private redraw(): void {
    const ctx = this.ctx;
    ctx.setTransform(1, 0, 0, 1, 0, 0);
    ctx.fillStyle = "#181818";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    if (!this.image || !this.session) return;
    ctx.setTransform(this.view.scale, 0, 0, this.view.scale,
                     this.view.offsetX, this.view.offsetY);
    ctx.imageSmoothingEnabled = this.view.scale < 2;
    ctx.drawImage(this.image, 0, 0);

    if (this.heat) this.drawHeat(ctx);
    else if (this.obMask) this.drawMask(ctx);

    const rec = this.recorder!;
    for (const stroke of rec.pendingStrokes) this.drawStroke(ctx, stroke);
    if (rec.activeStroke) this.drawStroke(ctx, rec.activeStroke);
    if (this.cursor) {
      ctx.strokeStyle = CHANNEL_COLORS[rec.channel];
      ctx.lineWidth = 1 / this.view.scale;
      ctx.beginPath();
      ctx.arc(this.cursor.x, this.cursor.y, rec.radius, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }

  private drawMask(ctx: CanvasRenderingContext2D): void {
    // colorize the thinned binary overlay without touching the photo
    const off = document.createElement("canvas");
    off.width = this.obMask!.width;
    off.height = this.obMask!.height;
    const octx = off.getContext("2d")!;
    octx.drawImage(this.obMask!, 0, 0);
    octx.globalCompositeOperation = "source-in";
    octx.fillStyle = "#28d37a";
    octx.fillRect(0, 0, off.width, off.height);
    ctx.drawImage(off, 0, 0);
  }

  private drawHeat(ctx: CanvasRenderingContext2D): void {
    const { width, height } = this.session!;
    const img = new ImageData(width, height);
    for (let i = 0; i < this.heat!.length; i++) {
      const v = this.heat![i];
      img.data[4 * i] = Math.round(255 * v);
      img.data[4 * i + 1] = Math.round(80 * v);
      img.data[4 * i + 2] = Math.round(255 * (1 - v)) >> 1;
      img.data[4 * i + 3] = v > 0 ? 200 : 0;
    }
    const off = document.createElement("canvas");
    off.width = width;
    off.height = height;
    off.getContext("2d")!.putImageData(img, 0, 0);
    ctx.drawImage(off, 0, 0);
  }

  private stampCache = new Map<string, HTMLCanvasElement>();

  private stampFor(radius: number, color: string): HTMLCanvasElement {
    const key = `${radius}:${color}`;
    let stamp = this.stampCache.get(key);
    if (!stamp) {
      // pre-render the preview disk; it agrees with the server's exact
      // lattice rasterization, so the paint matches what comes back
      const { size, mask } = previewDiskMask(radius);
      stamp = document.createElement("canvas");
      stamp.width = size;
      stamp.height = size;
      const sctx = stamp.getContext("2d")!;
      sctx.fillStyle = color;
      for (let y = 0; y < size; y++) {
        for (let x = 0; x < size; x++) {
          if (mask[y * size + x]) sctx.fillRect(x, y, 1, 1);
        }
      }
      this.stampCache.set(key, stamp);
    }
    return stamp;
  }

  private drawStroke(ctx: CanvasRenderingContext2D, stroke: Stroke): void {
    const stamp = this.stampFor(stroke.radius, CHANNEL_COLORS[stroke.channel]);
    const half = (stamp.width - 1) / 2;
    const prevAlpha = ctx.globalAlpha;
    ctx.globalAlpha = 1.0;
    const seen = new Set<number>();
    for (const p of polylinePixels(stroke.points)) {
      const key = p.y * 65536 + p.x;
      if (seen.has(key)) continue;
      seen.add(key);
      ctx.drawImage(stamp, p.x - half, p.y - half);
    }
    ctx.globalAlpha = prevAlpha;
  }
}

new AnnotatorApp();
