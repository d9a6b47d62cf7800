import type { ScribbleDocument, SessionInfo } from "./types.js";

/** Thin wrapper over the annotation service HTTP API. */
export class ServiceClient {
  constructor(private readonly base: string = "") {}

  async createSession(image: Blob, predictor?: string): Promise<SessionInfo> {
    const params = predictor ? `?predictor=${encodeURIComponent(predictor)}` : "";
    const resp = await fetch(`${this.base}/sessions${params}`, {
      method: "POST",
      body: image,
    });
    if (!resp.ok) throw new Error(await errorText(resp));
    return (await resp.json()) as SessionInfo;
  }

  async submitScribbles(sessionId: string, doc: ScribbleDocument): Promise<{ round: number }> {
    const resp = await fetch(`${this.base}/sessions/${sessionId}/scribbles`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: serializeScribbles(doc),
    });
    if (!resp.ok) throw new Error(await errorText(resp));
    return (await resp.json()) as { round: number };
  }

  async fetchObMask(sessionId: string, round?: number): Promise<Blob> {
    const q = round === undefined ? "" : `&round=${round}`;
    const resp = await fetch(`${this.base}/sessions/${sessionId}/ob?format=mask${q}`);
    if (!resp.ok) throw new Error(await errorText(resp));
    return await resp.blob();
  }

  async fetchProbability(sessionId: string, round?: number): Promise<Float32Array> {
    const q = round === undefined ? "" : `&round=${round}`;
    const resp = await fetch(`${this.base}/sessions/${sessionId}/ob?format=obfmap${q}`);
    if (!resp.ok) throw new Error(await errorText(resp));
    return decodeObfmap(await resp.arrayBuffer()).data;
  }

  async exportSession(sessionId: string): Promise<Blob> {
    const resp = await fetch(`${this.base}/sessions/${sessionId}/export`, { method: "POST" });
    if (!resp.ok) throw new Error(await errorText(resp));
    return await resp.blob();
  }
}

async function errorText(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { error?: string };
    if (body.error) return `${resp.status}: ${body.error}`;
  } catch {
    /* non-JSON error body */
  }
  return `service error ${resp.status}`;
}

/** Canonical serialization of the scribble document wire format. */
export function serializeScribbles(doc: ScribbleDocument): string {
  return JSON.stringify({
    strokes: doc.strokes.map((s) => ({
      channel: s.channel,
      points: s.points,
      radius: s.radius,
    })),
  });
}

/** OBFMAP01: 8-byte magic, u32le width/height, f32le row-major values. */
export function decodeObfmap(buf: ArrayBuffer): {
  width: number;
  height: number;
  data: Float32Array;
} {
  const bytes = new Uint8Array(buf);
  const magic = new TextDecoder().decode(bytes.slice(0, 8));
  if (magic !== "OBFMAP01") throw new Error(`bad obfmap magic: ${magic}`);
  const view = new DataView(buf);
  const width = view.getUint32(8, true);
  const height = view.getUint32(12, true);
  const expected = 16 + 4 * width * height;
  if (buf.byteLength !== expected) {
    throw new Error(`obfmap payload ${buf.byteLength} != expected ${expected}`);
  }
  const data = new Float32Array(width * height);
  for (let i = 0; i < data.length; i++) data[i] = view.getFloat32(16 + 4 * i, true);
  return { width, height, data };
}
