import { describe, expect, it } from "vitest";

import { decodeObfmap, serializeScribbles } from "../src/client.js";

describe("serializeScribbles", () => {
  it("matches the service wire contract field for field", () => {
    const doc = {
      strokes: [
        { channel: "fn" as const, points: [[1, 2], [5, 9]] as [number, number][], radius: 12 },
        { channel: "fp" as const, points: [[3, 3]] as [number, number][], radius: 4 },
      ],
    };
    const parsed = JSON.parse(serializeScribbles(doc));
    expect(parsed).toEqual({
      strokes: [
        { channel: "fn", points: [[1, 2], [5, 9]], radius: 12 },
        { channel: "fp", points: [[3, 3]], radius: 4 },
      ],
    });
  });
});

describe("decodeObfmap", () => {
  function encode(width: number, height: number, values: number[]): ArrayBuffer {
    const buf = new ArrayBuffer(16 + 4 * values.length);
    const bytes = new Uint8Array(buf);
    bytes.set(new TextEncoder().encode("OBFMAP01"), 0);
    const view = new DataView(buf);
    view.setUint32(8, width, true);
    view.setUint32(12, height, true);
    values.forEach((v, i) => view.setFloat32(16 + 4 * i, v, true));
    return buf;
  }

  it("round-trips a little-endian float map", () => {
    const values = [0, 0.25, 0.5, 1, 0.125, 0.75];
    const out = decodeObfmap(encode(3, 2, values));
    expect(out.width).toBe(3);
    expect(out.height).toBe(2);
    expect(Array.from(out.data)).toEqual(values);
  });

  it("rejects a bad magic", () => {
    const buf = encode(1, 1, [0.5]);
    new Uint8Array(buf)[0] = 88;
    expect(() => decodeObfmap(buf)).toThrow(/magic/);
  });

  it("rejects a truncated payload", () => {
    const buf = encode(2, 2, [0, 0, 0, 0]);
    expect(() => decodeObfmap(buf.slice(0, buf.byteLength - 4))).toThrow(/expected/);
  });
});
