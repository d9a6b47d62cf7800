export type Channel = "fn" | "fp";

export interface Point {
  x: number;
  y: number;
}

/** One scribble: a polyline in native image coordinates plus a disk radius. */
export interface Stroke {
  channel: Channel;
  points: Point[];
  radius: number;
}

export interface SessionInfo {
  id: string;
  width: number;
  height: number;
  prediction: string;
  ob: string;
}

/** Wire format of the scribble document the service consumes. */
export interface ScribbleDocument {
  strokes: { channel: Channel; points: [number, number][]; radius: number }[];
}

export const DEFAULT_BRUSH_RADIUS = 12;

export const CHANNEL_COLORS: Record<Channel, string> = {
  fn: "rgba(220, 50, 40, 0.55)", // missed boundaries painted red
  fp: "rgba(40, 90, 220, 0.55)", // spurious boundaries painted blue
};
