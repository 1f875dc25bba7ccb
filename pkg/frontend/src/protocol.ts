// Wire protocol shared with the Python session server: JSON text frames
// over a single WebSocket.

export interface AvatarPose {
  x: number;
  y: number;
  heading: number;
}

export interface SceneEntity {
  id: number;
  kind: "Monster" | "Barrel";
  azimuth: number;   // degrees, negative = left
  elevation: number; // degrees, positive = up
  distance: number;  // meters
}

export type AudioCue = "ExplosionAudio" | "WinAudio" | "MusicStart";

export interface Metrics {
  game: number;
  monsters_killed: number;
  barrels_hit: number;
  misses: number;
  shots: number;
  score: number;
  accuracy: number;
  mistake_ratio: number | null;
}

export type ServerMsg =
  | { type: "hello"; version: number; scenario: string; config: ServerConfig }
  | { type: "phase"; name: string; game: number }
  | { type: "motor"; tick: number; cols: number; rows: number; data: number[] }
  | { type: "glove"; tick: number; data: number[] } // 5 intensities + pattern
  | { type: "scene"; tick: number; avatar: AvatarPose; entities: SceneEntity[] }
  | { type: "state"; tick: number; score: number; phase: "Running" | "Finished" }
  | { type: "audio"; tick: number; cue: AudioCue }
  | ({ type: "metrics" } & Metrics)
  | { type: "error"; message: string }
  | { type: "end"; truncated: boolean };

export type ClientMsg =
  | { type: "hand"; x: number; y: number; z: number; valid: boolean }
  | { type: "trigger"; pressed: boolean }
  | { type: "control"; action: "start" | "pause" };

// The config echo carries every simulator default; the client needs only
// the tracker plane and the field-of-view grid.
export interface ServerConfig {
  calib_x_min: number;
  calib_x_max: number;
  calib_y_min: number;
  calib_y_max: number;
  grid_cols: number;
  grid_rows: number;
  fov_h: number;
  fov_v: number;
  tick_rate: number;
  [key: string]: unknown;
}

export function parseServerMsg(raw: string): ServerMsg | null {
  try {
    const msg = JSON.parse(raw);
    if (msg && typeof msg === "object" && typeof msg.type === "string") {
      return msg as ServerMsg;
    }
  } catch {
    // fall through: a malformed frame is dropped, never fatal
  }
  return null;
}
