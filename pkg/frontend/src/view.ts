// ViewModel: the latest server messages plus client-side mode and status.
// In blind mode nothing visual is drawn; audio cues and input still flow,
// replicating the eyes-free play condition.

import type {
  AudioCue,
  Metrics,
  SceneEntity,
  ServerConfig,
  ServerMsg,
  AvatarPose,
} from "./protocol.js";

export type Mode = "sighted" | "blind";
export type Connection = "connecting" | "open" | "closed";

export class ViewModel {
  mode: Mode;
  connection: Connection = "connecting";
  config: ServerConfig | null = null;
  scenario = "";
  phase = "";
  tick = 0;
  score = 0;
  gamePhase: "Running" | "Finished" | "" = "";
  motor: { cols: number; rows: number; data: number[] } | null = null;
  glove: number[] | null = null; // 5 intensities + pattern byte
  scene: { avatar: AvatarPose; entities: SceneEntity[] } | null = null;
  metrics: Metrics[] = [];
  lastError = "";
  ended = false;
  audioQueue: AudioCue[] = [];

  constructor(mode: Mode = "sighted") {
    this.mode = mode;
  }

  apply(msg: ServerMsg): void {
    switch (msg.type) {
      case "hello":
        this.config = msg.config;
        this.scenario = msg.scenario;
        break;
      case "phase":
        this.phase = msg.game > 0 ? `${msg.name} ${msg.game}` : msg.name;
        break;
      case "motor":
        this.motor = { cols: msg.cols, rows: msg.rows, data: msg.data };
        this.tick = msg.tick;
        break;
      case "glove":
        this.glove = msg.data;
        break;
      case "scene":
        this.scene = { avatar: msg.avatar, entities: msg.entities };
        break;
      case "state":
        this.score = msg.score;
        this.gamePhase = msg.phase;
        break;
      case "audio":
        this.audioQueue.push(msg.cue);
        break;
      case "metrics":
        this.metrics.push(msg);
        break;
      case "error":
        this.lastError = msg.message;
        break;
      case "end":
        this.ended = true;
        break;
    }
  }

  /** Cues queued since the last drain; playback consumes them once. */
  drainAudio(): AudioCue[] {
    const cues = this.audioQueue;
    this.audioQueue = [];
    return cues;
  }

  statusLine(): string {
    const bits = [`${this.connection}`, this.mode];
    if (this.phase) bits.push(this.phase);
    if (this.gamePhase) bits.push(`tick ${this.tick}`, `score ${this.score}`);
    if (this.ended) bits.push("session over");
    return bits.join(" | ");
  }
}
