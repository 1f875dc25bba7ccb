// The game's three audio cues, synthesized once at startup: an explosion
// burst for barrel hits, a short triumphant arpeggio for kills, and a
// rhythmic loop started with each game. One buffer per cue, played 1:1
// with incoming audio events.

import type { AudioCue } from "./protocol.js";

type ContextFactory = () => AudioContext;

export class CuePlayer {
  private ctx: AudioContext | null = null;
  private buffers = new Map<AudioCue, AudioBuffer>();
  private musicSource: AudioBufferSourceNode | null = null;
  readonly played: AudioCue[] = []; // playback history, inspectable in tests

  constructor(private readonly createContext: ContextFactory = () => new AudioContext()) {}

  /** Browsers unlock audio only after a user gesture; call this from one. */
  ensureReady(): void {
    if (this.ctx) return;
    this.ctx = this.createContext();
    this.buffers.set("ExplosionAudio", this.explosionBuffer(this.ctx));
    this.buffers.set("WinAudio", this.winBuffer(this.ctx));
    this.buffers.set("MusicStart", this.musicBuffer(this.ctx));
  }

  play(cue: AudioCue): void {
    this.played.push(cue);
    if (!this.ctx) return; // not unlocked yet: count it, skip the sound
    const buffer = this.buffers.get(cue);
    if (!buffer) return;
    const source = this.ctx.createBufferSource();
    source.buffer = buffer;
    if (cue === "MusicStart") {
      this.musicSource?.stop();
      source.loop = true;
      this.musicSource = source;
    }
    source.connect(this.ctx.destination);
    source.start();
  }

  private explosionBuffer(ctx: AudioContext): AudioBuffer {
    const rate = ctx.sampleRate;
    const dur = 0.5;
    const buffer = ctx.createBuffer(1, rate * dur, rate);
    const data = buffer.getChannelData(0);
    let last = 0;
    for (let i = 0; i < data.length; i++) {
      const t = i / rate;
      const fade = Math.exp(-6 * t);
      const white = Math.random() * 2 - 1;
      last = last * 0.82 + white * 0.18; // low-pass toward a rumble
      data[i] = last * 3.2 * fade;
    }
    return buffer;
  }

  private winBuffer(ctx: AudioContext): AudioBuffer {
    const rate = ctx.sampleRate;
    const notes = [523.25, 659.25, 783.99, 1046.5]; // rising arpeggio
    const noteDur = 0.09;
    const buffer = ctx.createBuffer(1, rate * noteDur * notes.length, rate);
    const data = buffer.getChannelData(0);
    notes.forEach((freq, n) => {
      const start = Math.floor(n * noteDur * rate);
      const len = Math.floor(noteDur * rate);
      for (let i = 0; i < len; i++) {
        const t = i / rate;
        const env = Math.min(1, 10 * t) * (1 - i / len);
        data[start + i] = 0.4 * env * Math.sin(2 * Math.PI * freq * t);
      }
    });
    return buffer;
  }

  private musicBuffer(ctx: AudioContext): AudioBuffer {
    const rate = ctx.sampleRate;
    const beat = 0.25;
    const pattern = [110, 0, 110, 0, 138.59, 0, 110, 164.81]; // 2-bar riff
    const buffer = ctx.createBuffer(1, rate * beat * pattern.length, rate);
    const data = buffer.getChannelData(0);
    pattern.forEach((freq, n) => {
      if (freq === 0) return;
      const start = Math.floor(n * beat * rate);
      const len = Math.floor(beat * 0.8 * rate);
      for (let i = 0; i < len; i++) {
        const t = i / rate;
        const env = Math.min(1, 30 * t) * (1 - i / len);
        const square = Math.sign(Math.sin(2 * Math.PI * freq * t));
        data[start + i] = 0.12 * env * square;
      }
    });
    return buffer;
  }
}
