// Rendering: sighted mode draws the first-person scene, the motor grid as
// a heat map, five fingertip indicators and a HUD. Blind mode mounts no
// canvas at all; only a status line exists in the tree.

import type { SceneEntity } from "./protocol.js";
import type { ViewModel } from "./view.js";

export interface Mounted {
  /** Draw the current view model state (no-op surface in blind mode). */
  draw: () => void;
  canvas: HTMLCanvasElement | null;
  status: HTMLElement;
}

export function mount(root: HTMLElement, view: ViewModel): Mounted {
  const status = document.createElement("div");
  status.className = "status";
  root.appendChild(status);
  if (view.mode === "blind") {
    return {
      canvas: null,
      status,
      draw: () => {
        status.textContent = view.statusLine();
      },
    };
  }
  const canvas = document.createElement("canvas");
  canvas.width = 960;
  canvas.height = 640;
  canvas.className = "scene";
  root.appendChild(canvas);
  const ctx = canvas.getContext("2d");
  return {
    canvas,
    status,
    draw: () => {
      status.textContent = view.statusLine();
      if (ctx) drawFrame(ctx, canvas, view);
    },
  };
}

function drawFrame(
  ctx: CanvasRenderingContext2D,
  canvas: HTMLCanvasElement,
  view: ViewModel,
): void {
  const w = canvas.width;
  const h = canvas.height;
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, w, h);
  const sceneH = h * 0.62;
  drawScene(ctx, view, w, sceneH);
  drawMotorGrid(ctx, view, 16, sceneH + 16, w * 0.55, h - sceneH - 32);
  drawGlove(ctx, view, w * 0.62, sceneH + 16, w * 0.36, h - sceneH - 32);
  drawHud(ctx, view, w);
}

function drawScene(
  ctx: CanvasRenderingContext2D,
  view: ViewModel,
  w: number,
  h: number,
): void {
  if (!view.scene || !view.config) return;
  const horizon = h * 0.55;
  ctx.fillStyle = "#2b2622";
  ctx.fillRect(0, horizon, w, h - horizon);
  ctx.fillStyle = "#1a2230";
  ctx.fillRect(0, 0, w, horizon);
  const fovH = view.config.fov_h;
  const sorted = [...view.scene.entities].sort((a, b) => b.distance - a.distance);
  for (const entity of sorted) drawEntity(ctx, entity, w, h, horizon, fovH);
}

function drawEntity(
  ctx: CanvasRenderingContext2D,
  entity: SceneEntity,
  w: number,
  h: number,
  horizon: number,
  fovH: number,
): void {
  const cx = (entity.azimuth / fovH + 0.5) * w;
  const size = Math.max(8, 220 / Math.max(entity.distance, 1));
  const base = horizon + (h - horizon) * Math.min(1, 4 / Math.max(entity.distance, 1));
  if (entity.kind === "Monster") {
    ctx.fillStyle = "#b9413c";
    ctx.fillRect(cx - size / 2, base - size * 1.8, size, size * 1.8);
    ctx.fillStyle = "#e8d9a0";
    ctx.fillRect(cx - size / 4, base - size * 1.6, size / 8, size / 8);
    ctx.fillRect(cx + size / 8, base - size * 1.6, size / 8, size / 8);
  } else {
    ctx.fillStyle = "#3f7f46";
    ctx.fillRect(cx - size / 2, base - size, size, size);
    ctx.fillStyle = "#57a85f";
    ctx.fillRect(cx - size / 2, base - size, size, size / 5);
  }
}

/** Heat-map color of one motor cell from its 8-bit intensity. The solid
 * gaze cell reads constant-bright; entity cells blink with their pulse, so
 * the two signatures stay visually distinct. */
export function motorCellColor(levelByte: number): string {
  const level = levelByte / 255;
  return `rgb(${Math.round(40 + 215 * level)}, ${Math.round(40 + 90 * level)}, 60)`;
}

function drawMotorGrid(
  ctx: CanvasRenderingContext2D,
  view: ViewModel,
  x: number,
  y: number,
  w: number,
  h: number,
): void {
  if (!view.motor) return;
  const { cols, rows, data } = view.motor;
  const cw = w / cols;
  const ch = h / rows;
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      ctx.fillStyle = motorCellColor(data[r * cols + c]);
      ctx.fillRect(x + c * cw + 1, y + r * ch + 1, cw - 2, ch - 2);
    }
  }
}

function drawGlove(
  ctx: CanvasRenderingContext2D,
  view: ViewModel,
  x: number,
  y: number,
  w: number,
  h: number,
): void {
  if (!view.glove) return;
  const fingers = view.glove.slice(0, 5);
  const bw = w / 5;
  fingers.forEach((level, i) => {
    const lit = level / 255;
    ctx.fillStyle = `rgb(${Math.round(30 + 60 * lit)}, ${Math.round(
      40 + 180 * lit,
    )}, ${Math.round(60 + 160 * lit)})`;
    const bh = h * (0.3 + 0.7 * lit);
    ctx.fillRect(x + i * bw + 2, y + h - bh, bw - 4, bh);
  });
}

function drawHud(ctx: CanvasRenderingContext2D, view: ViewModel, w: number): void {
  ctx.fillStyle = "#e8e8e8";
  ctx.font = "16px monospace";
  ctx.fillText(
    `score ${view.score}  tick ${view.tick}  ${view.gamePhase || "waiting"}`,
    12,
    22,
  );
  if (view.lastError) {
    ctx.fillStyle = "#e3b341";
    ctx.fillText(view.lastError, 12, 42);
  }
  const last = view.metrics[view.metrics.length - 1];
  if (last) {
    ctx.fillStyle = "#9fd49f";
    ctx.fillText(
      `game ${last.game}: score ${last.score}, accuracy ${last.accuracy.toFixed(2)}`,
      w - 360,
      22,
    );
  }
}
