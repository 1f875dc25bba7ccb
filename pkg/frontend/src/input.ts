// Pointer-as-hand capture: the pointer position over the play surface
// stands in for the tracked hand, normalized onto the tracker's
// calibration plane; click (or Space) drives the glove trigger.

import type { ClientMsg } from "./protocol.js";

export interface Plane {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export interface SurfaceSize {
  width: number;
  height: number;
}

export const HAND_Z_MM = 150;

/** Map a pointer position (pixels, y down) onto the tracker plane (mm, y up). */
export function pointerToHand(
  px: number,
  py: number,
  surface: SurfaceSize,
  plane: Plane,
): { x: number; y: number } {
  const u = surface.width > 0 ? px / surface.width : 0.5;
  const v = surface.height > 0 ? py / surface.height : 0.5;
  return {
    x: plane.xMin + u * (plane.xMax - plane.xMin),
    y: plane.yMin + (1 - v) * (plane.yMax - plane.yMin),
  };
}

export class InputCapture {
  private pressed = false;

  constructor(
    private readonly surface: () => SurfaceSize,
    private readonly plane: Plane,
    private readonly send: (msg: ClientMsg) => void,
  ) {}

  pointerMove(px: number, py: number): void {
    const { x, y } = pointerToHand(px, py, this.surface(), this.plane);
    this.send({ type: "hand", x, y, z: HAND_Z_MM, valid: true });
  }

  pointerLeave(): void {
    this.send({ type: "hand", x: 0, y: 0, z: 0, valid: false });
  }

  triggerDown(): void {
    if (this.pressed) return; // key auto-repeat must not re-press
    this.pressed = true;
    this.send({ type: "trigger", pressed: true });
  }

  triggerUp(): void {
    if (!this.pressed) return;
    this.pressed = false;
    this.send({ type: "trigger", pressed: false });
  }

  /** Wire DOM events on the play surface element. */
  attach(el: HTMLElement): void {
    el.addEventListener("pointermove", (e: PointerEvent) =>
      this.pointerMove(e.offsetX, e.offsetY),
    );
    el.addEventListener("pointerdown", (e: PointerEvent) => {
      this.pointerMove(e.offsetX, e.offsetY);
      this.triggerDown();
    });
    el.addEventListener("pointerup", () => this.triggerUp());
    el.addEventListener("pointerleave", () => this.pointerLeave());
    window.addEventListener("keydown", (e: KeyboardEvent) => {
      if (e.code === "Space" && !e.repeat) this.triggerDown();
    });
    window.addEventListener("keyup", (e: KeyboardEvent) => {
      if (e.code === "Space") this.triggerUp();
    });
  }
}
