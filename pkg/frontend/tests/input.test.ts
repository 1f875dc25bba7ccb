// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { HAND_Z_MM, InputCapture, pointerToHand, type Plane } from "../src/input.js";
import type { ClientMsg } from "../src/protocol.js";

const PLANE: Plane = { xMin: -150, xMax: 150, yMin: 80, yMax: 380 };
const SURFACE = { width: 800, height: 600 };

// Independent oracle: the server's hand-to-gaze mapping, reimplemented.
function gazeOf(x: number, y: number): { u: number; v: number } {
  const clamp = (t: number) => Math.min(1, Math.max(0, t));
  return {
    u: clamp((x - PLANE.xMin) / (PLANE.xMax - PLANE.xMin)),
    v: clamp(1 - (y - PLANE.yMin) / (PLANE.yMax - PLANE.yMin)),
  };
}

function capture(): { sent: ClientMsg[]; input: InputCapture } {
  const sent: ClientMsg[] = [];
  const input = new InputCapture(() => SURFACE, PLANE, (m) => sent.push(m));
  return { sent, input };
}

describe("pointerToHand", () => {
  it("maps the surface center to the volume center, gaze (0.5, 0.5)", () => {
    const { x, y } = pointerToHand(400, 300, SURFACE, PLANE);
    expect(x).toBeCloseTo(0);
    expect(y).toBeCloseTo(230);
    const { u, v } = gazeOf(x, y);
    expect(u).toBeCloseTo(0.5);
    expect(v).toBeCloseTo(0.5);
  });

  it("maps corners to plane corners", () => {
    expect(pointerToHand(0, 0, SURFACE, PLANE)).toEqual({ x: -150, y: 380 });
    expect(pointerToHand(800, 600, SURFACE, PLANE)).toEqual({ x: 150, y: 80 });
  });

  it("drag from left edge to right edge sweeps u monotonically 0 to 1", () => {
    const us: number[] = [];
    for (let px = 0; px <= 800; px += 40) {
      const { x, y } = pointerToHand(px, 300, SURFACE, PLANE);
      us.push(gazeOf(x, y).u);
    }
    for (let i = 1; i < us.length; i++) expect(us[i]).toBeGreaterThan(us[i - 1]);
    expect(us[0]).toBe(0);
    expect(us[us.length - 1]).toBe(1);
  });
});

describe("InputCapture", () => {
  it("emits hand messages with the fixed hover depth", () => {
    const { sent, input } = capture();
    input.pointerMove(400, 300);
    expect(sent).toHaveLength(1);
    const hand = sent[0];
    if (hand.type !== "hand") throw new Error("expected hand");
    expect(hand.valid).toBe(true);
    expect(hand.z).toBe(HAND_Z_MM);
  });

  it("a click is exactly one press edge then one release edge", () => {
    const { sent, input } = capture();
    input.triggerDown();
    input.triggerDown(); // auto-repeat must be swallowed
    input.triggerUp();
    input.triggerUp();
    const triggers = sent.filter((m) => m.type === "trigger");
    expect(triggers).toEqual([
      { type: "trigger", pressed: true },
      { type: "trigger", pressed: false },
    ]);
  });

  it("pointer leaving the surface invalidates the hand", () => {
    const { sent, input } = capture();
    input.pointerLeave();
    const hand = sent[0];
    if (hand.type !== "hand") throw new Error("expected hand");
    expect(hand.valid).toBe(false);
  });

  it("attaches to DOM events", () => {
    const { sent, input } = capture();
    const el = document.createElement("div");
    document.body.appendChild(el);
    input.attach(el);
    el.dispatchEvent(new PointerEvent("pointerdown", { bubbles: true }));
    el.dispatchEvent(new PointerEvent("pointerup", { bubbles: true }));
    const kinds = sent.map((m) => m.type);
    expect(kinds).toContain("hand");
    expect(kinds.filter((k) => k === "trigger")).toHaveLength(2);
  });
});
