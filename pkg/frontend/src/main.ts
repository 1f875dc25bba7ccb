// Bootstrap: query parameters pick the mode and server, the whole page is
// the play surface.
//
//   index.html?mode=blind&server=ws://localhost:8765/ws&scenario=game

import { CuePlayer } from "./audio.js";
import { connect } from "./client.js";
import { InputCapture, type Plane } from "./input.js";
import { mount } from "./render.js";
import { ViewModel, type Mode } from "./view.js";

const params = new URLSearchParams(location.search);
const mode: Mode = params.get("mode") === "blind" ? "blind" : "sighted";
const scenario = params.get("scenario") ?? "game";
const server =
  params.get("server") ?? `ws://${location.host || "localhost:8765"}/ws`;

const view = new ViewModel(mode);
const root = document.getElementById("app") as HTMLElement;
const surface = mount(root, view);
const cues = new CuePlayer();

const conn = connect(
  `${server}?scenario=${encodeURIComponent(scenario)}`,
  (msg) => view.apply(msg),
  (status) => {
    view.connection = status;
  },
);

function defaultPlane(): Plane {
  const c = view.config;
  return c
    ? { xMin: c.calib_x_min, xMax: c.calib_x_max, yMin: c.calib_y_min, yMax: c.calib_y_max }
    : { xMin: -150, xMax: 150, yMin: 80, yMax: 380 };
}

// Input attaches once the handshake has delivered the calibration plane.
const waitForConfig = setInterval(() => {
  if (!view.config) return;
  clearInterval(waitForConfig);
  const capture = new InputCapture(
    () => ({ width: root.clientWidth, height: root.clientHeight }),
    defaultPlane(),
    (msg) => conn.send(msg),
  );
  capture.attach(root);
}, 50);

// Audio unlocks on the first gesture, as browsers require.
window.addEventListener("pointerdown", () => cues.ensureReady(), { once: true });

function frame(): void {
  for (const cue of view.drainAudio()) cues.play(cue);
  surface.draw();
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
