// WebSocket wiring: one connection, JSON both ways.

import { parseServerMsg, type ClientMsg, type ServerMsg } from "./protocol.js";

export interface Connection {
  send: (msg: ClientMsg) => void;
  close: () => void;
}

export function connect(
  url: string,
  onMsg: (msg: ServerMsg) => void,
  onStatus: (status: "open" | "closed") => void,
): Connection {
  const ws = new WebSocket(url);
  ws.onopen = () => onStatus("open");
  ws.onclose = () => onStatus("closed");
  ws.onerror = () => onStatus("closed");
  ws.onmessage = (event) => {
    const msg = parseServerMsg(String(event.data));
    if (msg) onMsg(msg);
  };
  return {
    send: (msg) => {
      if (ws.readyState === WebSocket.OPEN) ws.send(JSON.stringify(msg));
    },
    close: () => ws.close(),
  };
}
