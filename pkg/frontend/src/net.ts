// WebSocket wiring: one full-duplex socket carries commands out and
// telemetry in. Commands are sent only while the socket is open; the UI
// auto-reconnects so a reopened page resumes from live telemetry.

import { CommandStream } from "./protocol.js";
import { Connection } from "./state.js";

export interface CockpitSocket {
  /** Send a stylus command; silently dropped unless connected. */
  sendStylus(cm: [number, number]): void;
  close(): void;
}

export function openCockpitSocket(
  url: string,
  onMessage: (raw: string) => void,
  onStatus: (status: Connection) => void,
  reconnectMs = 1000,
): CockpitSocket {
  const commands = new CommandStream();
  let ws: WebSocket | null = null;
  let closed = false;

  function connect(): void {
    if (closed) return;
    onStatus("connecting");
    ws = new WebSocket(url);
    ws.onopen = () => onStatus("open");
    ws.onmessage = (ev) => onMessage(String(ev.data));
    ws.onclose = () => {
      onStatus("closed");
      ws = null;
      if (!closed) setTimeout(connect, reconnectMs);
    };
    ws.onerror = () => ws?.close();
  }

  connect();
  return {
    sendStylus(cm) {
      if (ws !== null && ws.readyState === WebSocket.OPEN) {
        ws.send(commands.next(cm));
      }
    },
    close() {
      closed = true;
      ws?.close();
    },
  };
}
