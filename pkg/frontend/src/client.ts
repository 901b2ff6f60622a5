/**
 * WebSocket plumbing: parse inbound frames into the session view, send only
 * schema-validated outbound messages.
 */

import { ClientMessage, parseInbound } from "./protocol.js";
import { SessionView } from "./state.js";

export class SimClient {
  private sock: WebSocket | null = null;
  readonly view = new SessionView();
  onchange: (() => void) | null = null;

  connect(url: string): void {
    this.sock = new WebSocket(url);
    this.sock.onmessage = (ev: MessageEvent) => {
      const msg = parseInbound(String(ev.data));
      if (msg === null) {
        this.view.malformed();
      } else if (msg.type === "snapshot") {
        this.view.acceptSnapshot(msg);
      } else if (msg.type === "event") {
        this.view.acceptEvent(msg.payload);
      } else {
        this.view.acceptEnd(msg.summary);
      }
      this.onchange?.();
    };
  }

  get connected(): boolean {
    return this.sock !== null && this.sock.readyState === WebSocket.OPEN;
  }

  send(msg: ClientMessage): void {
    // messages are validated at construction; serialize and go
    if (this.connected) this.sock!.send(JSON.stringify(msg));
  }
}
