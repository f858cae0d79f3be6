// Session client over a line-frame transport. Strict request/reply ordering:
// one message in flight, everything else queued in arrival order. The browser
// plugs in a WebSocket transport; tests plug in whatever they like and can
// inspect the full traffic log.

import { type Message, type Reply, parseReply } from "./protocol.js";

export interface Transport {
  send(line: string): void;
  close(): void;
}

export interface TransportEvents {
  onLine(line: string): void;
  onClose(): void;
}

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface TrafficLog {
  sent: string[];
  received: string[];
}

export class SessionClient {
  private transport: Transport | null = null;
  private queue: { message: Message; resolve: (r: Reply) => void; reject: (e: Error) => void }[] = [];
  private inflight: { resolve: (r: Reply) => void; reject: (e: Error) => void } | null = null;
  status: ConnectionStatus = "connecting";
  readonly traffic: TrafficLog = { sent: [], received: [] };
  onReply: ((reply: Reply) => void) | null = null;
  onStatus: ((status: ConnectionStatus) => void) | null = null;

  attach(transport: Transport): TransportEvents {
    this.transport = transport;
    this.setStatus("open");
    return {
      onLine: (line) => this.handleLine(line),
      onClose: () => {
        this.setStatus("closed");
        const error = new Error("connection closed");
        if (this.inflight) {
          this.inflight.reject(error);
          this.inflight = null;
        }
        for (const waiting of this.queue.splice(0)) waiting.reject(error);
      },
    };
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.onStatus?.(status);
  }

  /** Queue a message; it is sent once every earlier message got its reply. */
  request(message: Message): Promise<Reply> {
    return new Promise<Reply>((resolve, reject) => {
      this.queue.push({ message, resolve, reject });
      this.pump();
    });
  }

  private pump(): void {
    if (this.inflight || !this.transport || this.status !== "open") return;
    const next = this.queue.shift();
    if (!next) return;
    const line = JSON.stringify(next.message);
    this.traffic.sent.push(line);
    this.inflight = { resolve: next.resolve, reject: next.reject };
    this.transport.send(line);
  }

  private handleLine(line: string): void {
    this.traffic.received.push(line);
    let reply: Reply;
    try {
      reply = parseReply(line);
    } catch (error) {
      this.inflight?.reject(error as Error);
      this.inflight = null;
      this.pump();
      return;
    }
    const waiter = this.inflight;
    this.inflight = null;
    waiter?.resolve(reply);
    this.onReply?.(reply);
    this.pump();
  }
}

/** Browser transport: one protocol frame per WebSocket message. */
export function attachWebSocket(client: SessionClient, socket: WebSocket): void {
  let events: TransportEvents | null = null;
  socket.addEventListener("open", () => {
    events = client.attach({
      send: (line) => socket.send(line),
      close: () => socket.close(),
    });
  });
  socket.addEventListener("message", (event) => {
    for (const line of String(event.data).split("\n")) {
      if (line.trim()) events?.onLine(line);
    }
  });
  socket.addEventListener("close", () => events?.onClose());
  socket.addEventListener("error", () => events?.onClose());
}
