/**
 * Line transports.  The console core only knows this interface; the
 * browser build uses the WebSocket flavor (via the bridge), tests and
 * terminal use the raw TCP flavor against cmd_serve directly.
 */

export type StatusListener = (connected: boolean) => void;
export type LineListener = (line: string) => void;

export interface LineTransport {
  send(line: string): void;
  onLine(cb: LineListener): void;
  onStatus(cb: StatusListener): void;
  close(): void;
}

/** Splits a byte/string stream into newline-terminated lines. */
export class LineSplitter {
  private buffer = "";

  constructor(private readonly emit: LineListener) {}

  push(chunk: string): void {
    this.buffer += chunk;
    let idx;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, idx).trim();
      this.buffer = this.buffer.slice(idx + 1);
      if (line) this.emit(line);
    }
  }
}

/** Browser transport: WebSocket with exponential-backoff reconnect. */
export class WsTransport implements LineTransport {
  private socket: WebSocket | null = null;
  private lineCbs: LineListener[] = [];
  private statusCbs: StatusListener[] = [];
  private backoffMs = 250;
  private closed = false;

  constructor(private readonly url: string) {
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoffMs = 250;
      this.statusCbs.forEach((cb) => cb(true));
    };
    socket.onmessage = (ev) => {
      const splitter = new LineSplitter((line) =>
        this.lineCbs.forEach((cb) => cb(line)),
      );
      splitter.push(String(ev.data) + "\n");
    };
    socket.onclose = () => {
      this.statusCbs.forEach((cb) => cb(false));
      if (!this.closed) {
        setTimeout(() => this.connect(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, 8000);
      }
    };
    socket.onerror = () => socket.close();
  }

  send(line: string): void {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(line);
    }
  }

  onLine(cb: LineListener): void {
    this.lineCbs.push(cb);
  }

  onStatus(cb: StatusListener): void {
    this.statusCbs.push(cb);
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
