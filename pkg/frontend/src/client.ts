/**
 * Console core: owns the connection, validates traffic both ways, and
 * exposes a view-model that renders purely from server snapshots.  The
 * client never simulates machine state; a schema-violating frame raises
 * the error banner and the last good frame stays on display.
 */

import {
  ClientMessage,
  ControlAction,
  DskySnapshot,
  KeyCode,
  ProtocolError,
  encodeClientMessage,
  parseServerMessage,
} from "./protocol.js";
import { LineTransport } from "./transport.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ConsoleState {
  status: ConnectionStatus;
  snapshot: DskySnapshot | null;
  pendingKey: KeyCode | null;
  schemaError: string | null;
  log: string[];
}

export type StateListener = (state: ConsoleState) => void;

const LOG_LIMIT = 200;

export class DskyClient {
  readonly state: ConsoleState = {
    status: "connecting",
    snapshot: null,
    pendingKey: null,
    schemaError: null,
    log: [],
  };

  private listeners: StateListener[] = [];
  private queue: string[] = [];

  constructor(private readonly transport: LineTransport) {
    transport.onLine((line) => this.handleLine(line));
    transport.onStatus((connected) => this.handleStatus(connected));
  }

  onChange(cb: StateListener): void {
    this.listeners.push(cb);
  }

  private notify(): void {
    this.listeners.forEach((cb) => cb(this.state));
  }

  private logLine(text: string): void {
    this.state.log.push(text);
    if (this.state.log.length > LOG_LIMIT) {
      this.state.log.splice(0, this.state.log.length - LOG_LIMIT);
    }
  }

  private emit(msg: ClientMessage): void {
    const line = encodeClientMessage(msg);
    if (this.state.status === "connected") {
      this.transport.send(line);
    } else {
      this.queue.push(line);
      this.logLine(`queued while disconnected: ${line}`);
    }
    this.notify();
  }

  sendKey(key: KeyCode): void {
    this.state.pendingKey = key;
    this.emit({ type: "key", key });
  }

  sendControl(action: ControlAction): void {
    this.emit({ type: "control", action });
  }

  private handleStatus(connected: boolean): void {
    this.state.status = connected ? "connected" : "disconnected";
    if (connected) {
      const backlog = this.queue;
      this.queue = [];
      backlog.forEach((line) => this.transport.send(line)); // FIFO flush
    }
    this.notify();
  }

  private handleLine(line: string): void {
    try {
      const msg = parseServerMessage(line);
      if (msg.type === "dsky") {
        this.state.snapshot = msg;
        this.state.pendingKey = null;
        this.state.schemaError = null;
      } else if (msg.type === "error") {
        this.logLine(`server error ${msg.code}: ${msg.detail}`);
      } else {
        this.logLine(msg.line);
      }
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.state.schemaError = err.message; // keep the last good frame
        this.logLine(err.message);
      } else {
        throw err;
      }
    }
    this.notify();
  }

  close(): void {
    this.transport.close();
  }
}
