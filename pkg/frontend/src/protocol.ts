/**
 * The console's wire protocol: line-delimited JSON.
 *
 * Client -> server: key presses and control actions.
 * Server -> client: dsky snapshots, errors, optional trace lines.
 * Everything the console emits must pass validateClientMessage, and every
 * inbound line goes through parseServerMessage before it may touch state.
 */

export const KEY_CODES = [
  "0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
  "V", "N", "E", "C", "R", "K", "+", "-",
] as const;

export type KeyCode = (typeof KEY_CODES)[number];

export const CONTROL_ACTIONS = ["pause", "resume", "step", "restart"] as const;

export type ControlAction = (typeof CONTROL_ACTIONS)[number];

export interface KeyMessage {
  type: "key";
  key: KeyCode;
}

export interface ControlMessage {
  type: "control";
  action: ControlAction;
}

export type ClientMessage = KeyMessage | ControlMessage;

export interface DskySnapshot {
  type: "dsky";
  prog: string;
  verb: string;
  noun: string;
  r1: string | null;
  r2: string | null;
  r3: string | null;
  lamps: Record<string, boolean>;
  cycle: number;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  detail: string;
}

export interface TraceMessage {
  type: "trace";
  cycle: number;
  line: string;
}

export type ServerMessage = DskySnapshot | ErrorMessage | TraceMessage;

export class ProtocolError extends Error {}

export function isKeyCode(value: unknown): value is KeyCode {
  return typeof value === "string" && (KEY_CODES as readonly string[]).includes(value);
}

export function validateClientMessage(msg: unknown): msg is ClientMessage {
  if (typeof msg !== "object" || msg === null) return false;
  const m = msg as Record<string, unknown>;
  if (m.type === "key") {
    return isKeyCode(m.key) && Object.keys(m).length === 2;
  }
  if (m.type === "control") {
    return (
      typeof m.action === "string" &&
      (CONTROL_ACTIONS as readonly string[]).includes(m.action) &&
      Object.keys(m).length === 2
    );
  }
  return false;
}

function isRegister(v: unknown): v is string | null {
  return v === null || typeof v === "string";
}

function isDskySnapshot(m: Record<string, unknown>): m is Record<string, unknown> & DskySnapshot {
  if (m.type !== "dsky") return false;
  if (typeof m.prog !== "string" || typeof m.verb !== "string" || typeof m.noun !== "string") {
    return false;
  }
  if (!isRegister(m.r1) || !isRegister(m.r2) || !isRegister(m.r3)) return false;
  if (typeof m.cycle !== "number") return false;
  if (typeof m.lamps !== "object" || m.lamps === null) return false;
  return Object.values(m.lamps as Record<string, unknown>).every(
    (v) => typeof v === "boolean",
  );
}

/** Parse one inbound line; throws ProtocolError on schema violations. */
export function parseServerMessage(line: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    throw new ProtocolError(`not JSON: ${line.slice(0, 80)}`);
  }
  if (typeof raw !== "object" || raw === null) {
    throw new ProtocolError("message is not an object");
  }
  const m = raw as Record<string, unknown>;
  if (isDskySnapshot(m)) return m;
  if (m.type === "error" && typeof m.code === "string" && typeof m.detail === "string") {
    return m as unknown as ErrorMessage;
  }
  if (m.type === "trace" && typeof m.cycle === "number" && typeof m.line === "string") {
    return m as unknown as TraceMessage;
  }
  throw new ProtocolError(`unknown message shape: ${line.slice(0, 80)}`);
}

export function encodeClientMessage(msg: ClientMessage): string {
  if (!validateClientMessage(msg)) {
    throw new ProtocolError(`refusing to emit invalid message: ${JSON.stringify(msg)}`);
  }
  return JSON.stringify(msg);
}
