/**
 * Pure render-model helpers: everything on screen is a function of the
 * last snapshot plus the connection state, nothing else.
 */

import { DskySnapshot } from "./protocol.js";
import { ConsoleState } from "./client.js";

export interface LampView {
  name: string;
  lit: boolean;
}

export interface DisplayView {
  prog: string;
  verb: string;
  noun: string;
  registers: [string, string, string];
  disconnected: boolean;
  errorBanner: string | null;
}

const BLANK_REGISTER = "";

function pad2(value: string): string {
  return value.padStart(2, " ");
}

export function lampViews(snapshot: DskySnapshot | null): LampView[] {
  if (!snapshot) return [];
  return Object.entries(snapshot.lamps).map(([name, lit]) => ({ name, lit }));
}

export function displayView(state: ConsoleState): DisplayView {
  const snap = state.snapshot;
  const reg = (v: string | null | undefined) => (v == null ? BLANK_REGISTER : v);
  return {
    prog: snap ? pad2(snap.prog) : "--",
    verb: snap ? pad2(snap.verb) : "--",
    noun: snap ? pad2(snap.noun) : "--",
    registers: snap
      ? [reg(snap.r1), reg(snap.r2), reg(snap.r3)]
      : [BLANK_REGISTER, BLANK_REGISTER, BLANK_REGISTER],
    disconnected: state.status !== "connected",
    errorBanner: state.schemaError,
  };
}
