/**
 * Bridge: serves the static console and pipes WebSocket clients to the
 * emulator's TCP line protocol (one TCP session per browser tab).
 *
 *   node dist/bridge.js [--listen 8080] [--emulator 127.0.0.1:2718]
 */

import fs from "node:fs";
import http from "node:http";
import net from "node:net";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { WebSocketServer, WebSocket } from "ws";

const here = path.dirname(fileURLToPath(import.meta.url));
const rootDir = path.resolve(here, "..");

function arg(name: string, fallback: string): string {
  const idx = process.argv.indexOf(name);
  return idx >= 0 && process.argv[idx + 1] ? process.argv[idx + 1] : fallback;
}

const listenPort = Number(arg("--listen", "8080"));
const [emuHost, emuPort] = arg("--emulator", "127.0.0.1:2718").split(":");

const TYPES: Record<string, string> = {
  ".html": "text/html",
  ".js": "text/javascript",
  ".css": "text/css",
};

const server = http.createServer((req, res) => {
  const url = (req.url ?? "/").split("?")[0];
  const file = url === "/" ? "/public/index.html" : url;
  const full = path.join(rootDir, path.normalize(file));
  if (!full.startsWith(rootDir) || !fs.existsSync(full) || fs.statSync(full).isDirectory()) {
    res.writeHead(404);
    res.end("not found");
    return;
  }
  res.writeHead(200, { "content-type": TYPES[path.extname(full)] ?? "application/octet-stream" });
  fs.createReadStream(full).pipe(res);
});

const wss = new WebSocketServer({ server, path: "/ws" });

wss.on("connection", (ws: WebSocket) => {
  const tcp = net.createConnection({ host: emuHost, port: Number(emuPort) });
  tcp.setEncoding("utf-8");
  let buffer = "";
  tcp.on("data", (chunk: string) => {
    buffer += chunk;
    let idx;
    while ((idx = buffer.indexOf("\n")) >= 0) {
      const line = buffer.slice(0, idx);
      buffer = buffer.slice(idx + 1);
      if (line.trim()) ws.send(line);
    }
  });
  tcp.on("close", () => ws.close());
  tcp.on("error", () => ws.close());
  ws.on("message", (data) => tcp.write(data.toString().trim() + "\n"));
  ws.on("close", () => tcp.destroy());
});

server.listen(listenPort, () => {
  console.log(`console on http://127.0.0.1:${listenPort}/ -> emulator ${emuHost}:${emuPort}`);
});
