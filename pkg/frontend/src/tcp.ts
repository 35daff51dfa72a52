/** Node-only transport: raw TCP to the emulator's serve endpoint. */

import net from "node:net";

import { LineSplitter, LineTransport, LineListener, StatusListener } from "./transport.js";

export class TcpTransport implements LineTransport {
  private socket: net.Socket;
  private lineCbs: LineListener[] = [];
  private statusCbs: StatusListener[] = [];
  private splitter = new LineSplitter((line) =>
    this.lineCbs.forEach((cb) => cb(line)),
  );

  constructor(host: string, port: number) {
    this.socket = net.createConnection({ host, port });
    this.socket.setEncoding("utf-8");
    this.socket.on("connect", () => this.statusCbs.forEach((cb) => cb(true)));
    this.socket.on("data", (chunk: string) => this.splitter.push(chunk));
    this.socket.on("close", () => this.statusCbs.forEach((cb) => cb(false)));
    this.socket.on("error", () => {
      /* close fires afterwards */
    });
  }

  send(line: string): void {
    this.socket.write(line + "\n");
  }

  onLine(cb: LineListener): void {
    this.lineCbs.push(cb);
  }

  onStatus(cb: StatusListener): void {
    this.statusCbs.push(cb);
  }

  close(): void {
    this.socket.destroy();
  }
}
