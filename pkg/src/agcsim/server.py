"""Line-delimited JSON session server for the DSKY console.

Inbound messages:  {"type":"key","key":"V"}  with key one of the DSKY
codes, and {"type":"control","action":"pause"|"resume"|"step"|"restart"}.
Every valid message is answered with the resulting dsky snapshot; every
malformed one with {"type":"error",...} and the session stays open.
Machine-driven display changes are broadcast, throttled to the configured
interval; snapshot cycle counts never decrease.
"""

import json
import queue
import socket
import threading
import time

from .cpu import trace_line
from .executive import KEYS, Executive


class _Client:
    def __init__(self, conn, addr):
        self.conn = conn
        self.addr = addr
        self.lock = threading.Lock()
        self.alive = True

    def send(self, obj) -> None:
        data = (json.dumps(obj, separators=(",", ":")) + "\n").encode()
        try:
            with self.lock:
                self.conn.sendall(data)
        except OSError:
            self.alive = False

    def close(self) -> None:
        self.alive = False
        try:
            self.conn.close()
        except OSError:
            pass


class DskyServer:
    """Runs an Executive session behind a TCP endpoint."""

    def __init__(self, executive: Executive, host: str = "127.0.0.1",
                 port: int = 0, snapshot_interval: float = 0.05,
                 trace: bool = False):
        self.executive = executive
        self.snapshot_interval = snapshot_interval
        self.inbound: queue.Queue = queue.Queue()
        self.clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self.sock = socket.create_server((host, port))
        self.host, self.port = self.sock.getsockname()[:2]
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._last_fields = None
        self._last_push = 0.0
        self._push_pending = False
        if trace:
            executive.config.trace_hook = self._trace_hook

    # --- socket plumbing ---------------------------------------------------

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, addr = self.sock.accept()
            except OSError:
                return
            client = _Client(conn, addr)
            with self._clients_lock:
                self.clients.append(client)
            t = threading.Thread(target=self._read_loop, args=(client,), daemon=True)
            t.start()
            self._threads.append(t)
            client.send(self.executive.snapshot())

    def _read_loop(self, client: _Client) -> None:
        try:
            with client.conn.makefile("r", encoding="utf-8") as lines:
                for line in lines:
                    if self._stop.is_set():
                        return
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        msg = json.loads(line)
                    except json.JSONDecodeError as exc:
                        self.inbound.put((client, None, str(exc)))
                        continue
                    self.inbound.put((client, msg, line))
        except OSError:
            pass
        finally:
            client.alive = False

    # --- message handling ----------------------------------------------------

    def _error(self, client: _Client, code: str, detail: str) -> None:
        client.send({"type": "error", "code": code, "detail": detail})

    def _handle(self, client: _Client, msg, raw: str) -> None:
        ex = self.executive
        if msg is None:
            self._error(client, "bad-json", raw)
            return
        if not isinstance(msg, dict):
            self._error(client, "bad-message", "expected an object")
            return
        kind = msg.get("type")
        if kind == "key":
            key = msg.get("key")
            if not isinstance(key, str) or key not in KEYS:
                self._error(client, "bad-key", repr(msg.get("key")))
                return
            ex.key_in(key)
        elif kind == "control":
            action = msg.get("action")
            if action == "pause":
                ex.paused = True
            elif action == "resume":
                ex.paused = False
            elif action == "step":
                was = ex.paused
                ex.paused = False
                ex.tick(1)
                ex.paused = was
            elif action == "restart":
                ex.restart()
            else:
                self._error(client, "bad-action", repr(action))
                return
        else:
            self._error(client, "bad-message", "unknown type %r" % kind)
            return
        client.send(ex.snapshot())

    def _trace_hook(self, report) -> None:
        self._broadcast({"type": "trace", "cycle": report.cycle,
                         "line": trace_line(report)})

    def _broadcast(self, obj) -> None:
        with self._clients_lock:
            self.clients = [c for c in self.clients if c.alive]
            targets = list(self.clients)
        for client in targets:
            client.send(obj)

    def _maybe_push(self) -> None:
        snap = self.executive.snapshot()
        fields = {k: v for k, v in snap.items() if k != "cycle"}
        if fields != self._last_fields:
            self._push_pending = True
        now = time.monotonic()
        if self._push_pending and now - self._last_push >= self.snapshot_interval:
            self._broadcast(snap)
            self._last_fields = fields
            self._last_push = now
            self._push_pending = False

    # --- the pump -------------------------------------------------------------

    def pump_once(self) -> None:
        while True:
            try:
                client, msg, raw = self.inbound.get_nowait()
            except queue.Empty:
                break
            self._handle(client, msg, raw)
        self.executive.tick()
        self._maybe_push()

    def serve_forever(self, poll: float = 0.002) -> None:
        acceptor = threading.Thread(target=self._accept_loop, daemon=True)
        acceptor.start()
        self._threads.append(acceptor)
        try:
            while not self._stop.is_set():
                self.pump_once()
                time.sleep(poll)
        finally:
            self.close()

    def start(self) -> threading.Thread:
        t = threading.Thread(target=self.serve_forever, daemon=True)
        t.start()
        return t

    def stop(self) -> None:
        self._stop.set()
        try:
            self.sock.close()
        except OSError:
            pass

    def close(self) -> None:
        self.stop()
        with self._clients_lock:
            for client in self.clients:
                client.close()
            self.clients.clear()
