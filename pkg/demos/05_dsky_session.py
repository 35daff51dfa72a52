"""Drive a DSKY session over the wire protocol.

Starts the session server on an ephemeral port, connects a socket
client, runs the VERB 35 lamp test, then puts a monitor verb on the
counter program's cell and watches R1 climb.
"""

import json
import socket
import time
from pathlib import Path

from agcsim import DskyServer, ExecConfig, Executive, MachineState, MemorySystem, assemble

SOURCE = (Path(__file__).parent.parent / "tests" / "fixtures"
          / "counter.agc").read_text()

mem = MemorySystem()
mem.load_rope(assemble(SOURCE).image)
ex = Executive(mem, MachineState(mem),
               config=ExecConfig(alarm_policy="halt", lamp_test_s=0.3))
server = DskyServer(ex, port=0, snapshot_interval=0.02)
server.start()
print("serving on %s:%d" % (server.host, server.port))

sock = socket.create_connection((server.host, server.port))
lines = sock.makefile("r")
send = lambda obj: sock.sendall((json.dumps(obj) + "\n").encode())

print("initial:", lines.readline().strip())

for key in "V35E":
    send({"type": "key", "key": key})
deadline = time.monotonic() + 2
while time.monotonic() < deadline:
    msg = json.loads(lines.readline())
    if msg["type"] == "dsky" and all(msg["lamps"].values()):
        print("lamp test: all %d lamps lit" % len(msg["lamps"]))
        break

for key in "V16N25E":            # monitor noun 25 = the counter cell
    send({"type": "key", "key": key})
seen = []
while len(seen) < 5:
    msg = json.loads(lines.readline())
    if msg["type"] == "dsky" and msg["r1"] and msg["r1"] not in seen:
        seen.append(msg["r1"])
print("R1 over five snapshots:", seen)

sock.close()
server.stop()
