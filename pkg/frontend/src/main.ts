/** Browser entry point: connect through the bridge's WebSocket. */

import { DskyClient } from "./client.js";
import { mountConsole } from "./dom.js";
import { WsTransport } from "./transport.js";

const scheme = location.protocol === "https:" ? "wss" : "ws";
const transport = new WsTransport(`${scheme}://${location.host}/ws`);
const client = new DskyClient(transport);
mountConsole(document.getElementById("console")!, client);
