/** DOM layer: two panels (lamps left, displays right) over a keypad. */

import { DskyClient } from "./client.js";
import { KeyCode } from "./protocol.js";
import { displayView, lampViews } from "./view.js";

const KEYPAD: Array<{ label: string; key: KeyCode }> = [
  { label: "VERB", key: "V" }, { label: "7", key: "7" }, { label: "8", key: "8" },
  { label: "9", key: "9" }, { label: "CLR", key: "C" },
  { label: "NOUN", key: "N" }, { label: "4", key: "4" }, { label: "5", key: "5" },
  { label: "6", key: "6" }, { label: "KEY REL", key: "K" },
  { label: "+", key: "+" }, { label: "1", key: "1" }, { label: "2", key: "2" },
  { label: "3", key: "3" }, { label: "ENTR", key: "E" },
  { label: "-", key: "-" }, { label: "0", key: "0" }, { label: "RSET", key: "R" },
];

function el(tag: string, cls: string, parent: Element, text = ""): HTMLElement {
  const node = document.createElement(tag);
  node.className = cls;
  if (text) node.textContent = text;
  parent.appendChild(node);
  return node;
}

export function mountConsole(root: Element, client: DskyClient): void {
  const frame = el("div", "dsky", root);
  const lampPanel = el("div", "lamp-panel", frame);
  const right = el("div", "display-panel", frame);
  const header = el("div", "display-header", right);
  const progBox = el("div", "indicator", header);
  el("div", "indicator-label", progBox, "PROG");
  const progEl = el("div", "digits", progBox);
  const vnRow = el("div", "vn-row", right);
  const verbBox = el("div", "indicator", vnRow);
  el("div", "indicator-label", verbBox, "VERB");
  const verbEl = el("div", "digits", verbBox);
  const nounBox = el("div", "indicator", vnRow);
  el("div", "indicator-label", nounBox, "NOUN");
  const nounEl = el("div", "digits", nounBox);
  const registers = [1, 2, 3].map(() => el("div", "digits register", right));
  const keypad = el("div", "keypad", frame);
  const overlay = el("div", "overlay hidden", frame, "DISCONNECTED");
  const banner = el("div", "banner hidden", frame);
  const logEl = el("pre", "event-log", root);

  const lampEls = new Map<string, HTMLElement>();

  for (const { label, key } of KEYPAD) {
    const button = el("button", "key", keypad, label);
    button.addEventListener("click", () => client.sendKey(key));
  }

  client.onChange((state) => {
    const view = displayView(state);
    progEl.textContent = view.prog;
    verbEl.textContent = view.verb;
    nounEl.textContent = view.noun;
    view.registers.forEach((value, i) => {
      registers[i].textContent = value || " ";
    });
    for (const { name, lit } of lampViews(state.snapshot)) {
      let lamp = lampEls.get(name);
      if (!lamp) {
        lamp = el("div", "lamp", lampPanel, name);
        lampEls.set(name, lamp);
      }
      lamp.classList.toggle("lit", lit);
    }
    overlay.classList.toggle("hidden", !view.disconnected);
    banner.classList.toggle("hidden", !view.errorBanner);
    banner.textContent = view.errorBanner ?? "";
    logEl.textContent = state.log.slice(-8).join("\n");
  });
}
