// Page entry point: wires the websocket client, input loop, reducer, and
// renderer to the DOM. All task logic stays on the server; this file only
// moves data between the wire and the screen.

import { TeleopClient } from "./client";
import { HELD_KEYS, InputLoop } from "./input";
import { renderView, Viewport } from "./render";
import { applyMessage, initialView, markDisconnected, markPopNoop,
         SessionView } from "./state";

const VIEWPORT: Viewport = { width: 360, height: 360, margin: 20 };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/ws`;
}

function describeSubtasks(view: SessionView): string {
  if (!view.subtasks) {
    return "";
  }
  const order: (keyof NonNullable<SessionView["subtasks"]>)[] =
    ["reached", "grasped", "transferred", "completed"];
  return order
    .map((stage) => `${view.subtasks![stage] ? "[x]" : "[ ]"} ${stage}`)
    .join("  ");
}

function updatePanels(view: SessionView): void {
  el("instruction").textContent = view.instruction ?? "(waiting)";
  el("active").textContent = view.activeUtterance ?? "";
  el("alpha").textContent =
    view.alpha === null ? "?" : view.alpha.toFixed(0);
  el("alpha").className = view.alpha === 0 ? "alpha zero" : "alpha one";
  el("subtasks").textContent = describeSubtasks(view);
  el("tick").textContent = String(view.tick);

  const stack = el<HTMLUListElement>("stack");
  stack.replaceChildren();
  // top of the stack first; the display always mirrors the server
  for (const text of [...view.corrections].reverse()) {
    const item = document.createElement("li");
    item.textContent = text;
    stack.appendChild(item);
  }

  const banner = el("banner");
  if (!view.connected && !view.ended) {
    banner.textContent = "connection lost, retrying";
    banner.className = "banner bad";
  } else if (view.ended) {
    banner.textContent = "session ended";
    banner.className = "banner idle";
  } else if (view.popNoop) {
    banner.textContent = "pop ignored, stack is empty";
    banner.className = "banner idle";
  } else if (view.lastError) {
    banner.textContent = view.lastError;
    banner.className = "banner bad";
  } else {
    banner.textContent = "connected";
    banner.className = "banner ok";
  }
}

export function start(): void {
  const topCtx = el<HTMLCanvasElement>("top-view").getContext("2d")!;
  const sideCtx = el<HTMLCanvasElement>("side-view").getContext("2d")!;

  let view = initialView();
  const client = new TeleopClient(wsUrl(), (url) => new WebSocket(url));

  const redraw = () => {
    renderView(view, topCtx, sideCtx, VIEWPORT);
    updatePanels(view);
  };

  client.onMessage = (msg) => {
    view = applyMessage(view, msg);
    redraw();
  };
  client.onConnectionChange = (up) => {
    if (!up) {
      view = markDisconnected(view);
      redraw();
    }
  };

  const loop = new InputLoop(client, () => {
    const pads = navigator.getGamepads ? navigator.getGamepads() : [];
    const pad = pads && pads[0];
    return pad ? pad.axes : null;
  });
  loop.start();

  window.addEventListener("keydown", (ev) => {
    if (document.activeElement === el("correction-text")) {
      return; // typing a correction must not steer the arm
    }
    if (ev.key === " ") {
      client.sendGripperToggle();
      ev.preventDefault();
    } else if (loop.keyDown(ev.key)) {
      ev.preventDefault();
    }
  });
  window.addEventListener("keyup", (ev) => {
    if (HELD_KEYS.includes(ev.key)) {
      loop.keyUp(ev.key);
    }
  });

  const textBox = el<HTMLInputElement>("correction-text");
  const pushCorrection = () => {
    const text = textBox.value.trim();
    if (text) {
      client.sendCorrectionPush(text);
      textBox.value = "";
    }
  };
  el("push-btn").addEventListener("click", pushCorrection);
  textBox.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      pushCorrection();
    }
  });
  el("pop-btn").addEventListener("click", () => {
    if (view.corrections.length === 0) {
      view = markPopNoop(view);
      updatePanels(view);
    }
    client.sendCorrectionPop();
  });
  el("gripper-btn").addEventListener("click",
                                     () => client.sendGripperToggle());

  client.connect();
  redraw();
}

start();
