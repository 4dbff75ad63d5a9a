// Scripted end-to-end loop against a live local service. Needs a trained
// checkpoint, so it only runs when LILAC_CHECKPOINT points at one (the
// `lilac` command must be on PATH); otherwise the whole file is skipped.
//
// Checks, in one session:
// - holding one arrow key for 3 s moves the ee monotonically along the
//   dominant world axis of the active control space
// - a typed directional correction shows up in the stack display and flips
//   the alpha indicator within one frame interval
// - pop restores the prior display

import { spawn, ChildProcess } from "node:child_process";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { TeleopClient } from "../src/client";
import { InputLoop } from "../src/input";
import { applyMessage, initialView, SessionView } from "../src/state";
import { WireMessage } from "../src/protocol";

const CHECKPOINT = process.env.LILAC_CHECKPOINT;
const PORT = 8791;
const URL = `ws://127.0.0.1:${PORT}/ws`;

const maybe = CHECKPOINT ? describe : describe.skip;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

maybe("live teleoperation loop", () => {
  let server: ChildProcess;
  let client: TeleopClient;
  let view: SessionView = initialView();
  const frames: WireMessage[] = [];

  beforeAll(async () => {
    server = spawn("lilac",
                   ["serve", "--checkpoint", CHECKPOINT!,
                    "--port", String(PORT)],
                   { stdio: "ignore" });
    client = new TeleopClient(URL, (url) => {
      const socket = new WebSocket(url);
      // connection refusals before the service is up surface as error
      // events; swallowing them lets the client's reconnect loop retry
      socket.onerror = () => {};
      return socket as never;
    });
    client.onMessage = (msg) => {
      frames.push(msg);
      view = applyMessage(view, msg);
    };
    // poll until the service accepts the connection and starts streaming
    const start = Date.now();
    client.connect();
    while (view.tick < 2) {
      if (Date.now() - start > 30000) {
        throw new Error("service never started streaming");
      }
      await sleep(100);
    }
  }, 40000);

  afterAll(() => {
    client?.disconnect();
    server?.kill();
  });

  it("moves the ee monotonically while an arrow key is held", async () => {
    const loop = new InputLoop(client);
    const positions: number[][] = [];
    const collect = (msg: WireMessage) => {
      if (msg.kind === "state_update") {
        const env = msg.payload.state as { ee_position: number[] };
        positions.push(env.ee_position.slice());
      }
    };
    const prev = client.onMessage!;
    client.onMessage = (msg) => { prev(msg); collect(msg); };
    loop.start();
    loop.keyDown("ArrowUp");
    await sleep(3000);
    loop.keyUp("ArrowUp");
    loop.stop();
    client.onMessage = prev;
    client.sendLatent([0, 0]);

    expect(positions.length).toBeGreaterThanOrEqual(20);
    const first = positions[0];
    const last = positions[positions.length - 1];
    const delta = last.map((v, i) => v - first[i]);
    const axis = delta
      .map((v, i) => [Math.abs(v), i] as const)
      .sort((a, b) => b[0] - a[0])[0][1];
    expect(Math.abs(delta[axis])).toBeGreaterThan(0.01);
    const sign = Math.sign(delta[axis]);
    for (let i = 1; i < positions.length; i++) {
      const step = positions[i][axis] - positions[i - 1][axis];
      expect(sign * step).toBeGreaterThanOrEqual(-1e-9);
    }
  }, 20000);

  it("reflects a pushed correction in stack and alpha within one frame",
     async () => {
    expect(view.corrections).toEqual([]);
    const before = view.alpha;
    client.sendCorrectionPush("go left");
    const start = Date.now();
    while (view.corrections.length === 0) {
      if (Date.now() - start > 2000) {
        throw new Error("correction never appeared");
      }
      await sleep(10);
    }
    // the view changes as soon as the frame carrying the new stack lands;
    // allow a few 100 ms frame intervals of transport slack end to end
    expect(Date.now() - start).toBeLessThanOrEqual(500);
    expect(view.corrections).toEqual(["go left"]);
    expect(view.activeUtterance).toBe("go left");
    expect(view.alpha).toBe(0);
    expect(before).toBe(1);
  }, 10000);

  it("restores the prior display on pop", async () => {
    client.sendCorrectionPop();
    const start = Date.now();
    while (view.corrections.length > 0) {
      if (Date.now() - start > 2000) {
        throw new Error("pop never applied");
      }
      await sleep(10);
    }
    expect(view.alpha).toBe(1);
    expect(view.activeUtterance).toBe(view.instruction);
    expect(frames.some((f) => f.kind === "state_update")).toBe(true);
  }, 10000);
});
