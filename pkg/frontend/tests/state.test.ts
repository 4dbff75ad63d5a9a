import { describe, expect, it } from "vitest";

import { WireMessage } from "../src/protocol";
import { applyMessage, EnvSnapshot, initialView, markDisconnected,
         markPopNoop } from "../src/state";

function env(ee: [number, number, number] = [0.4, 0, 0.2]): EnvSnapshot {
  return {
    ee_position: ee,
    ee_orientation: [0, 0, 0],
    gripper_closed: false,
    held_object: null,
    objects: {
      cup: { position: [0.5, 0.1, 0.05], graspable: true },
    },
    workspace: { low: [0.2, -0.35, 0.02], high: [0.75, 0.35, 0.45] },
    object_order: ["cup"],
  };
}

function frame(kind: WireMessage["kind"], payload: Record<string, unknown>,
               seq = 0): WireMessage {
  return { kind, payload, seq, session_id: "sess" };
}

function stateUpdate(overrides: Record<string, unknown> = {}): WireMessage {
  return frame("state_update", {
    tick: 7,
    state: env([0.41, 0.02, 0.2]),
    active_utterance: "pick up the cup",
    instruction: "pick up the cup",
    corrections: [],
    alpha: 1,
    subtasks: { reached: false, grasped: false,
                transferred: false, completed: false },
    z: [0, 0],
    a: [0, 0, 0, 0, 0, 0],
    ...overrides,
  });
}

describe("session view reducer", () => {
  it("initializes from session_start", () => {
    const view = applyMessage(initialView(), frame("session_start", {
      session_id: "sess",
      task_id: "pick-cup",
      instruction: "pick up the cup",
      scene: env(),
    }));
    expect(view.connected).toBe(true);
    expect(view.taskId).toBe("pick-cup");
    expect(view.instruction).toBe("pick up the cup");
    expect(view.env?.ee_position).toEqual([0.4, 0, 0.2]);
  });

  it("mirrors the server stack exactly, with no local edits", () => {
    let view = applyMessage(initialView(), stateUpdate());
    expect(view.corrections).toEqual([]);
    view = applyMessage(view, stateUpdate(
      { corrections: ["go left", "tilt down"], alpha: 0 }));
    expect(view.corrections).toEqual(["go left", "tilt down"]);
    expect(view.alpha).toBe(0);
    view = applyMessage(view, stateUpdate({ corrections: ["go left"] }));
    expect(view.corrections).toEqual(["go left"]);
  });

  it("rebuilds a full view from a single state_update after reload", () => {
    const fresh = applyMessage(initialView(), stateUpdate());
    expect(fresh.env?.ee_position).toEqual([0.41, 0.02, 0.2]);
    expect(fresh.tick).toBe(7);
    expect(fresh.activeUtterance).toBe("pick up the cup");
    expect(fresh.alpha).toBe(1);
    expect(fresh.subtasks?.reached).toBe(false);
  });

  it("applies subtask updates", () => {
    let view = applyMessage(initialView(), stateUpdate());
    view = applyMessage(view, frame("subtask_update", {
      reached: true, grasped: true, transferred: false, completed: false,
    }));
    expect(view.subtasks).toEqual({
      reached: true, grasped: true, transferred: false, completed: false,
    });
  });

  it("keeps the latest error message", () => {
    let view = applyMessage(initialView(), frame("error",
      { message: "z must have 2 axes" }));
    expect(view.lastError).toBe("z must have 2 axes");
    view = applyMessage(view, frame("error", {}));
    expect(view.lastError).toBe("unknown error");
  });

  it("marks the session ended and disconnected on session_end", () => {
    let view = applyMessage(initialView(), stateUpdate());
    view = applyMessage(view, frame("session_end", { ticks: 7 }));
    expect(view.ended).toBe(true);
    expect(view.connected).toBe(false);
  });

  it("ignores client-originated kinds", () => {
    const view = applyMessage(initialView(), stateUpdate());
    const after = applyMessage(view, frame("latent_input", { z: [1, 0] }));
    expect(after).toEqual(view);
  });

  it("clears the pop no-op banner once the stack is nonempty again", () => {
    let view = applyMessage(initialView(), stateUpdate());
    view = markPopNoop(view);
    expect(view.popNoop).toBe(true);
    view = applyMessage(view, stateUpdate({ corrections: [] }));
    expect(view.popNoop).toBe(true);
    view = applyMessage(view, stateUpdate({ corrections: ["go left"] }));
    expect(view.popNoop).toBe(false);
  });

  it("flags a lost connection without touching scene data", () => {
    const view = markDisconnected(applyMessage(initialView(), stateUpdate()));
    expect(view.connected).toBe(false);
    expect(view.env).not.toBeNull();
  });
});
