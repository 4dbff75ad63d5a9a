// Client-side session view. Everything here is derived from received wire
// messages only; the client never simulates. Reloading mid-session rebuilds
// the whole view from the next state_update.

import { WireMessage } from "./protocol";

export interface ObjectSnapshot {
  position: [number, number, number];
  graspable: boolean;
}

export interface EnvSnapshot {
  ee_position: [number, number, number];
  ee_orientation: [number, number, number];
  gripper_closed: boolean;
  held_object: string | null;
  objects: Record<string, ObjectSnapshot>;
  workspace: { low: [number, number, number]; high: [number, number, number] };
  object_order: string[];
}

export interface Subtasks {
  reached: boolean;
  grasped: boolean;
  transferred: boolean;
  completed: boolean;
}

export interface SessionView {
  connected: boolean;
  sessionId: string | null;
  taskId: string | null;
  instruction: string | null;
  activeUtterance: string | null;
  corrections: string[];
  alpha: number | null;
  subtasks: Subtasks | null;
  env: EnvSnapshot | null;
  tick: number;
  lastError: string | null;
  /** set when a pop was sent while the server stack was already empty */
  popNoop: boolean;
  ended: boolean;
}

export function initialView(): SessionView {
  return {
    connected: false,
    sessionId: null,
    taskId: null,
    instruction: null,
    activeUtterance: null,
    corrections: [],
    alpha: null,
    subtasks: null,
    env: null,
    tick: 0,
    lastError: null,
    popNoop: false,
    ended: false,
  };
}

const EMPTY_SUBTASKS: Subtasks = {
  reached: false,
  grasped: false,
  transferred: false,
  completed: false,
};

/** Pure reducer: current view + one server frame -> next view. */
export function applyMessage(view: SessionView, msg: WireMessage): SessionView {
  switch (msg.kind) {
    case "session_start": {
      return {
        ...initialView(),
        connected: true,
        sessionId: (msg.payload.session_id as string) ?? msg.session_id,
        taskId: (msg.payload.task_id as string) ?? null,
        instruction: (msg.payload.instruction as string) ?? null,
        env: (msg.payload.scene as EnvSnapshot) ?? null,
      };
    }
    case "state_update": {
      const p = msg.payload;
      const corrections = (p.corrections as string[]) ?? view.corrections;
      return {
        ...view,
        connected: true,
        env: (p.state as EnvSnapshot) ?? view.env,
        tick: (p.tick as number) ?? view.tick,
        activeUtterance: (p.active_utterance as string) ?? view.activeUtterance,
        instruction: (p.instruction as string) ?? view.instruction,
        corrections,
        alpha: (p.alpha as number) ?? view.alpha,
        subtasks: (p.subtasks as Subtasks) ?? view.subtasks,
        // a pop acknowledgment is visible as the stack shrinking; once any
        // update arrives the no-op banner is stale either way
        popNoop: view.popNoop && corrections.length === 0 ? view.popNoop : false,
      };
    }
    case "subtask_update":
      return { ...view, subtasks: { ...EMPTY_SUBTASKS, ...(msg.payload as object) } };
    case "error":
      return { ...view, lastError: (msg.payload.message as string) ?? "unknown error" };
    case "session_end":
      return { ...view, ended: true, connected: false };
    default:
      // client-originated kinds are never reduced
      return view;
  }
}

export function markDisconnected(view: SessionView): SessionView {
  return { ...view, connected: false };
}

export function markPopNoop(view: SessionView): SessionView {
  return { ...view, popNoop: true };
}
