// Wire schema shared with the control service: JSON text frames with a kind
// tag, a session id, and strictly increasing per-direction sequence numbers.

export const SCHEMA_VERSION = 1;

export const KINDS = [
  "state_update",
  "latent_input",
  "correction_push",
  "correction_pop",
  "gripper_toggle",
  "session_start",
  "session_end",
  "subtask_update",
  "error",
] as const;

export type Kind = (typeof KINDS)[number];

export interface WireMessage {
  kind: Kind;
  payload: Record<string, unknown>;
  seq: number;
  session_id: string;
}

export class ProtocolError extends Error {}

export function serialize(msg: WireMessage): string {
  return JSON.stringify({
    v: SCHEMA_VERSION,
    kind: msg.kind,
    payload: msg.payload,
    seq: msg.seq,
    session_id: msg.session_id,
  });
}

export function parse(text: string): WireMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new ProtocolError(`frame is not valid JSON: ${err}`);
  }
  if (typeof raw !== "object" || raw === null) {
    throw new ProtocolError("frame must be a JSON object");
  }
  const d = raw as Record<string, unknown>;
  if (d.v !== SCHEMA_VERSION) {
    throw new ProtocolError(`unsupported schema version ${d.v}`);
  }
  if (!KINDS.includes(d.kind as Kind)) {
    throw new ProtocolError(`unknown message kind ${d.kind}`);
  }
  if (typeof d.seq !== "number" || d.seq < 0 || !Number.isInteger(d.seq)) {
    throw new ProtocolError(`bad sequence number ${d.seq}`);
  }
  if (typeof d.payload !== "object" || d.payload === null) {
    throw new ProtocolError("payload must be an object");
  }
  if (typeof d.session_id !== "string") {
    throw new ProtocolError("missing session id");
  }
  return {
    kind: d.kind as Kind,
    payload: d.payload as Record<string, unknown>,
    seq: d.seq,
    session_id: d.session_id,
  };
}

/** Outbound counter; the server rejects non-increasing sequence numbers. */
export class SequenceCounter {
  private next = 0;

  take(): number {
    return this.next++;
  }
}
