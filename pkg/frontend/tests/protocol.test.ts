import { describe, expect, it } from "vitest";

import { KINDS, parse, ProtocolError, SequenceCounter, serialize,
         WireMessage } from "../src/protocol";

describe("wire protocol", () => {
  it("round-trips every message kind", () => {
    for (const [i, kind] of KINDS.entries()) {
      const msg: WireMessage = {
        kind,
        payload: { idx: i, nested: { ok: true }, list: [1, 2.5, "x"] },
        seq: i,
        session_id: "abc123",
      };
      expect(parse(serialize(msg))).toEqual(msg);
    }
  });

  it("rejects unknown kinds", () => {
    const text = JSON.stringify({
      v: 1, kind: "steal_robot", payload: {}, seq: 0, session_id: "s",
    });
    expect(() => parse(text)).toThrow(ProtocolError);
  });

  it("rejects wrong schema versions", () => {
    const text = JSON.stringify({
      v: 2, kind: "error", payload: {}, seq: 0, session_id: "s",
    });
    expect(() => parse(text)).toThrow(/version/);
  });

  it("rejects bad sequence numbers", () => {
    for (const seq of [-1, 1.5, "7", null]) {
      const text = JSON.stringify({
        v: 1, kind: "error", payload: {}, seq, session_id: "s",
      });
      expect(() => parse(text)).toThrow(ProtocolError);
    }
  });

  it("rejects frames that are not JSON objects", () => {
    expect(() => parse("not json {{")).toThrow(ProtocolError);
    expect(() => parse("[1, 2, 3]")).toThrow(ProtocolError);
    expect(() => parse("42")).toThrow(ProtocolError);
  });

  it("rejects missing payload or session id", () => {
    expect(() => parse(JSON.stringify(
      { v: 1, kind: "error", seq: 0, session_id: "s" }))).toThrow();
    expect(() => parse(JSON.stringify(
      { v: 1, kind: "error", payload: {}, seq: 0 }))).toThrow();
  });

  it("counts sequences from zero without gaps", () => {
    const counter = new SequenceCounter();
    for (let i = 0; i < 50; i++) {
      expect(counter.take()).toBe(i);
    }
  });
});
