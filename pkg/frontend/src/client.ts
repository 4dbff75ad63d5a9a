// Websocket wrapper: frames in, typed messages out, automatic reconnect
// with a fresh sequence counter per connection. The socket constructor is
// injectable so tests can substitute a fake.

import { parse, ProtocolError, serialize, SequenceCounter,
         WireMessage } from "./protocol";
import { InputSink, LatentVector } from "./input";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  // handler params stay loose so both WebSocket and test fakes fit
  onopen: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  readyState: number;
}

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;
const RECONNECT_DELAY_MS = 1000;

export class TeleopClient implements InputSink {
  private socket: SocketLike | null = null;
  private seq = new SequenceCounter();
  private sessionId = "";
  private stopped = false;

  onMessage: ((msg: WireMessage) => void) | null = null;
  onConnectionChange: ((up: boolean) => void) | null = null;

  constructor(private url: string, private makeSocket: SocketFactory) {}

  connect(): void {
    this.stopped = false;
    this.openSocket();
  }

  disconnect(): void {
    this.stopped = true;
    this.socket?.close();
    this.socket = null;
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === OPEN;
  }

  private openSocket(): void {
    const socket = this.makeSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.seq = new SequenceCounter(); // per-direction sequences restart
      this.onConnectionChange?.(true);
    };
    socket.onclose = () => {
      this.onConnectionChange?.(false);
      if (!this.stopped) {
        setTimeout(() => this.openSocket(), RECONNECT_DELAY_MS);
      }
    };
    socket.onmessage = (ev) => {
      let msg: WireMessage;
      try {
        msg = parse(ev.data);
      } catch (err) {
        if (err instanceof ProtocolError) {
          return; // a malformed frame never kills the session
        }
        throw err;
      }
      if (msg.kind === "session_start") {
        this.sessionId = (msg.payload.session_id as string) ?? msg.session_id;
      }
      this.onMessage?.(msg);
    };
  }

  /** Returns false when disconnected; callers show a banner instead. */
  private sendFrame(kind: WireMessage["kind"],
                    payload: Record<string, unknown>): boolean {
    if (!this.connected) {
      return false;
    }
    this.socket!.send(serialize({
      kind,
      payload,
      seq: this.seq.take(),
      session_id: this.sessionId,
    }));
    return true;
  }

  sendLatent(z: LatentVector): void {
    this.sendFrame("latent_input", { z: [z[0], z[1]] });
  }

  sendGripperToggle(): void {
    this.sendFrame("gripper_toggle", {});
  }

  sendCorrectionPush(text: string): void {
    this.sendFrame("correction_push", { text });
  }

  sendCorrectionPop(): void {
    this.sendFrame("correction_pop", {});
  }
}
