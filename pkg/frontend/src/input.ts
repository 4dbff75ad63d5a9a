// Input capture: arrow keys or a gamepad stick become the 2-DoF latent
// command z in [-1, 1]^2, streamed while held. Pure mapping functions live
// at the top so tests can drive them without a browser.

export type LatentVector = [number, number];

const KEY_AXES: Record<string, LatentVector> = {
  ArrowRight: [1, 0],
  ArrowLeft: [-1, 0],
  ArrowUp: [0, 1],
  ArrowDown: [0, -1],
};

export const HELD_KEYS = Object.keys(KEY_AXES);

/** Combine currently held arrow keys into one clipped latent vector. */
export function keysToLatent(held: Iterable<string>): LatentVector {
  let x = 0;
  let y = 0;
  for (const key of held) {
    const axis = KEY_AXES[key];
    if (axis) {
      x += axis[0];
      y += axis[1];
    }
  }
  return [clip(x), clip(y)];
}

const GAMEPAD_DEADZONE = 0.15;

/** Map the left stick of a gamepad to z; small jitter snaps to zero. */
export function gamepadToLatent(axes: readonly number[]): LatentVector {
  const x = axes.length > 0 ? axes[0] : 0;
  const y = axes.length > 1 ? -axes[1] : 0; // stick-up means +y
  return [deadzone(x), deadzone(y)];
}

function clip(v: number): number {
  return Math.max(-1, Math.min(1, v));
}

function deadzone(v: number): number {
  return Math.abs(v) < GAMEPAD_DEADZONE ? 0 : clip(v);
}

export function isZero(z: LatentVector): boolean {
  return z[0] === 0 && z[1] === 0;
}

export interface InputSink {
  sendLatent(z: LatentVector): void;
  sendGripperToggle(): void;
  sendCorrectionPush(text: string): void;
  sendCorrectionPop(): void;
}

export const STREAM_INTERVAL_MS = 50; // 20 Hz, comfortably above the tick rate

/**
 * Tracks held keys and an optional gamepad, and streams the combined latent
 * vector to the sink on a fixed timer while it is nonzero. A single zero
 * frame is sent when input is released so the server stops moving.
 */
export class InputLoop {
  private held = new Set<string>();
  private lastSent: LatentVector = [0, 0];
  private timer: ReturnType<typeof setInterval> | null = null;
  private readGamepad: () => readonly number[] | null;

  constructor(private sink: InputSink,
              readGamepad?: () => readonly number[] | null) {
    this.readGamepad = readGamepad ?? (() => null);
  }

  start(): void {
    if (this.timer === null) {
      this.timer = setInterval(() => this.pump(), STREAM_INTERVAL_MS);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.held.clear();
  }

  keyDown(key: string): boolean {
    if (!(key in KEY_AXES)) {
      return false;
    }
    this.held.add(key);
    this.pump();
    return true;
  }

  keyUp(key: string): void {
    this.held.delete(key);
    this.pump();
  }

  /** Current combined latent command (keyboard wins over an idle stick). */
  current(): LatentVector {
    const fromKeys = keysToLatent(this.held);
    if (!isZero(fromKeys)) {
      return fromKeys;
    }
    const axes = this.readGamepad();
    return axes ? gamepadToLatent(axes) : fromKeys;
  }

  private pump(): void {
    const z = this.current();
    if (isZero(z) && isZero(this.lastSent)) {
      return; // stay quiet while idle
    }
    this.sink.sendLatent(z);
    this.lastSent = z;
  }
}
