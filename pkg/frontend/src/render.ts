// Scene rendering: two orthographic projections of the desk drawn with the
// Canvas 2D API. The top view maps world (x, y) and the side view maps
// world (x, z). Projection math is exported separately so it can be tested
// without a canvas.

import { EnvSnapshot, SessionView } from "./state";

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

export type Plane = "top" | "side";

/**
 * Project a world point into pixel coordinates for one view. The workspace
 * box maps onto the viewport minus the margin, preserving aspect ratio and
 * centering the shorter axis. Canvas y grows downward, world axes grow
 * upward, so the second axis is flipped.
 */
export function project(point: [number, number, number],
                        env: EnvSnapshot, plane: Plane,
                        vp: Viewport): [number, number] {
  const [ax, ay] = plane === "top" ? [0, 1] : [0, 2];
  const low = env.workspace.low;
  const high = env.workspace.high;
  const spanX = high[ax] - low[ax];
  const spanY = high[ay] - low[ay];
  const innerW = vp.width - 2 * vp.margin;
  const innerH = vp.height - 2 * vp.margin;
  const scale = Math.min(innerW / spanX, innerH / spanY);
  const offX = vp.margin + (innerW - spanX * scale) / 2;
  const offY = vp.margin + (innerH - spanY * scale) / 2;
  const px = offX + (point[ax] - low[ax]) * scale;
  const py = vp.height - offY - (point[ay] - low[ay]) * scale;
  return [px, py];
}

/** Pixels per world meter used by the projection above. */
export function projectionScale(env: EnvSnapshot, plane: Plane,
                                vp: Viewport): number {
  const [ax, ay] = plane === "top" ? [0, 1] : [0, 2];
  const low = env.workspace.low;
  const high = env.workspace.high;
  return Math.min((vp.width - 2 * vp.margin) / (high[ax] - low[ax]),
                  (vp.height - 2 * vp.margin) / (high[ay] - low[ay]));
}

const OBJECT_COLORS: Record<string, string> = {
  trash: "#8d6e63",
  book: "#5c6bc0",
  cup: "#26a69a",
  marker: "#ef5350",
  plant: "#66bb6a",
};

const EE_COLOR = "#212121";
const HELD_RING = "#fbc02d";
const OBJECT_RADIUS_M = 0.02;
const EE_RADIUS_M = 0.012;

export interface RenderCounter {
  frames: number;
}

/**
 * Draw one orthographic view of the scene into a 2D context. Objects are
 * filled circles, the end effector is a dark marker whose ring is open or
 * closed with the gripper, and a held object is drawn locked to the ee
 * with a highlight ring.
 */
export function drawScene(ctx: CanvasRenderingContext2D, env: EnvSnapshot,
                          plane: Plane, vp: Viewport): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  const scale = projectionScale(env, plane, vp);

  const [x0, y0] = project(env.workspace.low, env, plane, vp);
  const [x1, y1] = project(env.workspace.high, env, plane, vp);
  ctx.strokeStyle = "#bdbdbd";
  ctx.strokeRect(Math.min(x0, x1), Math.min(y0, y1),
                 Math.abs(x1 - x0), Math.abs(y1 - y0));

  for (const name of env.object_order) {
    const obj = env.objects[name];
    if (!obj) {
      continue;
    }
    const held = env.held_object === name;
    const [px, py] = project(obj.position, env, plane, vp);
    ctx.beginPath();
    ctx.arc(px, py, OBJECT_RADIUS_M * scale, 0, 2 * Math.PI);
    ctx.fillStyle = OBJECT_COLORS[name] ?? "#9e9e9e";
    ctx.fill();
    if (held) {
      ctx.beginPath();
      ctx.arc(px, py, OBJECT_RADIUS_M * scale + 3, 0, 2 * Math.PI);
      ctx.strokeStyle = HELD_RING;
      ctx.lineWidth = 2;
      ctx.stroke();
      ctx.lineWidth = 1;
    }
    ctx.fillStyle = "#616161";
    ctx.font = "10px sans-serif";
    ctx.fillText(name, px + 6, py - 6);
  }

  const [ex, ey] = project(env.ee_position, env, plane, vp);
  ctx.beginPath();
  ctx.arc(ex, ey, EE_RADIUS_M * scale, 0, 2 * Math.PI);
  ctx.strokeStyle = EE_COLOR;
  ctx.lineWidth = 2;
  if (env.gripper_closed) {
    ctx.fillStyle = EE_COLOR;
    ctx.fill();
  }
  ctx.stroke();
  ctx.lineWidth = 1;

  ctx.fillStyle = "#424242";
  ctx.font = "11px sans-serif";
  ctx.fillText(plane === "top" ? "top (x, y)" : "side (x, z)", 6, 14);
}

/** Redraw both canvases from the current view; counts frames for tests. */
export function renderView(view: SessionView,
                           topCtx: CanvasRenderingContext2D,
                           sideCtx: CanvasRenderingContext2D,
                           vp: Viewport,
                           counter?: RenderCounter): void {
  if (!view.env) {
    return;
  }
  drawScene(topCtx, view.env, "top", vp);
  drawScene(sideCtx, view.env, "side", vp);
  if (counter) {
    counter.frames += 1;
  }
}
