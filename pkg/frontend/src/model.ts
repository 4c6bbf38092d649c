/**
 * Pure view model: session document types, validation, the pixel/workspace
 * transform, and per-cell colors for every display layer. Everything here is
 * side-effect free so it can be unit-tested without a canvas; the UI never
 * computes similarities itself, it only renders what the service returns.
 */

export interface TrajectoryDoc {
  name?: string;
  dims: number;
  duration: number;
  samples: number[][];
}

export interface GridSpec {
  center: number[];
  extent: number[];
  resolution: number;
  points: number[][];
}

export interface SessionDocument {
  schema: string;
  demo: TrajectoryDoc;
  metric: string;
  constraint: string;
  representations: string[];
  grid: GridSpec;
  scores: Record<string, number[]>;
  raw: Record<string, Array<number | null>>;
  best_label: string[];
  best_score: number[];
  errors: Record<string, string>;
  robust?: { threshold: number; mask: boolean[] };
}

export interface ReproductionResult {
  representation: string;
  similarity: number;
  raw_distance: number;
  trajectory: { duration: number; samples: number[][] };
}

/** Repository-wide legend convention (matches the report figures). */
export const REPRESENTATION_COLORS: Record<string, string> = {
  ja: "#d1605e",
  lte: "#5ba053",
  dmp: "#4c78a8",
};
export const NEUTRAL_COLOR = "#3b3b3b";
export const FALLBACK_COLOR = "#b279a2";
export const DEMO_COLOR = "#1a1a1a";

export function colorFor(label: string): string {
  return REPRESENTATION_COLORS[label] ?? FALLBACK_COLOR;
}

export type Layer =
  | { kind: "combined" }
  | { kind: "per-rep"; label: string }
  | { kind: "robust"; threshold: number };

/** Workspace axis indices shown on the canvas (x right, y up). */
export interface AxisPair {
  x: number;
  y: number;
}

export interface Viewport {
  width: number;
  height: number;
}

export class SessionValidationError extends Error {}

export function validateSession(doc: unknown): SessionDocument {
  const fail = (reason: string): never => {
    throw new SessionValidationError(`malformed session document: ${reason}`);
  };
  if (typeof doc !== "object" || doc === null) fail("not an object");
  const session = doc as SessionDocument;
  if (!session.grid || !Array.isArray(session.grid.center)) fail("missing grid");
  const { resolution, center, extent, points } = session.grid;
  if (!Number.isInteger(resolution) || resolution < 2) fail("bad grid resolution");
  if (!Array.isArray(extent) || extent.length !== center.length) fail("bad grid extent");
  const expected = Math.pow(resolution, center.length);
  if (!Array.isArray(points) || points.length !== expected) fail("grid points do not match resolution");
  if (!Array.isArray(session.best_label) || session.best_label.length !== expected) {
    fail("best_label does not cover the grid");
  }
  if (!Array.isArray(session.best_score) || session.best_score.length !== expected) {
    fail("best_score does not cover the grid");
  }
  if (!Array.isArray(session.representations) || session.representations.length === 0) {
    fail("no representations");
  }
  for (const label of session.representations) {
    const row = session.scores?.[label];
    if (!Array.isArray(row) || row.length !== expected) fail(`scores missing for ${label}`);
  }
  if (!session.demo || !Array.isArray(session.demo.samples) || session.demo.samples.length < 2) {
    fail("missing demonstration");
  }
  return session;
}

/** Grid footprint in workspace units, padded by half a cell so cells tile it. */
export interface Bounds {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function cellSpacing(grid: GridSpec, axis: number): number {
  return (2 * grid.extent[axis]) / (grid.resolution - 1);
}

export function gridBounds(grid: GridSpec, axes: AxisPair): Bounds {
  const hx = cellSpacing(grid, axes.x) / 2;
  const hy = cellSpacing(grid, axes.y) / 2;
  return {
    xMin: grid.center[axes.x] - grid.extent[axes.x] - hx,
    xMax: grid.center[axes.x] + grid.extent[axes.x] + hx,
    yMin: grid.center[axes.y] - grid.extent[axes.y] - hy,
    yMax: grid.center[axes.y] + grid.extent[axes.y] + hy,
  };
}

/** Workspace -> canvas pixels; canvas y grows downward. */
export function workspaceToPixel(
  wx: number,
  wy: number,
  bounds: Bounds,
  viewport: Viewport,
): { x: number; y: number } {
  const x = ((wx - bounds.xMin) / (bounds.xMax - bounds.xMin)) * viewport.width;
  const y = (1 - (wy - bounds.yMin) / (bounds.yMax - bounds.yMin)) * viewport.height;
  return { x, y };
}

export function pixelToWorkspace(
  px: number,
  py: number,
  bounds: Bounds,
  viewport: Viewport,
): { wx: number; wy: number } {
  const wx = bounds.xMin + (px / viewport.width) * (bounds.xMax - bounds.xMin);
  const wy = bounds.yMin + (1 - py / viewport.height) * (bounds.yMax - bounds.yMin);
  return { wx, wy };
}

/** Axis-pair choices for a session (projection selector for 3-D grids). */
export function axisPairs(dims: number): AxisPair[] {
  if (dims >= 3) {
    return [
      { x: 0, y: 1 },
      { x: 0, y: 2 },
      { x: 1, y: 2 },
    ];
  }
  return [{ x: 0, y: 1 }];
}

function strides(resolution: number, dims: number): number[] {
  // Row-major: first axis slowest.
  const out = new Array<number>(dims).fill(1);
  for (let d = dims - 2; d >= 0; d -= 1) out[d] = out[d + 1] * resolution;
  return out;
}

/**
 * Indices of the grid points shown on screen, row-major over (axes.x,
 * axes.y). For 3-D sessions the remaining axis is sliced at its middle
 * index, matching the report figures.
 */
export function visibleIndices(grid: GridSpec, axes: AxisPair): number[] {
  const dims = grid.center.length;
  const res = grid.resolution;
  const stride = strides(res, dims);
  const fixed = new Array<number>(dims).fill(Math.floor(res / 2));
  const indices: number[] = [];
  for (let i = 0; i < res; i += 1) {
    for (let j = 0; j < res; j += 1) {
      const coordinate = fixed.slice();
      coordinate[axes.x] = i;
      coordinate[axes.y] = j;
      let flat = 0;
      for (let d = 0; d < dims; d += 1) flat += coordinate[d] * stride[d];
      indices.push(flat);
    }
  }
  return indices;
}

export interface CellRect {
  /** Flat index into the session's grid/point arrays. */
  index: number;
  x: number;
  y: number;
  width: number;
  height: number;
  color: string;
  dimmed: boolean;
}

/** Linear blend from white toward the representation color by score. */
export function scoreColor(label: string, score: number): string {
  const hex = colorFor(label);
  const r = parseInt(hex.slice(1, 3), 16);
  const g = parseInt(hex.slice(3, 5), 16);
  const b = parseInt(hex.slice(5, 7), 16);
  const clamped = Math.max(0, Math.min(1, score));
  const mix = (channel: number) => Math.round(255 + (channel - 255) * clamped);
  return `rgb(${mix(r)}, ${mix(g)}, ${mix(b)})`;
}

/** One colored rectangle per visible grid cell for the requested layer. */
export function regionCells(
  session: SessionDocument,
  layer: Layer,
  axes: AxisPair,
  viewport: Viewport,
): CellRect[] {
  const grid = session.grid;
  const bounds = gridBounds(grid, axes);
  const spacingX = cellSpacing(grid, axes.x);
  const spacingY = cellSpacing(grid, axes.y);
  const cells: CellRect[] = [];
  for (const index of visibleIndices(grid, axes)) {
    const point = grid.points[index];
    const corner = workspaceToPixel(
      point[axes.x] - spacingX / 2,
      point[axes.y] + spacingY / 2,
      bounds,
      viewport,
    );
    const opposite = workspaceToPixel(
      point[axes.x] + spacingX / 2,
      point[axes.y] - spacingY / 2,
      bounds,
      viewport,
    );
    let color: string;
    let dimmed = false;
    if (layer.kind === "per-rep") {
      color = scoreColor(layer.label, session.scores[layer.label][index]);
    } else {
      color = colorFor(session.best_label[index]);
      if (layer.kind === "robust" && session.best_score[index] < layer.threshold) {
        color = NEUTRAL_COLOR;
        dimmed = true;
      }
    }
    cells.push({
      index,
      x: corner.x,
      y: corner.y,
      width: opposite.x - corner.x,
      height: opposite.y - corner.y,
      color,
      dimmed,
    });
  }
  return cells;
}

/** Flat grid index whose cell contains the pixel, or null outside the grid. */
export function cellIndexAt(
  px: number,
  py: number,
  session: SessionDocument,
  axes: AxisPair,
  viewport: Viewport,
): number | null {
  if (px < 0 || py < 0 || px > viewport.width || py > viewport.height) return null;
  const grid = session.grid;
  const bounds = gridBounds(grid, axes);
  const { wx, wy } = pixelToWorkspace(px, py, bounds, viewport);
  const along = (value: number, axis: number): number | null => {
    const spacing = cellSpacing(grid, axis);
    const offset = (value - (grid.center[axis] - grid.extent[axis])) / spacing;
    const cell = Math.round(offset);
    return cell >= 0 && cell < grid.resolution ? cell : null;
  };
  const i = along(wx, axes.x);
  const j = along(wy, axes.y);
  if (i === null || j === null) return null;
  const visible = visibleIndices(grid, axes);
  return visible[i * grid.resolution + j];
}

/**
 * Full n-D workspace point for a click: the visible axes come from the
 * inverse transform, hidden axes sit at the grid center (the displayed
 * slice).
 */
export function pointForPixel(
  px: number,
  py: number,
  session: SessionDocument,
  axes: AxisPair,
  viewport: Viewport,
): number[] | null {
  if (cellIndexAt(px, py, session, axes, viewport) === null) return null;
  const grid = session.grid;
  const { wx, wy } = pixelToWorkspace(px, py, gridBounds(grid, axes), viewport);
  const point = grid.center.slice();
  point[axes.x] = wx;
  point[axes.y] = wy;
  return point;
}
