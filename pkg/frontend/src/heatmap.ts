/**
 * Canvas rendering. All geometry and color decisions come from the pure
 * model module; this file only issues draw calls.
 */

import {
  AxisPair,
  DEMO_COLOR,
  Layer,
  ReproductionResult,
  SessionDocument,
  Viewport,
  colorFor,
  gridBounds,
  regionCells,
  workspaceToPixel,
} from "./model.js";

export interface Overlay {
  reproduction: ReproductionResult;
  queriedPoint: number[];
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  samples: number[][],
  axes: AxisPair,
  session: SessionDocument,
  viewport: Viewport,
  color: string,
  lineWidth: number,
): void {
  const bounds = gridBounds(session.grid, axes);
  ctx.strokeStyle = color;
  ctx.lineWidth = lineWidth;
  ctx.beginPath();
  samples.forEach((sample, index) => {
    const { x, y } = workspaceToPixel(sample[axes.x], sample[axes.y], bounds, viewport);
    if (index === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function drawMarker(
  ctx: CanvasRenderingContext2D,
  point: number[],
  axes: AxisPair,
  session: SessionDocument,
  viewport: Viewport,
  color: string,
): void {
  const bounds = gridBounds(session.grid, axes);
  const { x, y } = workspaceToPixel(point[axes.x], point[axes.y], bounds, viewport);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = "#ffffff";
  ctx.lineWidth = 1.5;
  ctx.stroke();
}

export function renderSession(
  canvas: HTMLCanvasElement,
  session: SessionDocument,
  layer: Layer,
  axes: AxisPair,
  overlay: Overlay | null,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  const viewport: Viewport = { width: canvas.width, height: canvas.height };
  ctx.clearRect(0, 0, viewport.width, viewport.height);
  ctx.fillStyle = "#f5f5f2";
  ctx.fillRect(0, 0, viewport.width, viewport.height);

  for (const cell of regionCells(session, layer, axes, viewport)) {
    ctx.fillStyle = cell.color;
    ctx.globalAlpha = cell.dimmed ? 0.9 : 0.82;
    ctx.fillRect(cell.x, cell.y, cell.width, cell.height);
  }
  ctx.globalAlpha = 1.0;

  drawPolyline(ctx, session.demo.samples, axes, session, viewport, DEMO_COLOR, 2.5);
  drawMarker(ctx, session.demo.samples[0], axes, session, viewport, DEMO_COLOR);

  if (overlay) {
    const color = colorFor(overlay.reproduction.representation);
    drawPolyline(ctx, overlay.reproduction.trajectory.samples, axes, session, viewport, color, 2.5);
    drawMarker(ctx, overlay.queriedPoint, axes, session, viewport, color);
  }
}
