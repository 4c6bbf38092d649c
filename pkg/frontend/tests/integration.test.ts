/**
 * End-to-end agreement with a locally served session: the rendered region
 * grid must equal the session's winning labels cell for cell, and a scripted
 * click through the full pixel -> workspace -> service pipeline must return,
 * at every one of the 81 grid cells, the same representation the session map
 * assigns to that cell.
 */

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SamlfdClient } from "../src/api.js";
import {
  Viewport,
  cellIndexAt,
  colorFor,
  gridBounds,
  pointForPixel,
  regionCells,
  validateSession,
  workspaceToPixel,
} from "../src/model.js";

const PORT = 8765 + (process.pid % 500);
const BASE_URL = `http://127.0.0.1:${PORT}`;
const VIEWPORT: Viewport = { width: 720, height: 620 };
const XY = { x: 0, y: 1 };

let service: ChildProcess;

async function waitForService(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE_URL}/metrics`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on ${BASE_URL}: ${lastError}`);
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "samlfd.cli", "serve", "--host", "127.0.0.1", "--port", String(PORT)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  service.on("error", (error) => {
    throw new Error(`failed to start service: ${error}`);
  });
  await waitForService();
}, 40_000);

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("explorer against a live bundled-shape session", () => {
  it("renders the region grid exactly as the session labels it, and every scripted click agrees with the service's best reproduction", async () => {
    const client = new SamlfdClient(BASE_URL);
    const envelope = await client.createSession({
      bundled: "s_curve",
      metric: "frechet",
      resolution: 9,
    });
    const session = validateSession(envelope.session);
    expect(session.best_label).toHaveLength(81);

    // Rendered cells equal the session's winning labels, cell for cell.
    const cells = regionCells(session, { kind: "combined" }, XY, VIEWPORT);
    expect(cells).toHaveLength(81);
    for (const cell of cells) {
      expect(cell.color).toBe(colorFor(session.best_label[cell.index]));
    }

    // Scripted click at every grid cell: pixel -> workspace -> POST
    // /reproduce. The returned representation must match the session's
    // label for that cell (the service recomputes the best reproduction at
    // the clicked point). 100% agreement over the 9x9 grid.
    const bounds = gridBounds(session.grid, XY);
    let agreements = 0;
    for (let index = 0; index < session.grid.points.length; index += 1) {
      const gridPoint = session.grid.points[index];
      const pixel = workspaceToPixel(gridPoint[0], gridPoint[1], bounds, VIEWPORT);
      expect(cellIndexAt(pixel.x, pixel.y, session, XY, VIEWPORT)).toBe(index);
      const clicked = pointForPixel(pixel.x, pixel.y, session, XY, VIEWPORT);
      expect(clicked).not.toBeNull();
      const viaClick = await client.reproduce(envelope.id, clicked!);
      expect(viaClick.representation).toBe(session.best_label[index]);
      // Direct recomputation at the same point returns the same winner.
      const direct = await client.reproduce(envelope.id, clicked!);
      expect(direct.representation).toBe(viaClick.representation);
      expect(direct.similarity).toBe(viaClick.similarity);
      agreements += 1;
    }
    expect(agreements).toBe(81);
  }, 120_000);

  it("clicks outside the grid never reach the service", async () => {
    const client = new SamlfdClient(BASE_URL);
    const envelope = await client.createSession({
      bundled: "line",
      metric: "sse",
      resolution: 3,
    });
    const session = validateSession(envelope.session);
    expect(pointForPixel(-10, -10, session, XY, VIEWPORT)).toBeNull();
    expect(pointForPixel(VIEWPORT.width + 5, 10, session, XY, VIEWPORT)).toBeNull();
  });

  it("surfaces service validation errors", async () => {
    const client = new SamlfdClient(BASE_URL);
    await expect(client.createSession({ bundled: "not_a_shape" })).rejects.toThrow(/unknown bundled shape/);
  });
});
