/**
 * Workbench wiring: session loading, layer switching, the robust-threshold
 * slider, and click-to-reproduce with at most one in-flight request (a new
 * click aborts the previous one). Every answer the user sees comes from the
 * service; the UI keeps no similarity logic of its own.
 */

import { ApiError, SamlfdClient, SessionEnvelope } from "./api.js";
import { Overlay, renderSession } from "./heatmap.js";
import {
  AxisPair,
  DEMO_COLOR,
  Layer,
  REPRESENTATION_COLORS,
  SessionDocument,
  axisPairs,
  pointForPixel,
  validateSession,
} from "./model.js";

interface ViewState {
  sessionId: string | null;
  session: SessionDocument | null;
  layer: Layer;
  axes: AxisPair;
  overlay: Overlay | null;
}

const AXIS_NAMES = ["x", "y", "z"];

export class App {
  private state: ViewState = {
    sessionId: null,
    session: null,
    layer: { kind: "combined" },
    axes: { x: 0, y: 1 },
    overlay: null,
  };
  private client: SamlfdClient;
  private inflight: AbortController | null = null;

  private readonly canvas: HTMLCanvasElement;
  private readonly banner: HTMLElement;
  private readonly status: HTMLElement;
  private readonly legend: HTMLElement;
  private readonly layerControls: HTMLElement;
  private readonly axisSelect: HTMLSelectElement;
  private readonly repSelect: HTMLSelectElement;
  private readonly thresholdInput: HTMLInputElement;
  private readonly thresholdLabel: HTMLElement;

  constructor(private readonly root: HTMLElement) {
    this.client = new SamlfdClient(defaultBaseUrl());
    root.innerHTML = TEMPLATE;
    this.canvas = root.querySelector("#view") as HTMLCanvasElement;
    this.banner = root.querySelector("#banner") as HTMLElement;
    this.status = root.querySelector("#status") as HTMLElement;
    this.legend = root.querySelector("#legend") as HTMLElement;
    this.layerControls = root.querySelector("#layer-controls") as HTMLElement;
    this.axisSelect = root.querySelector("#axes") as HTMLSelectElement;
    this.repSelect = root.querySelector("#rep") as HTMLSelectElement;
    this.thresholdInput = root.querySelector("#threshold") as HTMLInputElement;
    this.thresholdLabel = root.querySelector("#threshold-label") as HTMLElement;
    this.bind();
    this.renderLegend();
  }

  private bind(): void {
    const loadButton = this.root.querySelector("#load") as HTMLButtonElement;
    loadButton.addEventListener("click", () => void this.loadSession());

    this.canvas.addEventListener("click", (event) => void this.clickToReproduce(event));
    this.canvas.addEventListener("mousemove", (event) => this.updateCursor(event));

    for (const radio of this.layerControls.querySelectorAll<HTMLInputElement>("input[name=layer]")) {
      radio.addEventListener("change", () => this.updateLayer());
    }
    this.repSelect.addEventListener("change", () => this.updateLayer());
    this.thresholdInput.addEventListener("input", () => this.updateLayer());
    this.axisSelect.addEventListener("change", () => {
      const [x, y] = this.axisSelect.value.split(",").map(Number);
      this.state.axes = { x, y };
      this.state.overlay = null;
      this.draw();
    });
  }

  private showError(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.add("visible");
  }

  private clearError(): void {
    this.banner.textContent = "";
    this.banner.classList.remove("visible");
  }

  private async loadSession(): Promise<void> {
    const baseUrl = (this.root.querySelector("#base-url") as HTMLInputElement).value;
    const shape = (this.root.querySelector("#shape") as HTMLInputElement).value.trim();
    const metric = (this.root.querySelector("#metric") as HTMLInputElement).value.trim();
    const resolution = Number((this.root.querySelector("#resolution") as HTMLInputElement).value);
    this.client = new SamlfdClient(baseUrl);
    this.clearError();
    this.status.textContent = "computing session…";
    try {
      const envelope: SessionEnvelope = await this.client.createSession({
        bundled: shape,
        metric,
        resolution,
      });
      const session = validateSession(envelope.session);
      // Overlay belongs to the previous session; drop it on change.
      this.inflight?.abort();
      this.inflight = null;
      this.state = {
        sessionId: envelope.id,
        session,
        layer: this.state.layer,
        axes: { x: 0, y: 1 },
        overlay: null,
      };
      this.populateControls(session);
      this.status.textContent =
        `session ${envelope.id.slice(0, 8)} ready: ${session.metric}, ` +
        `${session.representations.length} representations, ` +
        `${session.best_label.length} grid points`;
      this.draw();
    } catch (error) {
      this.status.textContent = "";
      this.showError(error instanceof Error ? error.message : String(error));
    }
  }

  private populateControls(session: SessionDocument): void {
    this.repSelect.innerHTML = "";
    for (const label of session.representations) {
      const option = document.createElement("option");
      option.value = label;
      option.textContent = label;
      this.repSelect.appendChild(option);
    }
    const dims = session.grid.center.length;
    this.axisSelect.innerHTML = "";
    for (const pair of axisPairs(dims)) {
      const option = document.createElement("option");
      option.value = `${pair.x},${pair.y}`;
      option.textContent = `${AXIS_NAMES[pair.x]}${AXIS_NAMES[pair.y]}`;
      this.axisSelect.appendChild(option);
    }
    (this.axisSelect.parentElement as HTMLElement).style.display = dims >= 3 ? "" : "none";
  }

  private updateLayer(): void {
    const selected = this.layerControls.querySelector<HTMLInputElement>("input[name=layer]:checked");
    const threshold = Number(this.thresholdInput.value) / 100;
    this.thresholdLabel.textContent = threshold.toFixed(2);
    if (!selected || selected.value === "combined") {
      this.state.layer = { kind: "combined" };
    } else if (selected.value === "per-rep") {
      this.state.layer = { kind: "per-rep", label: this.repSelect.value };
    } else {
      this.state.layer = { kind: "robust", threshold };
    }
    this.draw();
  }

  private updateCursor(event: MouseEvent): void {
    if (!this.state.session) return;
    const { x, y } = this.eventPixel(event);
    const point = pointForPixel(x, y, this.state.session, this.state.axes, {
      width: this.canvas.width,
      height: this.canvas.height,
    });
    this.canvas.style.cursor = point ? "crosshair" : "not-allowed";
  }

  private eventPixel(event: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return {
      x: ((event.clientX - rect.left) / rect.width) * this.canvas.width,
      y: ((event.clientY - rect.top) / rect.height) * this.canvas.height,
    };
  }

  /** Click inside the grid: fetch the best reproduction for that point. */
  async clickToReproduce(event: MouseEvent): Promise<void> {
    const { session, sessionId } = this.state;
    if (!session || !sessionId) return;
    const { x, y } = this.eventPixel(event);
    const point = pointForPixel(x, y, session, this.state.axes, {
      width: this.canvas.width,
      height: this.canvas.height,
    });
    if (point === null) return; // outside the grid: no request
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const result = await this.client.reproduce(sessionId, point, controller.signal);
      if (controller.signal.aborted) return;
      this.state.overlay = { reproduction: result, queriedPoint: point };
      this.status.textContent =
        `${result.representation} reproduction, similarity ${result.similarity.toFixed(3)}, ` +
        `raw ${session.metric} distance ${result.raw_distance.toPrecision(4)}`;
      this.clearError();
      this.draw();
    } catch (error) {
      if (controller.signal.aborted) return;
      // Overlay stays as it was; only the banner reports the failure.
      this.showError(error instanceof ApiError ? `service error: ${error.message}` : String(error));
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  private renderLegend(): void {
    this.legend.innerHTML = "";
    for (const [label, color] of Object.entries(REPRESENTATION_COLORS)) {
      const entry = document.createElement("span");
      entry.className = "legend-entry";
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.backgroundColor = color;
      entry.appendChild(swatch);
      entry.appendChild(document.createTextNode(label));
      this.legend.appendChild(entry);
    }
    const demo = document.createElement("span");
    demo.className = "legend-entry";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = DEMO_COLOR;
    demo.appendChild(swatch);
    demo.appendChild(document.createTextNode("demonstration"));
    this.legend.appendChild(demo);
  }

  private draw(): void {
    if (!this.state.session) return;
    renderSession(this.canvas, this.state.session, this.state.layer, this.state.axes, this.state.overlay);
  }
}

function defaultBaseUrl(): string {
  return (window as { SAMLFD_BASE_URL?: string }).SAMLFD_BASE_URL ?? "http://127.0.0.1:8453";
}

const TEMPLATE = `
  <div class="toolbar">
    <label>service <input id="base-url" value="http://127.0.0.1:8453" size="24"></label>
    <label>shape <input id="shape" value="s_curve" size="10"></label>
    <label>metric <input id="metric" value="frechet" size="10"></label>
    <label>resolution <input id="resolution" type="number" value="9" min="2" max="33"></label>
    <button id="load">load session</button>
  </div>
  <div id="banner" class="banner"></div>
  <div class="toolbar" id="layer-controls">
    <label><input type="radio" name="layer" value="combined" checked> regions</label>
    <label><input type="radio" name="layer" value="per-rep"> per-representation
      <select id="rep"></select></label>
    <label><input type="radio" name="layer" value="robust"> robust
      <input id="threshold" type="range" min="0" max="100" value="75">
      <span id="threshold-label">0.75</span></label>
    <label class="axis-picker">projection <select id="axes"></select></label>
  </div>
  <canvas id="view" width="720" height="620"></canvas>
  <div id="legend" class="legend"></div>
  <div id="status" class="status">load a session to begin</div>
`;
