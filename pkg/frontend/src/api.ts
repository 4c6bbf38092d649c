/**
 * Typed client for the local service. The UI talks to the documented
 * endpoints and nothing else; the service is the single source of truth for
 * every similarity number shown.
 */

import type { ReproductionResult, SessionDocument } from "./model.js";

export interface SessionEnvelope {
  id: string;
  status: string;
  created: number;
  session: SessionDocument;
}

export interface CreateSessionRequest {
  bundled?: string;
  demo?: Record<string, unknown>;
  metric?: string;
  representations?: string[];
  constraint?: string;
  resolution?: number;
  extent?: number | number[];
  center?: number[];
  robust?: number;
}

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status?: number,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    detail = body.error ?? body.detail ?? detail;
  } catch {
    // keep the HTTP status text
  }
  throw new ApiError(detail, response.status);
}

export class SamlfdClient {
  constructor(public readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.url(path));
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const response = await fetch(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  metrics(): Promise<{ metrics: string[] }> {
    return this.get("/metrics");
  }

  representations(): Promise<{ representations: string[] }> {
    return this.get("/representations");
  }

  createSession(request: CreateSessionRequest): Promise<SessionEnvelope> {
    return this.post("/sessions", request);
  }

  getSession(id: string): Promise<SessionEnvelope> {
    return this.get(`/sessions/${id}`);
  }

  reproduce(id: string, point: number[], signal?: AbortSignal): Promise<ReproductionResult> {
    return this.post(`/sessions/${id}/reproduce`, { point }, signal);
  }
}
