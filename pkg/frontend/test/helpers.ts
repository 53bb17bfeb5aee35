/** Shared test scaffolding: mounts the real page markup into jsdom and
 * replaces fetch with a scriptable fake that records every exchange, so
 * tests can compare rendered values against the exact response payloads. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { Diag, DriftInfo, RankEntry } from "../src/api.js";
import type { AppElements } from "../src/app.js";

const here = dirname(fileURLToPath(import.meta.url));

export function mountPage(): void {
  const html = readFileSync(join(here, "../src/index.html"), "utf8");
  const body = html.slice(
    html.indexOf("<body>") + "<body>".length,
    html.indexOf("</body>"),
  );
  // drop the module script tag; tests construct the app themselves
  document.body.innerHTML = body.replace(/<script[\s\S]*?<\/script>/, "");
}

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

export function elements(): AppElements {
  return {
    queryForm: byId<HTMLFormElement>("query-form"),
    queryInput: byId<HTMLInputElement>("query-input"),
    querySubmit: byId<HTMLButtonElement>("query-submit"),
    banner: byId("drift-banner"),
    errorStrip: byId("error-strip"),
    retryButton: byId<HTMLButtonElement>("retry-button"),
    results: byId("results"),
    alphaClick: byId<HTMLInputElement>("alpha-click"),
    alphaJudgment: byId<HTMLInputElement>("alpha-judgment"),
    gauge: byId("drift-gauge"),
    inspector: byId("inspector"),
    timeline: byId("timeline"),
  };
}

export async function until(
  cond: () => boolean,
  timeoutMs = 5000,
): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > timeoutMs) {
      throw new Error("condition not met in time");
    }
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}

export function probTexts(root: ParentNode = document): string[] {
  return Array.from(root.querySelectorAll(".prob")).map(
    (el) => el.textContent ?? "",
  );
}

/** Every number appearing anywhere in the given payloads, stringified the
 * same way the view stringifies them. */
export function numbersIn(payloads: readonly unknown[]): Set<string> {
  const out = new Set<string>();
  const walk = (value: unknown): void => {
    if (typeof value === "number") {
      out.add(String(value));
    } else if (Array.isArray(value)) {
      value.forEach(walk);
    } else if (value !== null && typeof value === "object") {
      Object.values(value).forEach(walk);
    }
  };
  payloads.forEach(walk);
  return out;
}

export interface Exchange {
  method: string;
  path: string;
  requestBody: unknown;
  status: number;
  responseBody: unknown;
}

export function isEventsPost(exchange: Exchange): boolean {
  return exchange.method === "POST" && exchange.path.endsWith("/events");
}

interface FetchInit {
  method?: string;
  body?: string;
}

export class FakeQir {
  readonly exchanges: Exchange[] = [];
  sessionId = "fake-session";
  dim = 181;
  queryMode = "prf";
  applied = 0;
  lastDiag: Diag | null = null;
  diagQueue: Diag[] = [];
  rankResults: RankEntry[] = [];
  driftInfo: DriftInfo | null = null;
  failNext: "network" | { status: number; detail: string } | null = null;
  gate: Promise<void> | null = null;

  install(): () => void {
    const original = globalThis.fetch;
    const handler = (input: unknown, init?: FetchInit): Promise<Response> =>
      this.handle(String(input), init);
    globalThis.fetch = handler as typeof fetch;
    return () => {
      globalThis.fetch = original;
    };
  }

  recordedNumbers(): Set<string> {
    return numbersIn(this.exchanges.map((ex) => ex.responseBody));
  }

  private async handle(url: string, init?: FetchInit): Promise<Response> {
    if (this.gate !== null) await this.gate;
    const method = init?.method ?? "GET";
    const parsed = new URL(url, "http://fake.test");
    const path = parsed.pathname + parsed.search;
    const requestBody =
      init?.body !== undefined ? (JSON.parse(init.body) as unknown) : null;

    if (this.failNext === "network") {
      this.failNext = null;
      this.exchanges.push({
        method,
        path,
        requestBody,
        status: 0,
        responseBody: null,
      });
      throw new TypeError("fetch failed");
    }
    if (this.failNext !== null) {
      const { status, detail } = this.failNext;
      this.failNext = null;
      return this.respond(method, path, requestBody, status, { detail });
    }

    if (method === "POST" && parsed.pathname === "/sessions") {
      return this.respond(method, path, requestBody, 200, {
        session_id: this.sessionId,
      });
    }
    if (method === "POST" && parsed.pathname.endsWith("/events")) {
      const diag =
        this.diagQueue.shift() ?? { p: 0.5, drift: false, rank: 1 };
      this.applied += 1;
      this.lastDiag = diag;
      return this.respond(method, path, requestBody, 200, diag);
    }
    if (parsed.pathname.endsWith("/rank")) {
      return this.respond(method, path, requestBody, 200, {
        results: this.rankResults,
      });
    }
    if (parsed.pathname.endsWith("/drift")) {
      const info: DriftInfo =
        this.driftInfo ?? {
          q: parsed.searchParams.get("q") ?? "",
          probability: 0.5,
          threshold: 0.1,
          would_drift: false,
        };
      return this.respond(method, path, requestBody, 200, info);
    }
    if (parsed.pathname.endsWith("/state")) {
      return this.respond(method, path, requestBody, 200, {
        session_id: this.sessionId,
        dim: this.dim,
        ensemble_rank: this.lastDiag?.rank ?? 1,
        history_length: this.applied,
        last_diag: this.lastDiag,
        config: {
          alpha_click: 0.3,
          alpha_judgment: 0.6,
          query_mode: this.queryMode,
          prf_k: 5,
          drift_threshold: 0.1,
        },
      });
    }
    return this.respond(method, path, requestBody, 404, {
      detail: `no fake route for ${method} ${path}`,
    });
  }

  private respond(
    method: string,
    path: string,
    requestBody: unknown,
    status: number,
    body: unknown,
  ): Response {
    this.exchanges.push({ method, path, requestBody, status, responseBody: body });
    const shape = {
      ok: status >= 200 && status < 300,
      status,
      statusText: `status ${status}`,
      json: () => Promise.resolve(JSON.parse(JSON.stringify(body)) as unknown),
    };
    return shape as unknown as Response;
  }
}
