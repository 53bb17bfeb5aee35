import { QirClient } from "./api.js";
import { App } from "./app.js";
import type { AppElements } from "./app.js";

function requireElement<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

export function collectElements(): AppElements {
  return {
    queryForm: requireElement<HTMLFormElement>("query-form"),
    queryInput: requireElement<HTMLInputElement>("query-input"),
    querySubmit: requireElement<HTMLButtonElement>("query-submit"),
    banner: requireElement<HTMLElement>("drift-banner"),
    errorStrip: requireElement<HTMLElement>("error-strip"),
    retryButton: requireElement<HTMLButtonElement>("retry-button"),
    results: requireElement<HTMLElement>("results"),
    alphaClick: requireElement<HTMLInputElement>("alpha-click"),
    alphaJudgment: requireElement<HTMLInputElement>("alpha-judgment"),
    gauge: requireElement<HTMLElement>("drift-gauge"),
    inspector: requireElement<HTMLElement>("inspector"),
    timeline: requireElement<HTMLElement>("timeline"),
  };
}

export function bootstrap(): App {
  // same-origin by default; tests and dev setups may point elsewhere
  const base =
    (window as { __QIR_BASE__?: string }).__QIR_BASE__ ?? "";
  const app = new App(new QirClient(base), collectElements());
  void app.start();
  return app;
}

if (typeof document !== "undefined" && document.getElementById("query-form")) {
  bootstrap();
}
