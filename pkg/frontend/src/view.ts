/** DOM rendering. Probabilities are printed with String(value), full
 * precision, so what the user sees is literally the server's number. */

import type { Diag, DriftInfo, RankEntry, SessionSummary } from "./api.js";

export interface TimelineEntry {
  t: number;
  label: string;
  diag: Diag;
}

export type FeedbackKind = "click" | "judge-positive" | "judge-negative";

export interface ResultCallbacks {
  onFeedback: (docId: string, kind: FeedbackKind) => void;
}

function probSpan(value: number): HTMLElement {
  const span = document.createElement("span");
  span.className = "prob";
  span.textContent = String(value);
  return span;
}

function feedbackButton(
  label: string,
  title: string,
  onPress: () => void,
): HTMLButtonElement {
  const button = document.createElement("button");
  button.type = "button";
  button.className = "feedback";
  button.textContent = label;
  button.title = title;
  button.addEventListener("click", onPress);
  return button;
}

export function renderResults(
  container: HTMLElement,
  results: RankEntry[],
  clicked: ReadonlySet<string>,
  deltas: ReadonlyMap<string, number>,
  callbacks: ResultCallbacks,
): void {
  container.innerHTML = "";
  if (results.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "No results. Submit a query to begin.";
    container.appendChild(empty);
    return;
  }
  for (const entry of results) {
    const row = document.createElement("li");
    row.className = "result";
    row.dataset.docId = entry.doc_id;

    const delta = document.createElement("span");
    delta.className = "delta";
    const moved = deltas.get(entry.doc_id) ?? 0;
    // positive delta = moved toward the top since the previous ranking
    delta.textContent = moved > 0 ? "↑" : moved < 0 ? "↓" : "·";
    row.appendChild(delta);

    const title = document.createElement("span");
    title.className = "title";
    title.textContent = entry.title || entry.doc_id;
    row.appendChild(title);

    const id = document.createElement("span");
    id.className = "doc-id";
    id.textContent = entry.doc_id;
    row.appendChild(id);

    row.appendChild(probSpan(entry.probability));

    if (clicked.has(entry.doc_id)) {
      const mark = document.createElement("span");
      mark.className = "clicked-mark";
      mark.textContent = "clicked";
      row.appendChild(mark);
    }

    row.appendChild(
      feedbackButton("open", "click this result", () =>
        callbacks.onFeedback(entry.doc_id, "click"),
      ),
    );
    row.appendChild(
      feedbackButton("+", "judge relevant", () =>
        callbacks.onFeedback(entry.doc_id, "judge-positive"),
      ),
    );
    row.appendChild(
      feedbackButton("−", "judge not relevant", () =>
        callbacks.onFeedback(entry.doc_id, "judge-negative"),
      ),
    );
    container.appendChild(row);
  }
}

export function renderBanner(banner: HTMLElement, drifted: boolean): void {
  banner.hidden = !drifted;
  banner.textContent = drifted
    ? "New information need detected: the session rebased onto this query."
    : "";
}

export function renderGauge(gauge: HTMLElement, info: DriftInfo | null): void {
  gauge.innerHTML = "";
  if (info === null) {
    gauge.textContent = "no query yet";
    return;
  }
  const label = document.createElement("span");
  label.textContent = `Pr("${info.q}") = `;
  gauge.appendChild(label);
  gauge.appendChild(probSpan(info.probability));
  const verdict = document.createElement("span");
  verdict.className = info.would_drift ? "gauge-drift" : "gauge-ok";
  verdict.textContent = info.would_drift
    ? ` below threshold ${String(info.threshold)}`
    : ` above threshold ${String(info.threshold)}`;
  gauge.appendChild(verdict);
}

export function renderTimeline(
  container: HTMLElement,
  entries: readonly TimelineEntry[],
): void {
  container.innerHTML = "";
  for (const entry of entries) {
    const row = document.createElement("li");
    row.className = "timeline-entry";

    const label = document.createElement("span");
    label.className = "event-label";
    label.textContent = `t=${entry.t} ${entry.label} p=`;
    row.appendChild(label);
    row.appendChild(probSpan(entry.diag.p));

    if (entry.diag.drift) {
      const flag = document.createElement("span");
      flag.className = "drift-flag";
      flag.textContent = "drift";
      row.appendChild(flag);
    }
    container.appendChild(row);
  }
}

export function renderInspector(
  container: HTMLElement,
  summary: SessionSummary,
): void {
  container.innerHTML = "";
  const rows: [string, string][] = [
    ["session", summary.session_id],
    ["space dimension", String(summary.dim)],
    ["ensemble rank", String(summary.ensemble_rank)],
    ["events applied", String(summary.history_length)],
    ["query mode", summary.config.query_mode],
    ["drift threshold", String(summary.config.drift_threshold)],
  ];
  for (const [key, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = key;
    const dd = document.createElement("dd");
    dd.textContent = value;
    if (key === "events applied") dd.className = "history-length";
    container.appendChild(dt);
    container.appendChild(dd);
  }
}

export function renderError(
  strip: HTMLElement,
  retryButton: HTMLButtonElement,
  message: string | null,
  retryable: boolean,
): void {
  strip.hidden = message === null;
  strip.textContent = message ?? "";
  retryButton.hidden = !(message !== null && retryable);
}
