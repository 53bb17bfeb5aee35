/** Wires the controls to the session API. The app keeps no model state of
 * its own: after every event it re-fetches ranking, drift, and session
 * summary, so the view is always a function of the latest responses. */

import { ApiError, QirClient } from "./api.js";
import type { Diag, DriftInfo, EventBody, RankEntry } from "./api.js";
import {
  renderBanner,
  renderError,
  renderGauge,
  renderInspector,
  renderResults,
  renderTimeline,
} from "./view.js";
import type { FeedbackKind, TimelineEntry } from "./view.js";

export interface AppElements {
  queryForm: HTMLFormElement;
  queryInput: HTMLInputElement;
  querySubmit: HTMLButtonElement;
  banner: HTMLElement;
  errorStrip: HTMLElement;
  retryButton: HTMLButtonElement;
  results: HTMLElement;
  alphaClick: HTMLInputElement;
  alphaJudgment: HTMLInputElement;
  gauge: HTMLElement;
  inspector: HTMLElement;
  timeline: HTMLElement;
}

const RANK_SIZE = 10;

export class App {
  private readonly client: QirClient;
  private readonly el: AppElements;
  private sessionId = "";
  private busy = false;
  private eventCount = 0;
  private lastQuery: string | null = null;
  private readonly clicked = new Set<string>();
  private lastPositions = new Map<string, number>();
  private readonly timeline: TimelineEntry[] = [];
  private lastAction: (() => Promise<void>) | null = null;

  constructor(client: QirClient, elements: AppElements) {
    this.client = client;
    this.el = elements;
    this.el.queryForm.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submitQuery();
    });
    this.el.retryButton.addEventListener("click", () => {
      void this.retry();
    });
  }

  async start(): Promise<void> {
    const created = await this.client.createSession();
    this.sessionId = created.session_id;
    renderBanner(this.el.banner, false);
    renderError(this.el.errorStrip, this.el.retryButton, null, false);
    renderGauge(this.el.gauge, null);
    renderTimeline(this.el.timeline, this.timeline);
    await this.refresh();
  }

  async submitQuery(): Promise<void> {
    const text = this.el.queryInput.value.trim();
    if (text === "") {
      // client-side validation: an empty query never reaches the server
      renderError(
        this.el.errorStrip,
        this.el.retryButton,
        "Enter a query first.",
        false,
      );
      return;
    }
    await this.sendEvent({ type: "query", text }, `query "${text}"`, () => {
      this.lastQuery = text;
    });
  }

  async feedback(docId: string, kind: FeedbackKind): Promise<void> {
    let event: EventBody;
    let label: string;
    if (kind === "click") {
      event = {
        type: "click",
        doc_id: docId,
        alpha: Number(this.el.alphaClick.value),
      };
      label = `click ${docId}`;
    } else {
      event = {
        type: "judgment",
        doc_id: docId,
        positive: kind === "judge-positive",
        alpha: Number(this.el.alphaJudgment.value),
      };
      label = `${kind === "judge-positive" ? "relevant" : "not relevant"} ${docId}`;
    }
    await this.sendEvent(event, label, () => {
      if (kind === "click") this.clicked.add(docId);
    });
  }

  private async sendEvent(
    event: EventBody,
    label: string,
    onApplied: () => void,
  ): Promise<void> {
    if (this.busy || this.sessionId === "") return;
    const action = async (): Promise<void> => {
      this.setBusy(true);
      try {
        const diag = await this.client.postEvent(this.sessionId, event);
        onApplied();
        this.recordEvent(label, diag);
        renderBanner(this.el.banner, diag.drift);
        renderError(this.el.errorStrip, this.el.retryButton, null, false);
        this.lastAction = null;
      } catch (err) {
        this.handleError(err, action);
        this.setBusy(false);
        return;
      }
      try {
        // the event is applied by now; a retry must only re-read state
        await this.refresh();
      } catch (err) {
        this.handleError(err, () => this.refreshGuarded());
      } finally {
        this.setBusy(false);
      }
    };
    await action();
  }

  private async refreshGuarded(): Promise<void> {
    this.setBusy(true);
    try {
      await this.refresh();
      renderError(this.el.errorStrip, this.el.retryButton, null, false);
      this.lastAction = null;
    } catch (err) {
      this.handleError(err, () => this.refreshGuarded());
    } finally {
      this.setBusy(false);
    }
  }

  private async retry(): Promise<void> {
    const action = this.lastAction;
    if (action === null || this.busy) return;
    this.lastAction = null;
    await action();
  }

  private recordEvent(label: string, diag: Diag): void {
    this.timeline.push({ t: this.eventCount, label, diag });
    this.eventCount += 1;
    renderTimeline(this.el.timeline, this.timeline);
  }

  /** Re-fetch everything the view shows from the server. */
  private async refresh(): Promise<void> {
    const ranking = await this.client.rank(this.sessionId, RANK_SIZE);
    const deltas = this.positionDeltas(ranking.results);
    renderResults(this.el.results, ranking.results, this.clicked, deltas, {
      onFeedback: (docId, kind) => {
        void this.feedback(docId, kind);
      },
    });
    if (this.lastQuery !== null) {
      const info: DriftInfo = await this.client.drift(
        this.sessionId,
        this.lastQuery,
      );
      renderGauge(this.el.gauge, info);
    }
    const summary = await this.client.state(this.sessionId);
    renderInspector(this.el.inspector, summary);
  }

  private positionDeltas(results: RankEntry[]): Map<string, number> {
    const deltas = new Map<string, number>();
    const next = new Map<string, number>();
    results.forEach((entry, index) => {
      next.set(entry.doc_id, index);
      const previous = this.lastPositions.get(entry.doc_id);
      if (previous !== undefined) {
        deltas.set(entry.doc_id, previous - index);
      }
    });
    this.lastPositions = next;
    return deltas;
  }

  private handleError(err: unknown, action: () => Promise<void>): void {
    if (err instanceof ApiError) {
      // the server rejected the event; session state is unchanged
      renderError(
        this.el.errorStrip,
        this.el.retryButton,
        err.detail,
        false,
      );
      this.lastAction = null;
    } else {
      renderError(
        this.el.errorStrip,
        this.el.retryButton,
        "Network error: the request did not reach the server.",
        true,
      );
      this.lastAction = action;
    }
  }

  private setBusy(busy: boolean): void {
    this.busy = busy;
    this.el.querySubmit.disabled = busy;
    this.el.queryInput.disabled = busy;
    for (const button of this.el.results.querySelectorAll("button")) {
      (button as HTMLButtonElement).disabled = busy;
    }
  }
}
