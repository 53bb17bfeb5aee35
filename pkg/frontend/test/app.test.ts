import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { QirClient } from "../src/api.js";
import type { Diag, DriftInfo, RankEntry } from "../src/api.js";
import { App } from "../src/app.js";
import type { AppElements } from "../src/app.js";
import {
  FakeQir,
  elements,
  isEventsPost,
  mountPage,
  probTexts,
  until,
} from "./helpers.js";

const TIGER_DIAG: Diag = { p: 0.2722298847041601, drift: false, rank: 80 };
const CLICK_DIAG: Diag = { p: 0.38254234412305377, drift: false, rank: 151 };
const LION_DIAG: Diag = { p: 0.05345129768178383, drift: true, rank: 87 };

const TIGER_RANK: RankEntry[] = [
  { doc_id: "tiger-03", title: "Stripe camouflage", probability: 0.3891340195771571 },
  { doc_id: "tiger-01", title: "Territory marking", probability: 0.3728680481222223 },
  { doc_id: "tiger-05", title: "Riverbank ambush", probability: 0.35712395402618163 },
  { doc_id: "lion-02", title: "Pride hierarchy", probability: 0.30133753987674045 },
];

const CLICK_RANK: RankEntry[] = [
  { doc_id: "tiger-01", title: "Territory marking", probability: 0.5677796408861379 },
  { doc_id: "tiger-03", title: "Stripe camouflage", probability: 0.38913401957715713 },
  { doc_id: "tiger-05", title: "Riverbank ambush", probability: 0.3571239540261817 },
  { doc_id: "lion-02", title: "Pride hierarchy", probability: 0.20133753987674042 },
];

const LION_RANK: RankEntry[] = [
  { doc_id: "lion-07", title: "Savanna museum hall", probability: 0.4120180991428834 },
  { doc_id: "lion-01", title: "Mane development", probability: 0.39826443810790176 },
  { doc_id: "lion-09", title: "Night hunting", probability: 0.31489470122955177 },
];

const TIGER_DRIFT: DriftInfo = {
  q: "tiger",
  probability: 0.43317204918123957,
  threshold: 0.1,
  would_drift: false,
};
const CLICK_DRIFT: DriftInfo = {
  q: "tiger",
  probability: 0.5540805907021124,
  threshold: 0.1,
  would_drift: false,
};
const LION_DRIFT: DriftInfo = {
  q: "lion museum",
  probability: 0.05540805907021124,
  threshold: 0.1,
  would_drift: true,
};

let fake: FakeQir;
let restoreFetch: () => void;
let el: AppElements;
let app: App;

beforeEach(async () => {
  fake = new FakeQir();
  restoreFetch = fake.install();
  mountPage();
  el = elements();
  app = new App(new QirClient(""), el);
  await app.start();
});

afterEach(() => {
  restoreFetch();
});

function submitForm(text: string): void {
  el.queryInput.value = text;
  el.queryForm.dispatchEvent(
    new Event("submit", { bubbles: true, cancelable: true }),
  );
}

function settled(): boolean {
  return !el.querySubmit.disabled;
}

function rowFor(docId: string): HTMLElement {
  const row = el.results.querySelector(`[data-doc-id="${docId}"]`);
  if (row === null) throw new Error(`no rendered row for ${docId}`);
  return row as HTMLElement;
}

function rowProbs(): [string, string][] {
  return Array.from(el.results.querySelectorAll(".result")).map((row) => [
    (row as HTMLElement).dataset.docId ?? "",
    row.querySelector(".prob")?.textContent ?? "",
  ]);
}

describe("scripted session", () => {
  it("shows the drift banner exactly when the server flags drift, and renders server numbers verbatim", async () => {
    // fresh session: banner hidden, empty results, zero history
    expect(el.banner.hidden).toBe(true);
    expect(el.results.textContent).toContain("No results");
    expect(el.inspector.querySelector(".history-length")?.textContent).toBe("0");

    // first query: server reports no drift
    fake.diagQueue.push(TIGER_DIAG);
    fake.rankResults = TIGER_RANK;
    fake.driftInfo = TIGER_DRIFT;
    submitForm("tiger");
    await until(() => settled() && el.timeline.children.length === 1);

    expect(el.banner.hidden).toBe(true);
    expect(rowProbs()).toEqual(
      TIGER_RANK.map((r) => [r.doc_id, String(r.probability)]),
    );
    expect(el.gauge.querySelector(".prob")?.textContent).toBe(
      String(TIGER_DRIFT.probability),
    );

    // click feedback: still no drift, clicked marker appears
    fake.diagQueue.push(CLICK_DIAG);
    fake.rankResults = CLICK_RANK;
    fake.driftInfo = CLICK_DRIFT;
    (rowFor("tiger-01").querySelector("button.feedback") as HTMLButtonElement).click();
    await until(() => settled() && el.timeline.children.length === 2);

    expect(el.banner.hidden).toBe(true);
    expect(rowFor("tiger-01").querySelector(".clicked-mark")).not.toBeNull();
    expect(rowProbs()).toEqual(
      CLICK_RANK.map((r) => [r.doc_id, String(r.probability)]),
    );
    // rank deltas against the previous listing
    expect(rowFor("tiger-01").querySelector(".delta")?.textContent).toBe("↑");
    expect(rowFor("tiger-03").querySelector(".delta")?.textContent).toBe("↓");
    expect(rowFor("tiger-05").querySelector(".delta")?.textContent).toBe("·");

    // topic switch: server flags drift, banner must appear
    fake.diagQueue.push(LION_DIAG);
    fake.rankResults = LION_RANK;
    fake.driftInfo = LION_DRIFT;
    submitForm("lion museum");
    await until(() => settled() && el.timeline.children.length === 3);

    expect(el.banner.hidden).toBe(false);
    expect(el.banner.textContent).toContain("New information need");
    expect(rowProbs()).toEqual(
      LION_RANK.map((r) => [r.doc_id, String(r.probability)]),
    );

    // timeline lists the three events in order with the exact diag values
    const timelineProbs = probTexts(el.timeline);
    expect(timelineProbs).toEqual([
      String(TIGER_DIAG.p),
      String(CLICK_DIAG.p),
      String(LION_DIAG.p),
    ]);

    // inspector mirrors the state response
    const inspectorText = el.inspector.textContent ?? "";
    expect(el.inspector.querySelector(".history-length")?.textContent).toBe("3");
    expect(inspectorText).toContain("prf");
    expect(inspectorText).toContain(String(LION_DIAG.rank));

    // every probability on the page is a value some response carried
    const served = fake.recordedNumbers();
    const rendered = probTexts();
    expect(rendered.length).toBeGreaterThan(0);
    for (const text of rendered) {
      expect(served.has(text)).toBe(true);
    }
  });

  it("reproduces the model-derived view from a fresh fetch of the same state", async () => {
    fake.diagQueue.push(TIGER_DIAG, CLICK_DIAG, LION_DIAG);
    fake.rankResults = LION_RANK;
    fake.driftInfo = LION_DRIFT;
    submitForm("tiger");
    await until(() => settled() && el.timeline.children.length === 1);
    (rowFor("lion-07").querySelector("button.feedback") as HTMLButtonElement).click();
    await until(() => settled() && el.timeline.children.length === 2);
    submitForm("lion museum");
    await until(() => settled() && el.timeline.children.length === 3);

    const firstRows = rowProbs();
    const firstInspector = el.inspector.textContent;

    // a second app over the same server session renders the same
    // model-derived view; clicked marks and deltas are presentation only
    mountPage();
    const el2 = elements();
    const app2 = new App(new QirClient(""), el2);
    await app2.start();

    const secondRows = Array.from(el2.results.querySelectorAll(".result")).map(
      (row) => [
        (row as HTMLElement).dataset.docId ?? "",
        row.querySelector(".prob")?.textContent ?? "",
      ],
    );
    expect(secondRows).toEqual(firstRows);
    expect(el2.inspector.textContent).toEqual(firstInspector);
  });
});

describe("query validation and errors", () => {
  it("never sends an empty query to the server", async () => {
    const before = fake.exchanges.length;
    submitForm("   ");
    await until(() => !el.errorStrip.hidden);
    expect(fake.exchanges.length).toBe(before);
    expect(el.errorStrip.textContent).toContain("Enter a query");
    expect(el.retryButton.hidden).toBe(true);
  });

  it("shows a rejected event's detail inline and leaves the view alone", async () => {
    fake.failNext = { status: 422, detail: "query has no indexed terms" };
    submitForm("zzzzz");
    await until(() => settled() && !el.errorStrip.hidden);

    expect(el.errorStrip.textContent).toBe("query has no indexed terms");
    expect(el.retryButton.hidden).toBe(true);
    expect(el.timeline.children.length).toBe(0);
    expect(el.banner.hidden).toBe(true);
    // nothing was re-fetched after the rejected POST
    const last = fake.exchanges[fake.exchanges.length - 1];
    expect(isEventsPost(last)).toBe(true);
    expect(last.status).toBe(422);
  });

  it("reports feedback on an unknown document inline", async () => {
    fake.failNext = { status: 422, detail: "unknown document 'ghost-99'" };
    await app.feedback("ghost-99", "click");
    expect(el.errorStrip.textContent).toBe("unknown document 'ghost-99'");
    expect(el.timeline.children.length).toBe(0);
  });

  it("offers a retry after a network failure and repeats the same event", async () => {
    fake.failNext = "network";
    submitForm("tiger");
    await until(() => settled() && !el.errorStrip.hidden);

    expect(el.errorStrip.textContent).toContain("Network error");
    expect(el.retryButton.hidden).toBe(false);
    expect(el.timeline.children.length).toBe(0);

    fake.diagQueue.push(TIGER_DIAG);
    fake.rankResults = TIGER_RANK;
    fake.driftInfo = TIGER_DRIFT;
    el.retryButton.click();
    await until(() => settled() && el.timeline.children.length === 1);

    expect(el.errorStrip.hidden).toBe(true);
    expect(el.retryButton.hidden).toBe(true);
    const posts = fake.exchanges.filter(isEventsPost);
    expect(posts.length).toBe(2);
    expect(posts[0].requestBody).toEqual(posts[1].requestBody);
    expect(rowProbs()).toEqual(
      TIGER_RANK.map((r) => [r.doc_id, String(r.probability)]),
    );
  });
});

describe("event submission", () => {
  it("keeps a single event in flight and disables submission meanwhile", async () => {
    let release!: () => void;
    fake.gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    fake.diagQueue.push(TIGER_DIAG);
    fake.rankResults = TIGER_RANK;

    el.queryInput.value = "tiger";
    const pending = app.submitQuery();
    expect(el.querySubmit.disabled).toBe(true);

    // further submissions while busy are dropped before reaching fetch
    await app.submitQuery();
    submitForm("tiger");
    expect(fake.exchanges.filter(isEventsPost).length).toBe(0);

    release();
    fake.gate = null;
    await pending;
    await until(() => settled());
    expect(fake.exchanges.filter(isEventsPost).length).toBe(1);
  });

  it("attaches the current slider values as per-event mixing weights", async () => {
    fake.diagQueue.push(TIGER_DIAG);
    fake.rankResults = TIGER_RANK;
    submitForm("tiger");
    await until(() => settled() && el.timeline.children.length === 1);

    el.alphaClick.value = "1";
    fake.diagQueue.push(CLICK_DIAG);
    (rowFor("tiger-03").querySelector("button.feedback") as HTMLButtonElement).click();
    await until(() => settled() && el.timeline.children.length === 2);

    el.alphaJudgment.value = "0";
    fake.diagQueue.push(CLICK_DIAG);
    await app.feedback("tiger-05", "judge-positive");
    fake.diagQueue.push(CLICK_DIAG);
    await app.feedback("lion-02", "judge-negative");

    const bodies = fake.exchanges.filter(isEventsPost).map((ex) => ex.requestBody);
    expect(bodies).toEqual([
      { type: "query", text: "tiger" },
      { type: "click", doc_id: "tiger-03", alpha: 1 },
      { type: "judgment", doc_id: "tiger-05", positive: true, alpha: 0 },
      { type: "judgment", doc_id: "lion-02", positive: false, alpha: 0 },
    ]);
  });
});
