/**
 * Scripted browser tests for the explorer, driven against the live
 * service: verdict fidelity (everything displayed is byte-identical to
 * the service response), graph highlighting, the slack slider's exact
 * flip at the closed boundary, withdrawal suggestions, and inline
 * error surfacing.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { BidWire, CycleWire, SessionClient, WhatifWire } from "../src/api.js";
import { renderApp } from "../src/render.js";
import { ExplorerViewModel } from "../src/viewmodel.js";
import { RunningService, nodeSend, startService } from "./harness.js";

let service: RunningService;

beforeAll(async () => {
  service = await startService();
});

afterAll(() => {
  service.stop();
});

// The two-round crossing history: each round's bundle is cheaper at the
// other round's prices by 1, so the digon has mean -1 and the history
// needs slack 1.
const ROUND_1: BidWire = { t: 1, p: ["2", "1"], x: ["1", "0"] };
const ROUND_2: BidWire = { t: 2, p: ["1", "2"], x: ["0", "1"] };

interface Explorer {
  vm: ExplorerViewModel;
  root: HTMLElement;
}

function mountExplorer(): Explorer {
  const root = document.createElement("div");
  document.body.append(root);
  const vm = new ExplorerViewModel(new SessionClient(service.url, nodeSend));
  vm.onChange = () => renderApp(vm, root);
  renderApp(vm, root);
  return { vm, root };
}

function q<T extends Element>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) {
    throw new Error(`missing element ${selector}`);
  }
  return node as T;
}

function text(root: ParentNode, selector: string): string {
  return q(root, selector).textContent ?? "";
}

function setInput(root: ParentNode, selector: string, value: string): void {
  q<HTMLInputElement>(root, selector).value = value;
}

async function click(ex: Explorer, selector: string): Promise<void> {
  q<HTMLButtonElement>(ex.root, selector).click();
  await ex.vm.settled();
}

async function createSession(ex: Explorer, epsilon: string): Promise<void> {
  setInput(ex.root, "#session-dimension", "2");
  q<HTMLSelectElement>(ex.root, "#session-rule").value = "garp";
  setInput(ex.root, "#session-epsilon-input", epsilon);
  await click(ex, "#create-session");
  expect(ex.vm.session).not.toBeNull();
}

async function submitWhatif(ex: Explorer, bid: BidWire): Promise<void> {
  setInput(ex.root, "#bid-t", String(bid.t));
  setInput(ex.root, "#bid-p", bid.p.join(", "));
  setInput(ex.root, "#bid-x", bid.x.join(", "));
  await click(ex, "#submit-whatif");
}

async function moveSlider(ex: Explorer, value: string): Promise<void> {
  const slider = q<HTMLInputElement>(ex.root, "#epsilon-slider");
  slider.value = value;
  slider.dispatchEvent(new Event("input"));
  await ex.vm.settled();
}

/** The violation's arcs as sorted "u->w" keys; empty for accepted. */
function cycleArcKeys(cycle: CycleWire | null): string[] {
  if (!cycle) {
    return [];
  }
  const n = cycle.vertices.length;
  const keys: string[] = [];
  for (let i = 0; i < n; i++) {
    keys.push(`${cycle.vertices[i]}->${cycle.vertices[(i + 1) % n]}`);
  }
  return keys.sort();
}

function highlightedArcKeys(root: ParentNode): string[] {
  return [...root.querySelectorAll("#graph-canvas path.arc.violating")]
    .map((p) => `${p.getAttribute("data-from")}->${p.getAttribute("data-to")}`)
    .sort();
}

/** Independent request, bypassing everything under test. */
async function rawWhatif(sessionId: string, bid: BidWire): Promise<WhatifWire> {
  const reply = await nodeSend(
    "POST",
    `${service.url}/sessions/${sessionId}/whatif`,
    JSON.stringify(bid),
  );
  expect(reply.status).toBe(200);
  return JSON.parse(reply.body) as WhatifWire;
}

describe("what-if verdict fidelity", () => {
  it("renders 20 scripted what-if verdicts byte-identical to the service", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    await click(ex, "#commit-bid");
    expect(ex.vm.snapshot?.observations).toHaveLength(2);
    const sessionId = ex.vm.session!.id;

    const script: BidWire[] = [
      // a repeat of a committed bundle and price: accepted, no change
      { t: 3, p: ["2", "1"], x: ["1", "0"] },
      // a sharp undercut of bundle #0: clearly rejected
      { t: 3, p: ["0", "5"], x: ["0", "1"] },
    ];
    for (let i = 0; i < 18; i++) {
      script.push({
        t: 3,
        p: [String(1 + ((i * 3) % 9)), String(1 + ((i * 5) % 9))],
        x: [String(i % 3), String((i + 2) % 3)],
      });
    }
    expect(script).toHaveLength(20);

    let accepted = 0;
    let rejected = 0;
    for (const bid of script) {
      await submitWhatif(ex, bid);
      const raw = await rawWhatif(sessionId, bid);

      expect(text(ex.root, "#verdict-status")).toBe(
        raw.accepted ? "accepted" : "rejected",
      );
      expect(text(ex.root, "#implied-epsilon")).toBe(raw.implied_epsilon);
      expect(text(ex.root, "#whatif-mu")).toBe(raw.mu ?? "none (no cycle)");
      expect(text(ex.root, "#whatif-delta-mu")).toBe(
        raw.delta_mu ?? "first cycle",
      );
      expect(highlightedArcKeys(ex.root)).toEqual(cycleArcKeys(raw.violation));
      if (raw.violation) {
        rejected += 1;
        expect(text(ex.root, "#violation-cycle")).toBe(
          raw.violation.vertices.join(" -> "),
        );
        expect(text(ex.root, "#violation-mean")).toBe(raw.violation.mean);
        expect(text(ex.root, "#violation-total")).toBe(raw.violation.total);
        expect(text(ex.root, "#violation-rounds")).toBe(
          (raw.violation.witness_rounds ?? []).join(", "),
        );
      } else {
        accepted += 1;
        expect(ex.root.querySelectorAll(".violating")).toHaveLength(0);
      }
    }
    expect(accepted).toBeGreaterThan(0);
    expect(rejected).toBeGreaterThan(0);

    // the session is still exactly the two committed rounds: what-if
    // never mutates
    const after = await rawWhatif(sessionId, script[0]!);
    expect(after.accepted).toBe(true);
    expect(ex.vm.snapshot?.observations).toHaveLength(2);
  });

  it("repeating a committed bundle and price is accepted with zero change", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, { t: 3, p: ["2", "1"], x: ["1", "0"] });
    expect(text(ex.root, "#verdict-status")).toBe("accepted");
    expect(text(ex.root, "#whatif-delta-mu")).toBe("0");
  });
});

describe("slack slider", () => {
  it("is disabled until a what-if is pending", async () => {
    const ex = mountExplorer();
    await createSession(ex, "0");
    expect(q<HTMLInputElement>(ex.root, "#epsilon-slider").disabled).toBe(true);
    await submitWhatif(ex, ROUND_1);
    expect(q<HTMLInputElement>(ex.root, "#epsilon-slider").disabled).toBe(false);
  });

  it("flips reject to accept exactly at the closed boundary", async () => {
    const ex = mountExplorer();
    await createSession(ex, "0");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    expect(text(ex.root, "#verdict-status")).toBe("rejected");
    expect(text(ex.root, "#implied-epsilon")).toBe("1");

    for (const below of ["0", "0.25", "0.5", "0.75"]) {
      await moveSlider(ex, below);
      expect(text(ex.root, "#slider-epsilon")).toBe(below);
      expect(text(ex.root, "#slider-status")).toBe("rejected");
      expect(text(ex.root, "#slider-implied")).toBe("1");
    }

    // at the displayed smallest accepting slack itself: accepted
    await moveSlider(ex, text(ex.root, "#implied-epsilon"));
    expect(text(ex.root, "#slider-epsilon")).toBe("1");
    expect(text(ex.root, "#slider-status")).toBe("accepted");

    await moveSlider(ex, "1.25");
    expect(text(ex.root, "#slider-status")).toBe("accepted");
  });

  it("reports when the committed history itself fails at the probed slack", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, { t: 3, p: ["2", "1"], x: ["1", "0"] });

    await moveSlider(ex, "0.5");
    expect(text(ex.root, "#slider-status")).toBe("rejected");
    expect(text(ex.root, "#slider-verdict")).toContain(
      "committed history itself fails",
    );

    await moveSlider(ex, "1");
    expect(text(ex.root, "#slider-status")).toBe("accepted");
    expect(text(ex.root, "#slider-verdict")).not.toContain("fails");
  });
});

describe("graph rendering", () => {
  it("shows an empty canvas for an empty session", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    const canvas = q(ex.root, "#graph-canvas");
    expect(canvas.childNodes).toHaveLength(0);
  });

  it("draws two nodes and highlights the digon when the slack is below 1", async () => {
    const ex = mountExplorer();
    await createSession(ex, "0.5");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    expect(text(ex.root, "#verdict-status")).toBe("rejected");

    const vertices = ex.root.querySelectorAll("#graph-canvas g.vertex");
    expect(vertices).toHaveLength(2);
    expect(ex.root.querySelectorAll("#graph-canvas g.vertex.pending-vertex")).toHaveLength(1);
    expect(highlightedArcKeys(ex.root)).toEqual(["0->1", "1->0"]);
  });

  it("labels committed arcs with their exact lengths", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    await click(ex, "#commit-bid");

    const arcs = [...ex.root.querySelectorAll("#graph-canvas path.arc")].map(
      (p) => [
        p.getAttribute("data-from"),
        p.getAttribute("data-to"),
        p.getAttribute("data-length"),
      ],
    );
    expect(arcs.sort()).toEqual([
      ["0", "1", "-1"],
      ["1", "0", "-1"],
    ]);
    const labels = [...ex.root.querySelectorAll("#graph-canvas text.arc-label")].map(
      (t) => t.textContent,
    );
    expect(labels).toEqual(["-1", "-1"]);
    // the committed history passes at slack 1: nothing highlighted
    expect(ex.root.querySelectorAll("#graph-canvas .violating")).toHaveLength(0);
  });
});

describe("withdrawal suggestions", () => {
  it("clicking a suggestion withdraws the bundle's rounds and flips the verdict", async () => {
    const ex = mountExplorer();
    await createSession(ex, "0.5");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    expect(text(ex.root, "#verdict-status")).toBe("rejected");

    const buttons = [...ex.root.querySelectorAll("button.withdraw-suggestion")];
    expect(buttons.map((b) => b.getAttribute("data-vertices"))).toEqual(["0", "1"]);
    expect(buttons[0]!.textContent).toContain("bundle #0 (round 1)");
    expect(buttons[1]!.textContent).toContain("this bid");

    (buttons[0] as HTMLButtonElement).click();
    await ex.vm.settled();

    expect(ex.vm.snapshot?.observations).toHaveLength(0);
    expect(text(ex.root, "#verdict-status")).toBe("accepted");
    expect(text(ex.root, "#error-box")).toBe("");
  });

  it("a suggestion naming only the prospective bundle retracts the bid", async () => {
    const ex = mountExplorer();
    await createSession(ex, "0.5");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);

    const retract = [...ex.root.querySelectorAll("button.withdraw-suggestion")].find(
      (b) => b.getAttribute("data-vertices") === "1",
    );
    (retract as HTMLButtonElement).click();
    await ex.vm.settled();

    expect(ex.vm.pending).toBeNull();
    expect(ex.vm.snapshot?.observations).toHaveLength(1);
    expect(ex.root.querySelector("#verdict-status")).toBeNull();
  });
});

describe("inline errors", () => {
  it("surfaces service errors next to the form", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    await submitWhatif(ex, { t: 1, p: ["1", "2", "3"], x: ["1", "0", "0"] });
    expect(text(ex.root, "#error-box")).toContain("dimension_mismatch");
    expect(text(ex.root, "#error-box")).toContain("has 3 items");
  });

  it("rejects malformed numbers before any request", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    setInput(ex.root, "#bid-t", "1");
    setInput(ex.root, "#bid-p", "1..2, 1");
    setInput(ex.root, "#bid-x", "1, 0");
    q<HTMLButtonElement>(ex.root, "#submit-whatif").click();
    await ex.vm.settled();
    expect(text(ex.root, "#error-box")).toContain("not a decimal or ratio");
    expect(ex.vm.pending).toBeNull();
  });

  it("surfaces a stale round id inline", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, { t: 1, p: ["1", "1"], x: ["1", "1"] });
    expect(text(ex.root, "#error-box")).toContain("stale_round");
  });
});

describe("valuation envelopes", () => {
  it("renders the fitted values verbatim", async () => {
    const ex = mountExplorer();
    await createSession(ex, "1");
    await submitWhatif(ex, ROUND_1);
    await click(ex, "#commit-bid");
    await submitWhatif(ex, ROUND_2);
    await click(ex, "#commit-bid");

    await click(ex, "#load-valuations");
    let cells = [...ex.root.querySelectorAll("#min-valuation td.valuation-value")].map(
      (c) => c.textContent,
    );
    expect(cells).toEqual(["2", "2"]);
    expect(text(ex.root, "#min-valuation .valuation-epsilon")).toBe("1");
    expect(ex.root.querySelector("#max-valuation")).toBeNull();

    setInput(
      ex.root,
      "#bounds-input",
      '{"values": [{"bundle": ["1", "0"], "value": "5"}]}',
    );
    await click(ex, "#load-valuations");
    cells = [...ex.root.querySelectorAll("#max-valuation td.valuation-value")].map(
      (c) => c.textContent,
    );
    expect(cells).toEqual(["5", "5"]);
  });
});
