/**
 * DOM view of the bid explorer.
 *
 * Pure rendering: everything on screen is rebuilt from the view model
 * after each operation, and every number is the exact string the
 * service sent — the view never reformats, rounds, or recomputes a
 * quantity.  Element ids are stable hooks for the scripted tests.
 */

import { ArcWire, BidWire, Rule } from "./api.js";
import { ExplorerViewModel } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CANVAS_SIZE = 480;
const RING_RADIUS = 170;
const VERTEX_RADIUS = 22;

/** Accepts the wire number syntax: a non-negative decimal or ratio. */
const NUMBER_SYNTAX = /^(\d+(\.\d+)?|\d+\/\d+)$/;

export function renderApp(vm: ExplorerViewModel, root: HTMLElement): void {
  root.replaceChildren(
    renderSession(vm),
    renderGraph(vm),
    renderWhatif(vm),
    renderValuations(vm),
    renderError(vm),
  );
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function svgEl(
  tag: string,
  attrs: Record<string, string> = {},
  text?: string,
): Element {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

// ---------------------------------------------------------------- session

function renderSession(vm: ExplorerViewModel): HTMLElement {
  const session = vm.session;
  if (session) {
    const rule =
      session.rule.rule === "karp"
        ? `karp(k=${session.rule.k})`
        : session.rule.rule;
    return el(
      "section",
      { id: "session-panel" },
      el(
        "p",
        {},
        `session ${session.id} — ${session.dimension} items, ${rule} at slack `,
        el("span", { id: "session-epsilon" }, session.rule.epsilon),
      ),
    );
  }

  const dimension = el("input", { id: "session-dimension", type: "number", value: "2" });
  const ruleSelect = el("select", { id: "session-rule" });
  for (const rule of ["garp", "karp", "warp"]) {
    ruleSelect.append(el("option", { value: rule }, rule));
  }
  const k = el("input", { id: "session-k", type: "number", value: "1" });
  const epsilon = el("input", { id: "session-epsilon-input", value: "1" });
  const create = el("button", { id: "create-session" }, "create session");
  create.addEventListener("click", () => {
    const n = Number(dimension.value);
    const eps = epsilon.value.trim();
    if (!Number.isInteger(n) || n < 1 || !NUMBER_SYNTAX.test(eps)) {
      vm.error = "dimension must be a positive integer and slack a decimal or ratio";
      vm.onChange();
      return;
    }
    const rule = ruleSelect.value as Rule;
    void vm.start(n, {
      rule,
      epsilon: eps,
      ...(rule === "karp" ? { k: Number(k.value) } : {}),
    });
  });
  return el(
    "section",
    { id: "session-panel" },
    el("label", {}, "items ", dimension),
    el("label", {}, " rule ", ruleSelect),
    el("label", {}, " k ", k),
    el("label", {}, " slack ", epsilon),
    create,
  );
}

// ------------------------------------------------------------------ graph

function vertexPosition(index: number, count: number): { x: number; y: number } {
  const angle = (2 * Math.PI * index) / count - Math.PI / 2;
  return {
    x: CANVAS_SIZE / 2 + RING_RADIUS * Math.cos(angle),
    y: CANVAS_SIZE / 2 + RING_RADIUS * Math.sin(angle),
  };
}

/** Curved arc path between two ring positions, bowed to its right, so
 * the two directions of a digon stay visually apart. */
function arcPath(
  a: { x: number; y: number },
  b: { x: number; y: number },
): { d: string; label: { x: number; y: number } } {
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const span = Math.hypot(dx, dy) || 1;
  const nx = -dy / span;
  const ny = dx / span;
  const trim = VERTEX_RADIUS / span;
  const start = { x: a.x + dx * trim, y: a.y + dy * trim };
  const end = { x: b.x - dx * trim, y: b.y - dy * trim };
  const mid = {
    x: (a.x + b.x) / 2 + nx * 18,
    y: (a.y + b.y) / 2 + ny * 18,
  };
  return {
    d: `M ${start.x} ${start.y} Q ${mid.x} ${mid.y} ${end.x} ${end.y}`,
    label: { x: (a.x + b.x) / 2 + nx * 30, y: (a.y + b.y) / 2 + ny * 30 },
  };
}

function renderGraph(vm: ExplorerViewModel): HTMLElement {
  const svg = svgEl("svg", {
    id: "graph-canvas",
    width: String(CANVAS_SIZE),
    height: String(CANVAS_SIZE),
    viewBox: `0 0 ${CANVAS_SIZE} ${CANVAS_SIZE}`,
  });
  const panel = el("section", { id: "graph-panel" });
  panel.append(svg);

  const vertices = vm.snapshot?.vertices ?? [];
  const highlightedArcs = vm.highlightArcs();
  const highlightedVertices = vm.highlightVertices();

  // A violation cycle may pass through the prospective bid's bundle,
  // which is not a committed vertex yet; it is drawn as a ghost.
  const ghostIds = [...highlightedVertices].filter((u) => u >= vertices.length);
  const count = vertices.length + ghostIds.length;
  if (count === 0) {
    return panel; // empty session: empty canvas
  }

  const positions = new Map<number, { x: number; y: number }>();
  vertices.forEach((v, i) => positions.set(v.id, vertexPosition(i, count)));
  ghostIds.forEach((id, i) =>
    positions.set(id, vertexPosition(vertices.length + i, count)),
  );

  const defs = svgEl("defs");
  for (const name of ["arrow", "arrow-violating"]) {
    const marker = svgEl("marker", {
      id: name,
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    });
    marker.append(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z" }));
    defs.append(marker);
  }
  svg.append(defs);

  const drawArc = (from: number, to: number, arc: ArcWire | null) => {
    const a = positions.get(from);
    const b = positions.get(to);
    if (!a || !b) {
      return;
    }
    const violating = highlightedArcs.has(`${from}->${to}`);
    const { d, label } = arcPath(a, b);
    const classes = ["arc"];
    if (violating) {
      classes.push("violating");
    }
    if (!arc) {
      classes.push("pending-arc");
    }
    const path = svgEl("path", {
      d,
      class: classes.join(" "),
      fill: "none",
      "marker-end": violating ? "url(#arrow-violating)" : "url(#arrow)",
      "data-from": String(from),
      "data-to": String(to),
    });
    if (arc) {
      path.setAttribute("data-length", arc.length);
      path.setAttribute("data-witness", String(arc.witness));
    }
    svg.append(path);
    if (arc) {
      svg.append(
        svgEl(
          "text",
          { x: String(label.x), y: String(label.y), class: "arc-label" },
          arc.length,
        ),
      );
    }
  };

  const known = new Set<string>();
  for (const arc of vm.snapshot?.arcs ?? []) {
    known.add(`${arc.from}->${arc.to}`);
    drawArc(arc.from, arc.to, arc);
  }
  for (const key of highlightedArcs) {
    if (!known.has(key)) {
      const [from, to] = key.split("->").map(Number) as [number, number];
      drawArc(from, to, null);
    }
  }

  const drawVertex = (
    id: number,
    bundle: string[],
    rounds: number[],
    ghost: boolean,
  ) => {
    const pos = positions.get(id);
    if (!pos) {
      return;
    }
    const classes = ["vertex"];
    if (highlightedVertices.has(id)) {
      classes.push("violating");
    }
    if (ghost) {
      classes.push("pending-vertex");
    }
    const group = svgEl("g", {
      class: classes.join(" "),
      "data-vertex": String(id),
      "data-bundle": bundle.join(","),
    });
    group.append(
      svgEl("circle", {
        cx: String(pos.x),
        cy: String(pos.y),
        r: String(VERTEX_RADIUS),
      }),
      svgEl(
        "text",
        { x: String(pos.x), y: String(pos.y - 2), class: "vertex-id" },
        ghost ? "bid" : `#${id}`,
      ),
      svgEl(
        "text",
        { x: String(pos.x), y: String(pos.y + 12), class: "vertex-bundle" },
        `(${bundle.join(", ")})`,
      ),
    );
    if (rounds.length > 0) {
      group.append(
        svgEl(
          "title",
          {},
          `bundle (${bundle.join(", ")}) bid in round(s) ${rounds.join(", ")}`,
        ),
      );
    }
    svg.append(group);
  };

  for (const v of vertices) {
    drawVertex(v.id, v.bundle, v.rounds, false);
  }
  for (const id of ghostIds) {
    drawVertex(id, vm.pending?.bid.x ?? [], [], true);
  }
  return panel;
}

// ----------------------------------------------------------------- whatif

function parseBid(
  tText: string,
  pText: string,
  xText: string,
): BidWire | string {
  const t = Number(tText);
  if (!Number.isInteger(t) || t < 1) {
    return `round id must be a positive integer, got "${tText}"`;
  }
  const parseVector = (text: string, name: string): string[] | string => {
    const parts = text
      .split(",")
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
    if (parts.length === 0) {
      return `${name} must list at least one number`;
    }
    const bad = parts.find((s) => !NUMBER_SYNTAX.test(s));
    return bad === undefined ? parts : `${name}: "${bad}" is not a decimal or ratio`;
  };
  const p = parseVector(pText, "prices");
  if (typeof p === "string") {
    return p;
  }
  const x = parseVector(xText, "quantities");
  if (typeof x === "string") {
    return x;
  }
  return { t, p, x };
}

function verdictWord(accepted: boolean): string {
  return accepted ? "accepted" : "rejected";
}

function renderWhatif(vm: ExplorerViewModel): HTMLElement {
  const panel = el("section", { id: "whatif-panel" });
  if (!vm.session) {
    return panel;
  }
  const observations = vm.snapshot?.observations ?? [];
  const lastRound = observations.length
    ? Math.max(...observations.map((o) => o.t))
    : 0;

  const tInput = el("input", {
    id: "bid-t",
    type: "number",
    value: String(vm.pending?.bid.t ?? lastRound + 1),
  });
  const pInput = el("input", {
    id: "bid-p",
    value: vm.pending?.bid.p.join(", ") ?? "",
    placeholder: "prices, e.g. 2, 1",
  });
  const xInput = el("input", {
    id: "bid-x",
    value: vm.pending?.bid.x.join(", ") ?? "",
    placeholder: "quantities, e.g. 1, 0",
  });
  const submit = el("button", { id: "submit-whatif" }, "what if?");
  submit.addEventListener("click", () => {
    const bid = parseBid(tInput.value, pInput.value, xInput.value);
    if (typeof bid === "string") {
      vm.error = bid;
      vm.onChange();
      return;
    }
    void vm.submitWhatif(bid);
  });
  panel.append(
    el(
      "div",
      { id: "whatif-form" },
      el("label", {}, "round ", tInput),
      el("label", {}, " prices ", pInput),
      el("label", {}, " quantities ", xInput),
      submit,
    ),
  );

  panel.append(renderVerdict(vm));
  panel.append(renderSlider(vm));
  return panel;
}

function renderVerdict(vm: ExplorerViewModel): HTMLElement {
  const panel = el("div", { id: "verdict-panel" });
  const pending = vm.pending;
  if (!pending) {
    panel.append(el("p", {}, "enter a prospective bid to see its verdict"));
    return panel;
  }
  const verdict = pending.verdict;

  const status = el(
    "p",
    {},
    "this bid would be ",
    el(
      "strong",
      { id: "verdict-status", class: verdictWord(verdict.accepted) },
      verdictWord(verdict.accepted),
    ),
  );
  const facts = el(
    "dl",
    { id: "verdict-facts" },
    el("dt", {}, "smallest accepting slack"),
    el("dd", { id: "implied-epsilon" }, verdict.implied_epsilon),
    el("dt", {}, "worst cycle mean after this bid"),
    el("dd", { id: "whatif-mu" }, verdict.mu ?? "none (no cycle)"),
    el("dt", {}, "change against committed history"),
    el("dd", { id: "whatif-delta-mu" }, verdict.delta_mu ?? "first cycle"),
  );
  panel.append(status, facts);

  if (verdict.violation) {
    panel.append(
      el(
        "p",
        { id: "violation-panel" },
        "violating cycle ",
        el("span", { id: "violation-cycle" }, verdict.violation.vertices.join(" -> ")),
        " with mean ",
        el("span", { id: "violation-mean" }, verdict.violation.mean),
        " (total ",
        el("span", { id: "violation-total" }, verdict.violation.total),
        "), witnessed by rounds ",
        el(
          "span",
          { id: "violation-rounds" },
          (verdict.violation.witness_rounds ?? []).join(", "),
        ),
      ),
    );
  }

  if (verdict.advice && verdict.advice.sets.length > 0) {
    const suggestions = el("div", { id: "withdrawal-suggestions" }, "to fix it, withdraw: ");
    for (const set of verdict.advice.sets) {
      const labels = set.map((u) => {
        const vertex = vm.snapshot?.vertices[u];
        return vertex
          ? `bundle #${u} (round${vertex.rounds.length > 1 ? "s" : ""} ${vertex.rounds.join(", ")})`
          : "this bid";
      });
      const button = el(
        "button",
        { class: "withdraw-suggestion", "data-vertices": set.join(",") },
        labels.join(" + "),
      );
      button.addEventListener("click", () => void vm.withdrawVertices(set));
      suggestions.append(button);
    }
    if (!verdict.advice.complete) {
      suggestions.append(el("em", {}, " (partial list)"));
    }
    panel.append(suggestions);
  }

  const commit = el("button", { id: "commit-bid" }, "commit this bid");
  if (!verdict.accepted) {
    commit.setAttribute("disabled", "");
  }
  commit.addEventListener("click", () => void vm.commitPending());
  const retract = el("button", { id: "retract-bid" }, "retract");
  retract.addEventListener("click", () => void vm.retractPending());
  panel.append(el("div", {}, commit, " ", retract));
  return panel;
}

function renderSlider(vm: ExplorerViewModel): HTMLElement {
  const panel = el("div", { id: "slider-panel" });
  const slider = el("input", {
    id: "epsilon-slider",
    type: "range",
    min: "0",
    max: "2",
    step: "0.25",
  });
  slider.value = vm.slider?.epsilon ?? "0";
  if (!vm.pending) {
    slider.setAttribute("disabled", "");
  }
  slider.addEventListener("input", () => void vm.setSliderEpsilon(slider.value));
  panel.append(el("label", {}, "re-check at slack ", slider));

  if (vm.slider) {
    const note = vm.slider.historyHolds
      ? ""
      : " — the committed history itself fails at this slack";
    panel.append(
      el(
        "p",
        { id: "slider-verdict" },
        "at slack ",
        el("span", { id: "slider-epsilon" }, vm.slider.epsilon),
        ": ",
        el(
          "strong",
          { id: "slider-status", class: verdictWord(vm.slider.verdict.accepted) },
          verdictWord(vm.slider.verdict.accepted),
        ),
        " (smallest accepting slack ",
        el("span", { id: "slider-implied" }, vm.slider.verdict.implied_epsilon),
        ")",
        note,
      ),
    );
  }
  return panel;
}

// -------------------------------------------------------------- valuations

function renderValuations(vm: ExplorerViewModel): HTMLElement {
  const panel = el("section", { id: "valuation-panel" });
  if (!vm.session) {
    return panel;
  }
  const bounds = el("input", {
    id: "bounds-input",
    placeholder: 'optional bounds, e.g. {"values": [{"bundle": ["1", "0"], "value": "5"}]}',
  });
  const load = el("button", { id: "load-valuations" }, "fit valuations");
  load.addEventListener("click", () => {
    const text = bounds.value.trim();
    void vm.loadValuations(text === "" ? undefined : text);
  });
  panel.append(el("div", {}, bounds, load));

  const valuations = vm.valuations;
  if (!valuations) {
    return panel;
  }
  const table = (
    id: string,
    title: string,
    v: { epsilon: string; individually_rational: boolean; values: { bundle: string[]; value: string }[] },
  ) => {
    const t = el(
      "table",
      { id },
      el(
        "caption",
        {},
        `${title} — slack `,
        el("span", { class: "valuation-epsilon" }, v.epsilon),
        v.individually_rational ? ", individually rational" : ", not individually rational",
      ),
    );
    for (const row of v.values) {
      t.append(
        el(
          "tr",
          {},
          el("td", { class: "valuation-bundle" }, `(${row.bundle.join(", ")})`),
          el("td", { class: "valuation-value" }, row.value),
        ),
      );
    }
    return t;
  };
  panel.append(table("min-valuation", "least individually rational valuation", valuations.min));
  if (valuations.max) {
    panel.append(table("max-valuation", "greatest valuation under bounds", valuations.max));
  }
  return panel;
}

// ------------------------------------------------------------------ error

function renderError(vm: ExplorerViewModel): HTMLElement {
  return el("div", { id: "error-box", role: "alert" }, vm.error ?? "");
}
