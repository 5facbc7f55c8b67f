/**
 * Typed client for the bid-analysis service.
 *
 * Every quantity travels as an exact decimal-or-ratio string ("1.5",
 * "7/6").  The client never converts them to floats: they are opaque
 * tokens, displayed and compared verbatim, so a verdict rendered here
 * is byte-identical to the one the service produced.
 */

export type Rule = "warp" | "karp" | "garp";

export interface RuleConfigWire {
  rule: Rule;
  /** Exact slack string, e.g. "0", "1.5", "7/6". */
  epsilon: string;
  /** Chain bound, present exactly when rule is "karp". */
  k?: number;
}

/** One auction round: round id, item prices, quantities bid for. */
export interface BidWire {
  t: number;
  p: string[];
  x: string[];
}

/** A cycle of bundle vertices witnessing a violation. */
export interface CycleWire {
  vertices: number[];
  total: string;
  mean: string;
  witness_rounds?: number[];
}

/** Minimum bundle-withdrawal sets that would restore the rule. */
export interface AdviceWire {
  sets: number[][];
  complete: boolean;
}

export interface VerdictWire {
  accepted: boolean;
  implied_epsilon: string;
  violation: CycleWire | null;
  advice?: AdviceWire;
}

/** Verdict for a prospective bid, plus its effect on the worst mean. */
export interface WhatifWire extends VerdictWire {
  /** Worst cycle mean after the bid; null if still acyclic. */
  mu: string | null;
  /** Change against the committed graph; null when a first cycle appears. */
  delta_mu: string | null;
}

export interface VertexWire {
  id: number;
  bundle: string[];
  rounds: number[];
}

export interface ArcWire {
  from: number;
  to: number;
  length: string;
  witness: number;
}

export interface AnalysisWire {
  id: string;
  dimension: number;
  rule: RuleConfigWire;
  observations: BidWire[];
  vertices: VertexWire[];
  arcs: ArcWire[];
  mu: string | null;
  certificate: CycleWire | null;
  verdict: VerdictWire;
}

export interface ValuationWire {
  epsilon: string;
  individually_rational: boolean;
  values: { bundle: string[]; value: string }[];
  unbounded?: string[][];
}

export interface ValuationsWire {
  min: ValuationWire;
  max: ValuationWire | null;
}

export interface SessionInfo {
  id: string;
  dimension: number;
  rule: RuleConfigWire;
}

/**
 * Minimal transport the client depends on; the browser build wraps
 * fetch, tests substitute a node:http adapter.
 */
export interface HttpReply {
  status: number;
  body: string;
}

export type HttpSend = (
  method: string,
  url: string,
  body?: string,
) => Promise<HttpReply>;

export const fetchSend: HttpSend = async (method, url, body) => {
  const response = await fetch(url, {
    method,
    headers: body === undefined ? undefined : { "content-type": "application/json" },
    body,
  });
  return { status: response.status, body: await response.text() };
};

/** An {"error": code, "detail": text} response, preserved verbatim. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ServiceError";
  }
}

export class SessionClient {
  constructor(
    readonly baseUrl: string,
    private readonly send: HttpSend = fetchSend,
  ) {}

  createSession(dimension: number, rule?: RuleConfigWire): Promise<SessionInfo> {
    return this.request("POST", "/sessions", { dimension, rule });
  }

  /** Commit a bid; the service appends it only when the verdict accepts. */
  commitBid(id: string, bid: BidWire): Promise<VerdictWire> {
    return this.request("POST", `/sessions/${id}/bids`, bid);
  }

  /** Full verdict for a prospective bid; never mutates the session. */
  whatif(id: string, bid: BidWire): Promise<WhatifWire> {
    return this.request("POST", `/sessions/${id}/whatif`, bid);
  }

  analysis(id: string): Promise<AnalysisWire> {
    return this.request("GET", `/sessions/${id}/analysis`);
  }

  /** boundsJson, when given, is the raw JSON text of an upper-bounds document. */
  valuations(id: string, boundsJson?: string): Promise<ValuationsWire> {
    const query =
      boundsJson === undefined ? "" : `?bounds=${encodeURIComponent(boundsJson)}`;
    return this.request("GET", `/sessions/${id}/valuations${query}`);
  }

  /** Remove rounds entirely; resolves to the fresh analysis. */
  withdraw(id: string, rounds: number[]): Promise<AnalysisWire> {
    return this.request("POST", `/sessions/${id}/withdrawals`, { rounds });
  }

  private async request<T>(
    method: string,
    path: string,
    payload?: unknown,
  ): Promise<T> {
    const body = payload === undefined ? undefined : JSON.stringify(payload);
    const reply = await this.send(method, this.baseUrl + path, body);
    let parsed: unknown;
    try {
      parsed = JSON.parse(reply.body);
    } catch {
      throw new ServiceError(reply.status, "bad_response", reply.body.slice(0, 200));
    }
    if (reply.status >= 400) {
      const err = parsed as { error?: string; detail?: string };
      throw new ServiceError(
        reply.status,
        err.error ?? "unknown_error",
        err.detail ?? reply.body,
      );
    }
    return parsed as T;
  }
}
