/**
 * State machine behind the bid explorer.
 *
 * Holds the committed-session snapshot, the pending what-if bid with
 * its verdict, the slack-slider re-verdict, and the valuation
 * envelopes.  Every verdict shown to the user comes from a service
 * round trip — the model does no rule arithmetic of its own and keeps
 * all numbers as the exact strings the service sent.
 *
 * Operations are serialized through an internal promise chain
 * (single-writer, mirroring the service's per-session model); views
 * re-render from the ``onChange`` callback and tests await
 * ``settled()``.
 */

import {
  AnalysisWire,
  BidWire,
  RuleConfigWire,
  ServiceError,
  SessionClient,
  SessionInfo,
  ValuationsWire,
  VerdictWire,
  WhatifWire,
} from "./api.js";

export interface PendingWhatif {
  bid: BidWire;
  verdict: WhatifWire;
}

export interface SliderState {
  /** The slack the slider asked for, exactly as submitted. */
  epsilon: string;
  /** Service verdict at that slack. */
  verdict: VerdictWire;
  /**
   * False when the committed history itself fails at this slack — the
   * replay could not even reach the pending bid, and ``verdict`` is the
   * first rejected commit instead of the what-if re-verdict.
   */
  historyHolds: boolean;
}

export class ExplorerViewModel {
  snapshot: AnalysisWire | null = null;
  pending: PendingWhatif | null = null;
  slider: SliderState | null = null;
  valuations: ValuationsWire | null = null;
  /** Inline service-error text; null after a successful operation. */
  error: string | null = null;

  private info: SessionInfo | null = null;
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private readonly client: SessionClient,
    /** Invoked after every completed operation, success or failure. */
    public onChange: () => void = () => {},
  ) {}

  get session(): SessionInfo | null {
    return this.info;
  }

  /** Resolves once every operation enqueued so far has finished. */
  settled(): Promise<void> {
    return this.chain;
  }

  start(dimension: number, rule: RuleConfigWire): Promise<void> {
    return this.enqueue(async () => {
      this.info = await this.client.createSession(dimension, rule);
      this.snapshot = await this.client.analysis(this.info.id);
      this.pending = null;
      this.slider = null;
      this.valuations = null;
    });
  }

  refresh(): Promise<void> {
    return this.enqueue(async () => {
      this.snapshot = await this.client.analysis(this.requireSession().id);
    });
  }

  /** Ask the service about a prospective bid; never mutates the session. */
  submitWhatif(bid: BidWire): Promise<void> {
    return this.enqueue(async () => {
      const verdict = await this.client.whatif(this.requireSession().id, bid);
      this.pending = { bid, verdict };
      this.slider = null;
    });
  }

  /** Commit the pending bid; on accept the snapshot and pending state move on. */
  commitPending(): Promise<void> {
    return this.enqueue(async () => {
      const pending = this.pending;
      if (!pending) {
        return;
      }
      const verdict = await this.client.commitBid(
        this.requireSession().id,
        pending.bid,
      );
      if (verdict.accepted) {
        this.pending = null;
        this.slider = null;
        this.valuations = null;
        this.snapshot = await this.client.analysis(this.requireSession().id);
      } else {
        // whatif-then-commit verdicts are identical, so this only
        // happens when the user commits a rejected bid anyway; keep it
        // pending with the (unchanged) verdict on display.
        this.pending = { bid: pending.bid, verdict: { ...pending.verdict, ...verdict } };
      }
    });
  }

  /** Drop the pending what-if bid; nothing was committed, so no round trip. */
  retractPending(): Promise<void> {
    return this.enqueue(async () => {
      this.pending = null;
      this.slider = null;
    });
  }

  /**
   * Act on a withdrawal suggestion: remove every round bidding the
   * given bundles.  A suggested bundle that exists only in the pending
   * bid has no committed rounds, so a suggestion made purely of it
   * reduces to retracting the bid.  The pending what-if, if any, is
   * re-submitted against the slimmed history.
   */
  withdrawVertices(vertexIds: number[]): Promise<void> {
    return this.enqueue(async () => {
      const session = this.requireSession();
      const snapshot = this.snapshot;
      const rounds = snapshot
        ? vertexIds.flatMap((u) => snapshot.vertices[u]?.rounds ?? [])
        : [];
      if (rounds.length > 0) {
        this.snapshot = await this.client.withdraw(session.id, rounds);
        if (this.pending) {
          const verdict = await this.client.whatif(session.id, this.pending.bid);
          this.pending = { bid: this.pending.bid, verdict };
        }
      } else {
        this.pending = null;
      }
      this.slider = null;
      this.valuations = null;
    });
  }

  /**
   * Re-verdict the pending what-if at a different slack, entirely
   * server-side.  A session's slack is fixed at creation and the
   * service exposes no other slack parameter, so the slider builds a
   * throwaway probe session at the requested slack, replays the
   * committed rounds, and re-asks the what-if there.
   */
  setSliderEpsilon(epsilon: string): Promise<void> {
    return this.enqueue(async () => {
      const pending = this.pending;
      if (!pending) {
        return;
      }
      const session = this.requireSession();
      const probe = await this.client.createSession(session.dimension, {
        ...session.rule,
        epsilon,
      });
      for (const observation of this.snapshot?.observations ?? []) {
        const commit = await this.client.commitBid(probe.id, observation);
        if (!commit.accepted) {
          this.slider = { epsilon, verdict: commit, historyHolds: false };
          return;
        }
      }
      const verdict = await this.client.whatif(probe.id, pending.bid);
      this.slider = { epsilon, verdict, historyHolds: true };
    });
  }

  loadValuations(boundsJson?: string): Promise<void> {
    return this.enqueue(async () => {
      this.valuations = await this.client.valuations(
        this.requireSession().id,
        boundsJson,
      );
    });
  }

  /**
   * The verdict the explorer is currently talking about: the slider
   * re-verdict when the slider was moved, else the pending what-if,
   * else the committed history's own verdict.
   */
  currentVerdict(): VerdictWire | null {
    if (this.slider) {
      return this.slider.verdict;
    }
    if (this.pending) {
      return this.pending.verdict;
    }
    return this.snapshot?.verdict ?? null;
  }

  /** Arcs of the current violation, as "u->w" keys; empty when accepted. */
  highlightArcs(): Set<string> {
    const cycle = this.currentVerdict()?.violation;
    const keys = new Set<string>();
    if (cycle) {
      const n = cycle.vertices.length;
      for (let i = 0; i < n; i++) {
        keys.add(`${cycle.vertices[i]}->${cycle.vertices[(i + 1) % n]}`);
      }
    }
    return keys;
  }

  /** Vertices of the current violation; empty when accepted. */
  highlightVertices(): Set<number> {
    return new Set(this.currentVerdict()?.violation?.vertices ?? []);
  }

  private requireSession(): SessionInfo {
    if (!this.info) {
      throw new ServiceError(0, "no_session", "create a session first");
    }
    return this.info;
  }

  private enqueue(op: () => Promise<void>): Promise<void> {
    const run = async () => {
      try {
        this.error = null;
        await op();
      } catch (exc) {
        this.error =
          exc instanceof ServiceError ? `${exc.code}: ${exc.detail}` : String(exc);
      } finally {
        this.onChange();
      }
    };
    this.chain = this.chain.then(run);
    return this.chain;
  }
}
