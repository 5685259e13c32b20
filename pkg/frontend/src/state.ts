import { ApiClient, ApiError, TransportFailure } from "./api.js";
import type { CandidateView, Correspondence, Decision } from "./types.js";

/** A decision the user made that the server has not acknowledged yet. */
export interface PendingDecision {
  candidateId: string;
  decision: Decision;
  queued: boolean; // true after a transport failure, waiting for retry
}

export interface TargetGroup {
  targetTable: string;
  candidates: CandidateView[];
}

/**
 * View model derivation is pure: the rendered state is always a function of
 * the last server response plus the pending optimistic decisions, so a hard
 * refresh (fresh server response, empty pending set) converges to server
 * truth by construction.
 */
export function applyOptimistic(
  server: CandidateView[],
  pending: Map<string, PendingDecision>,
): CandidateView[] {
  return server.map((candidate) => {
    const local = pending.get(candidate.id);
    if (local && candidate.status === "proposed") {
      return {
        ...candidate,
        status: local.decision === "confirm" ? "confirmed" : "rejected",
      };
    }
    return candidate;
  });
}

/** Candidates grouped by target table, each group sorted by descending score. */
export function groupByTarget(candidates: CandidateView[]): TargetGroup[] {
  const groups = new Map<string, CandidateView[]>();
  for (const candidate of candidates) {
    const group = groups.get(candidate.target_table) ?? [];
    group.push(candidate);
    groups.set(candidate.target_table, group);
  }
  return [...groups.entries()].map(([targetTable, group]) => ({
    targetTable,
    candidates: [...group].sort(
      (a, b) => b.score - a.score || a.source_table.localeCompare(b.source_table),
    ),
  }));
}

export interface StoreListener {
  (): void;
}

export class ReviewStore {
  phase = "";
  serverCandidates: CandidateView[] = [];
  correspondences: Correspondence[] = [];
  rejectedPairs: [string, string][] = [];
  pending = new Map<string, PendingDecision>();
  notices: string[] = [];
  cursor = 0;
  loaded = false;

  private listeners: StoreListener[] = [];

  constructor(
    private readonly api: ApiClient,
    readonly runId: string,
  ) {}

  subscribe(listener: StoreListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  notice(message: string): void {
    this.notices.push(message);
    this.emit();
  }

  view(): CandidateView[] {
    return applyOptimistic(this.serverCandidates, this.pending);
  }

  groups(): TargetGroup[] {
    return groupByTarget(this.view());
  }

  selected(): CandidateView | undefined {
    const flat = this.groups().flatMap((g) => g.candidates);
    return flat[this.cursor];
  }

  moveCursor(delta: number): void {
    const count = this.serverCandidates.length;
    if (count === 0) return;
    this.cursor = Math.min(Math.max(this.cursor + delta, 0), count - 1);
    this.emit();
  }

  /** Pull server truth; pending decisions the server already knows are dropped. */
  async refresh(): Promise<void> {
    const summary = await this.api.getRun(this.runId);
    this.phase = summary.phase;
    if (summary.phase !== "created") {
      const listing = await this.api.listCandidates(this.runId);
      this.serverCandidates = listing.candidates;
      for (const [id, decision] of [...this.pending]) {
        const server = this.serverCandidates.find((c) => c.id === id);
        if (!server || (server.status !== "proposed" && !decision.queued)) {
          this.pending.delete(id);
        }
      }
    }
    if (summary.phase === "attribute_matching_done" || summary.phase === "reported") {
      const listing = await this.api.listCorrespondences(this.runId);
      this.correspondences = listing.correspondences;
      this.rejectedPairs = listing.rejected_table_pairs;
    }
    this.loaded = true;
    this.emit();
  }

  /**
   * Decide a candidate. Never sends anything for a candidate that is not
   * proposed in the current view; optimistic update first, then reconcile
   * with the server response. Conflicts revert to server truth; transport
   * failures stay queued for retry.
   */
  async decide(candidateId: string, decision: Decision): Promise<void> {
    const candidate = this.view().find((c) => c.id === candidateId);
    if (!candidate || candidate.status !== "proposed") {
      return;
    }
    this.pending.set(candidateId, { candidateId, decision, queued: false });
    this.emit();
    await this.push(candidateId);
  }

  private async push(candidateId: string): Promise<void> {
    const entry = this.pending.get(candidateId);
    if (!entry) return;
    try {
      const updated = await this.api.submitDecision(this.runId, candidateId, entry.decision);
      this.serverCandidates = this.serverCandidates.map((c) =>
        c.id === candidateId ? updated : c,
      );
      this.pending.delete(candidateId);
    } catch (error) {
      if (error instanceof ApiError && error.code === "conflict") {
        this.pending.delete(candidateId);
        this.notices.push(`candidate ${candidateId}: already decided elsewhere, reverted`);
        await this.refresh();
      } else if (error instanceof TransportFailure) {
        this.pending.set(candidateId, { ...entry, queued: true });
        this.notices.push(`candidate ${candidateId}: service unreachable, decision queued`);
      } else {
        this.pending.delete(candidateId);
        this.notices.push(`candidate ${candidateId}: ${String(error)}`);
      }
    }
    this.emit();
  }

  /** Re-send decisions that failed with a transport error. */
  async retryQueued(): Promise<void> {
    const queued = [...this.pending.values()].filter((p) => p.queued);
    for (const entry of queued) {
      this.pending.set(entry.candidateId, { ...entry, queued: false });
      await this.push(entry.candidateId);
    }
  }

  /** Advance the run one step and load the resulting correspondences. */
  async advanceAndShow(): Promise<void> {
    const result = await this.api.advance(this.runId);
    this.phase = result.phase;
    if (this.phase === "attribute_matching_done" || this.phase === "reported") {
      const listing = await this.api.listCorrespondences(this.runId);
      this.correspondences = listing.correspondences;
      this.rejectedPairs = listing.rejected_table_pairs;
    }
    this.emit();
  }
}
