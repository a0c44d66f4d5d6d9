// Session view state and the action dispatcher.
//
// The store never invents state: everything rendered comes from the latest
// snapshot (plus pattern lists fetched per open conflict). Overlapping
// responses are resolved by version - a stale snapshot never replaces a
// newer one - and every mutation carries the version of the snapshot the
// user was looking at; a 409 triggers a refetch so the next attempt is
// against fresh state.

import { ApiClient, ApiError } from "./api.js";
import type { Change, Pattern, Snapshot, TriState } from "./types.js";

export type Action =
  | { kind: "set_pref"; feature: string; value: TriState }
  | { kind: "step" }
  | { kind: "propose"; feature: string; value: "include" | "exclude"; rationale: string }
  | { kind: "accept"; proposalId: string }
  | { kind: "apply_diagnosis"; index: number }
  | { kind: "reconfigure"; changes: Change[] };

export interface ViewState {
  snapshot: Snapshot | null;
  activeMember: string | null;
  patterns: Record<string, Pattern[]>;
  nextConstraint: { constraint: number | null; tie_break_used: string | null } | null;
  error: string | null;
  notice: string | null;
  pollMs: number;
}

export class SessionStore {
  readonly state: ViewState = {
    snapshot: null,
    activeMember: null,
    patterns: {},
    nextConstraint: null,
    error: null,
    notice: null,
    pollMs: 2000,
  };
  private listeners: (() => void)[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly sessionId: string,
  ) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  get version(): number {
    return this.state.snapshot?.version ?? 0;
  }

  setActiveMember(member: string): void {
    this.state.activeMember = member;
    this.emit();
  }

  private adopt(snapshot: Snapshot): void {
    // higher version wins; equal version refreshes in place
    if (this.state.snapshot && snapshot.version < this.state.snapshot.version) return;
    this.state.snapshot = snapshot;
    if (!this.state.activeMember || !snapshot.members.includes(this.state.activeMember)) {
      this.state.activeMember = snapshot.members[0] ?? null;
    }
  }

  async refresh(): Promise<void> {
    try {
      const snapshot = await this.client.getSession(this.sessionId);
      this.adopt(snapshot);
      await this.loadConflictExtras();
      this.state.error = null;
    } catch (error) {
      this.state.error = describe(error);
    }
    this.emit();
  }

  private async loadConflictExtras(): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) return;
    const patterns: Record<string, Pattern[]> = {};
    for (const conflict of snapshot.conflicts) {
      if (conflict.status !== "open") continue;
      try {
        patterns[conflict.feature] = (
          await this.client.patterns(this.sessionId, conflict.feature)
        ).patterns;
      } catch {
        // a pattern list is decoration; the conflict card still renders
      }
    }
    this.state.patterns = patterns;
    try {
      const next = await this.client.nextConstraint(this.sessionId);
      this.state.nextConstraint = {
        constraint: next.constraint,
        tie_break_used: next.tie_break_used,
      };
    } catch {
      this.state.nextConstraint = null;
    }
  }

  /** Exactly one API call per action; snapshot refreshes on success. */
  async submit(action: Action): Promise<void> {
    const snapshot = this.state.snapshot;
    const member = this.state.activeMember;
    if (!snapshot) return;
    const version = snapshot.version;
    try {
      let updated: Snapshot;
      switch (action.kind) {
        case "set_pref":
          if (!member) return;
          updated = await this.client.setPreference(
            this.sessionId, member, action.feature, action.value, version,
          );
          break;
        case "step":
          updated = await this.client.step(this.sessionId, version);
          break;
        case "propose":
          if (!member) return;
          updated = await this.client.propose(
            this.sessionId, action.feature, member, action.value, action.rationale, version,
          );
          break;
        case "accept":
          if (!member) return;
          updated = await this.client.accept(this.sessionId, action.proposalId, member, version);
          break;
        case "apply_diagnosis":
          updated = await this.client.applyDiagnosis(this.sessionId, action.index, version);
          break;
        case "reconfigure":
          updated = await this.client.reconfigure(this.sessionId, action.changes, version);
          break;
      }
      this.adopt(updated);
      await this.loadConflictExtras();
      this.state.error = null;
      this.state.notice = null;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.state.notice = `out of date (${error.code}); refreshed - try again`;
        await this.refresh();
        return;
      }
      this.state.error = describe(error);
    }
    this.emit();
  }

  startPolling(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.refresh(), this.state.pollMs);
  }

  stopPolling(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}
