// Session controller: owns the current view, serializes API calls (one in
// flight per session; clicks queue behind each other), and maps errors to
// banner (fatal, no session) or toast (non-fatal, view unchanged).
//
// Invariant: every semantic field of the view is copied verbatim from the
// last server payload. The controller adds presentation state only.

import {
  ApiClient,
  ApiError,
  ChoiceInfo,
  HistoryEntry,
  LtsJson,
  SessionState,
  SessionStatus,
} from "./api.js";

export interface SessionView {
  sessionId: string | null;
  termText: string;
  status: SessionStatus | null;
  choices: ChoiceInfo[];
  history: HistoryEntry[];
  historyTrace: string[];
  stable: boolean;
  initials: string[];
  refusalComplement: string[];
  banner: string | null;
  toast: string | null;
  lts: LtsJson | null;
  ltsNote: string | null;
}

export const LTS_STATE_CUTOFF = 200;

export function emptyView(): SessionView {
  return {
    sessionId: null,
    termText: "",
    status: null,
    choices: [],
    history: [],
    historyTrace: [],
    stable: false,
    initials: [],
    refusalComplement: [],
    banner: null,
    toast: null,
    lts: null,
    ltsNote: null,
  };
}

export interface RefusalPanel {
  stable: boolean;
  initials: string[];
  note: string;
}

export class SessionController {
  private view: SessionView = emptyView();
  private queue: Promise<unknown> = Promise.resolve();

  constructor(private api: ApiClient) {}

  getView(): SessionView {
    return this.view;
  }

  // Serialize operations: a new call starts only after the previous one
  // settled, whether it succeeded or failed.
  private enqueue<T>(op: () => Promise<T>): Promise<T> {
    const next = this.queue.then(op, op);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private applyState(state: SessionState): void {
    this.view = {
      ...this.view,
      termText: state.term,
      status: state.status,
      choices: state.choices,
      history: state.history,
      historyTrace: state.historyTrace,
      stable: state.stable,
      initials: state.initials,
      refusalComplement: state.refusalComplement,
      toast: null,
      // a step invalidates any previously fetched graph
      lts: null,
      ltsNote: null,
    };
  }

  loadSpec(source: string, name: string): Promise<SessionView> {
    return this.enqueue(async () => {
      try {
        const created = await this.api.createSession(source, name);
        this.view = { ...emptyView(), sessionId: created.id };
        this.applyState(created.state);
      } catch (err) {
        if (err instanceof ApiError) {
          this.view = { ...emptyView(), banner: err.message };
        } else {
          this.view = { ...emptyView(), banner: `network error: ${err}` };
        }
      }
      return this.view;
    });
  }

  stepChoice(kind: string, index: number): Promise<SessionView> {
    return this.enqueue(async () => {
      if (!this.view.sessionId) {
        return this.view;
      }
      try {
        this.applyState(await this.api.step(this.view.sessionId, kind, index));
      } catch (err) {
        // non-fatal: keep the view, surface a toast
        const message = err instanceof ApiError ? err.message : `${err}`;
        this.view = { ...this.view, toast: message };
      }
      return this.view;
    });
  }

  undo(): Promise<SessionView> {
    return this.enqueue(async () => {
      if (!this.view.sessionId) {
        return this.view;
      }
      try {
        this.applyState(await this.api.undo(this.view.sessionId));
      } catch (err) {
        const message = err instanceof ApiError ? err.message : `${err}`;
        this.view = { ...this.view, toast: message };
      }
      return this.view;
    });
  }

  loadLts(): Promise<SessionView> {
    return this.enqueue(async () => {
      if (!this.view.sessionId) {
        return this.view;
      }
      try {
        const lts = await this.api.lts(this.view.sessionId);
        if (!lts.complete) {
          this.view = {
            ...this.view, lts: null,
            ltsNote: "graph incomplete (budget hit); not rendered",
          };
        } else if (lts.states.length > LTS_STATE_CUTOFF) {
          this.view = {
            ...this.view, lts: null,
            ltsNote: `graph has ${lts.states.length} states (cutoff ${LTS_STATE_CUTOFF}); not rendered`,
          };
        } else {
          this.view = { ...this.view, lts, ltsNote: null };
        }
      } catch (err) {
        const message = err instanceof ApiError ? err.message : `${err}`;
        this.view = { ...this.view, toast: message };
      }
      return this.view;
    });
  }

  // The refusal panel only restates server-provided facts.
  refusalPanel(): RefusalPanel {
    if (this.view.status?.kind === "terminated") {
      return {
        stable: true,
        initials: this.view.initials,
        note: "terminated: refuses every set of events",
      };
    }
    if (this.view.stable) {
      return {
        stable: true,
        initials: this.view.initials,
        note: "stable: refuses any set disjoint from the initials",
      };
    }
    return { stable: false, initials: [], note: "unstable (silent steps pending)" };
  }
}
