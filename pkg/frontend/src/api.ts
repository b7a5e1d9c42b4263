// Typed client for the csp session API. Every shape here mirrors the server
// payloads one to one; the client never invents or derives semantic data.

export interface ChoiceInfo {
  kind: "ext" | "int" | "tick";
  index: number;
  label?: string;
  value?: string;
}

export interface SessionStatus {
  kind: "running" | "terminated";
  value?: string;
}

export interface HistoryEntry {
  kind: "ext" | "int" | "tick";
  label?: string;
  value?: string;
}

export interface SessionState {
  term: string;
  status: SessionStatus;
  choices: ChoiceInfo[];
  history: HistoryEntry[];
  historyTrace: string[];
  initials: string[];
  stable: boolean;
  refusalComplement: string[];
}

export interface Diagnostic {
  kind: string;
  message: string;
  line: number;
  col: number;
  definition?: string;
}

export interface LtsStateJson {
  id: number;
  term: string;
  kind: "ordinary" | "terminated";
  value?: string;
}

export interface LtsEdgeJson {
  from: number;
  action: { type: "visible" | "tau" | "tick"; label?: string; value?: string };
  to: number;
}

export interface LtsJson {
  name: string;
  initial: number;
  complete: boolean;
  states: LtsStateJson[];
  edges: LtsEdgeJson[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public diagnostics: Diagnostic[] | null,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let diagnostics: Diagnostic[] | null = null;
      let message = `${method} ${path} failed with ${resp.status}`;
      try {
        const payload = await resp.json();
        if (payload && payload.detail) {
          if (typeof payload.detail === "string") {
            message = payload.detail;
          } else if (payload.detail.diagnostics) {
            diagnostics = payload.detail.diagnostics;
            message = diagnostics!.map((d) => `[${d.kind}] ${d.message}`).join("; ");
          }
        }
      } catch {
        // keep the generic message when the body is not JSON
      }
      throw new ApiError(resp.status, diagnostics, message);
    }
    if (resp.status === 204) {
      return undefined as T;
    }
    return (await resp.json()) as T;
  }

  createSession(source: string, name: string) {
    return this.request<{ id: string; state: SessionState }>(
      "POST", "/sessions", { source, name },
    );
  }

  getSession(id: string) {
    return this.request<SessionState>("GET", `/sessions/${id}`);
  }

  step(id: string, kind: string, index: number) {
    return this.request<SessionState>("POST", `/sessions/${id}/step`, {
      kind,
      index,
    });
  }

  undo(id: string) {
    return this.request<SessionState>("POST", `/sessions/${id}/undo`);
  }

  deleteSession(id: string) {
    return this.request<void>("DELETE", `/sessions/${id}`);
  }

  lts(id: string) {
    return this.request<LtsJson>("GET", `/sessions/${id}/lts`);
  }
}
