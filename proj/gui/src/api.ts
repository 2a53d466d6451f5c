import type { Geometry, Point, ScoreEntry } from "./plan.js";

export interface RealizationsPayload {
  generation: number;
  x: number[];
  realizations: { boundaries: number[][] }[];
}

export interface StatePayload {
  drilled: Point[];
  current_dip: number;
  decisions_taken: number;
  finished: boolean;
  generation: number;
  update_status: string;
}

export interface SessionReply {
  session_id: string;
  round_id: string;
  participant_id: string;
  geometry: Geometry;
  state: StatePayload;
  realizations: RealizationsPayload;
}

export interface EvaluateReply {
  generation: number;
  scores: ScoreEntry[];
  percentiles: number[];
}

export interface CommitReply {
  generation: number;
  state: StatePayload;
  finished: boolean;
  realizations?: RealizationsPayload;
  score?: number;
  percent?: number;
  rank?: number;
  finishers?: number;
  optimal_score?: number;
  reached_sand?: boolean;
  truth?: { boundaries: number[][] };
}

export type Decision = { action: "stop" } | { action: "continue"; y: number };

export class ApiError extends Error {
  constructor(readonly status: number, readonly kind: string, message: string, readonly bound?: string) {
    super(message);
  }
}

type FetchLike = (url: string, init?: { method?: string; headers?: Record<string, string>; body?: string }) =>
  Promise<{ status: number; text(): Promise<string> }>;

export class ApiClient {
  constructor(private readonly base: string, private readonly fetchImpl: FetchLike = fetch) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const text = await res.text();
    let data: any;
    try {
      data = JSON.parse(text);
    } catch {
      throw new ApiError(res.status, "malformed", `server sent non-JSON reply (${res.status})`);
    }
    if (res.status >= 400) {
      const err = data?.error ?? {};
      throw new ApiError(res.status, err.kind ?? "error", err.message ?? `HTTP ${res.status}`, err.bound);
    }
    return data as T;
  }

  createSession(roundId: string, participantId: string): Promise<SessionReply> {
    return this.post(`/rounds/${encodeURIComponent(roundId)}/sessions`, { participant_id: participantId });
  }

  evaluate(sessionId: string, trajectory: Point[]): Promise<EvaluateReply> {
    return this.post(`/sessions/${sessionId}/evaluate`, { trajectory });
  }

  commit(sessionId: string, decision: Decision): Promise<CommitReply> {
    return this.post(`/sessions/${sessionId}/commit`, decision);
  }
}
