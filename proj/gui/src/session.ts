import { ApiClient, ApiError, CommitReply, EvaluateReply, RealizationsPayload } from "./api.js";
import { Geometry, Point, clampPlan, editPlan, extendPlan, selectBand } from "./plan.js";

export interface FinalPanel {
  score: string;
  percent: string;
  rank: string;
  finishers: string;
  optimal_score: string;
  reached_sand: boolean;
}

export interface ViewState {
  geometry: Geometry;
  realizations: RealizationsPayload;
  drilled: Point[];
  plan: Point[];
  currentDip: number;
  selected: number | null;
  clamped: boolean;
  last: EvaluateReply | null;
  previous: EvaluateReply | null;
  band: number | null;
  highlighted: number[] | null;
  truth: number[][] | null;
  finished: boolean;
}

export interface View {
  render(state: ViewState): void;
  busy(flag: boolean): void;
  error(message: string): void;
  final(panel: FinalPanel): void;
}

// Every number it shows comes from a server reply; it only moves the plan and
// groups members by the server's percentiles.
export class SessionController {
  private sessionId = "";
  private inFlight = false;
  state: ViewState | null = null;

  constructor(private readonly api: ApiClient, private readonly view: View) {}

  get busy(): boolean {
    return this.inFlight;
  }

  private async request<T>(f: () => Promise<T>): Promise<T | null> {
    if (this.inFlight) {
      this.view.error("another request is still in flight");
      return null;
    }
    this.inFlight = true;
    this.view.busy(true);
    try {
      return await f();
    } catch (e) {
      if (e instanceof ApiError && e.bound) this.view.error(`rejected (${e.bound}): ${e.message}`);
      else this.view.error(e instanceof Error ? e.message : String(e));
      return null;
    } finally {
      this.inFlight = false;
      this.view.busy(false);
    }
  }

  private expect(): ViewState {
    if (!this.state) throw new Error("no live session");
    return this.state;
  }

  async start(roundId: string, participantId: string): Promise<boolean> {
    const reply = await this.request(() => this.api.createSession(roundId, participantId));
    if (!reply) return false;
    this.sessionId = reply.session_id;
    const drilled = reply.state.drilled;
    this.state = {
      geometry: reply.geometry,
      realizations: reply.realizations,
      drilled,
      plan: extendPlan(reply.geometry, drilled, reply.state.current_dip),
      currentDip: reply.state.current_dip,
      selected: null,
      clamped: false,
      last: null,
      previous: null,
      band: null,
      highlighted: null,
      truth: null,
      finished: false,
    };
    this.view.render(this.state);
    return true;
  }

  select(index: number): boolean {
    const s = this.expect();
    if (index < s.drilled.length || index >= s.plan.length) return false;
    s.selected = index;
    this.view.render(s);
    return true;
  }

  adjust(dy: number): boolean {
    const s = this.expect();
    if (s.selected === null) return false;
    const r = editPlan(s.geometry, s.plan, s.drilled.length, s.selected, dy, s.geometry.initial_dip);
    if (!r) return false;
    s.plan = r.plan;
    s.clamped = r.clamped;
    if (s.selected >= s.plan.length) s.selected = null;
    this.view.render(s);
    return true;
  }

  async evaluate(): Promise<EvaluateReply | null> {
    const s = this.expect();
    const reply = await this.request(() => this.api.evaluate(this.sessionId, s.plan));
    if (!reply) return null;
    s.previous = s.last;
    s.last = reply;
    s.band = null;
    s.highlighted = null;
    this.view.render(s);
    return reply;
  }

  chooseBand(band: number | null): number[] | null {
    const s = this.expect();
    s.band = band;
    s.highlighted = band === null || !s.last ? null : selectBand(s.last.scores, s.last.percentiles, band);
    this.view.render(s);
    return s.highlighted;
  }

  async commitNext(): Promise<CommitReply | null> {
    const s = this.expect();
    const next = s.plan[s.drilled.length];
    if (!next) return this.stop();
    return this.apply(await this.request(() => this.api.commit(this.sessionId, { action: "continue", y: next.y })));
  }

  async stop(): Promise<CommitReply | null> {
    return this.apply(await this.request(() => this.api.commit(this.sessionId, { action: "stop" })));
  }

  private apply(reply: CommitReply | null): CommitReply | null {
    if (!reply) return null;
    const s = this.expect();
    s.drilled = reply.state.drilled;
    s.currentDip = reply.state.current_dip;
    s.finished = reply.finished;
    s.last = null;
    s.previous = null;
    s.band = null;
    s.highlighted = null;
    if (s.selected !== null && s.selected < s.drilled.length) s.selected = null;
    if (reply.realizations) s.realizations = reply.realizations;
    const ahead = s.plan.slice(s.drilled.length).map((p) => ({ ...p }));
    const merged = [...s.drilled.map((p) => ({ ...p })), ...ahead];
    s.plan = reply.finished ? merged.slice(0, s.drilled.length) : clampPlan(s.geometry, merged, s.drilled.length, s.geometry.initial_dip).plan;
    if (reply.finished) {
      s.truth = reply.truth?.boundaries ?? null;
      this.view.final({
        score: String(reply.score),
        percent: String(reply.percent),
        rank: String(reply.rank),
        finishers: String(reply.finishers),
        optimal_score: String(reply.optimal_score),
        reached_sand: reply.reached_sand === true,
      });
    }
    this.view.render(s);
    return reply;
  }
}
