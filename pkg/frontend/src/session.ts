/** State machine for one labeling session.
 *
 * Invariants:
 * - exactly one POST per item; a submission that fails at the network
 *   level is retried explicitly, and a 409 on retry means the first
 *   attempt was recorded, so the item advances without re-posting;
 * - the only prediction ever shown for an item is the one the server
 *   computed before seeing the answer (returned by the POST itself);
 *   the client never asks for a prediction after answering.
 */

import { Api, AgentState, ApiError, NextItem, ResponseBody, SubmitResult } from "./api.js";

export type Phase = "idle" | "rating" | "submitting" | "retry" | "done" | "failed";

export interface ViewState {
  phase: Phase;
  current: NextItem | null;
  submitted: number;
  lastPrediction: boolean | null;
  lastChoice: boolean | null;
  lastAgreement: number | null;
  agent: AgentState | null;
  validationError: string | null;
  banner: string | null;
}

export interface Rating {
  intensity: number;
  filter: boolean;
}

export class LabelSession {
  private state: ViewState = {
    phase: "idle",
    current: null,
    submitted: 0,
    lastPrediction: null,
    lastChoice: null,
    lastAgreement: null,
    agent: null,
    validationError: null,
    banner: null,
  };
  private pending: ResponseBody | null = null;
  private listeners: Array<(state: ViewState) => void> = [];

  constructor(
    private readonly api: Api,
    private readonly user: string,
  ) {}

  view(): ViewState {
    return { ...this.state };
  }

  onChange(listener: (state: ViewState) => void): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.view());
    }
  }

  async start(): Promise<void> {
    const agent = await this.api.agentState(this.user);
    const current = await this.api.nextItem(this.user);
    this.update({
      agent,
      current,
      phase: current === null ? "done" : "rating",
      banner: null,
    });
  }

  /** Validate and submit the rating for the current item. */
  async submit(rating: Rating): Promise<void> {
    if (this.state.phase !== "rating" || this.state.current === null) {
      return; // guards double submission while a POST is in flight
    }
    if (!Number.isInteger(rating.intensity) || rating.intensity < 1 || rating.intensity > 5) {
      this.update({ validationError: "intensity must be a whole number from 1 to 5" });
      return;
    }
    this.pending = {
      message_id: this.state.current.message_id,
      intensity: rating.intensity,
      filter: rating.filter,
    };
    this.update({ phase: "submitting", validationError: null });
    await this.deliver();
  }

  /** Re-send after a network failure; server-side dedup makes this safe. */
  async retry(): Promise<void> {
    if (this.state.phase !== "retry" || this.pending === null) {
      return;
    }
    this.update({ phase: "submitting", banner: null });
    await this.deliver();
  }

  private async deliver(): Promise<void> {
    const body = this.pending;
    if (body === null) {
      return;
    }
    let result: SubmitResult;
    try {
      result = await this.api.submitResponse(this.user, body);
    } catch (error) {
      if (error instanceof ApiError) {
        if (error.status === 409) {
          // The earlier attempt was recorded; advance without re-posting.
          await this.advance(null, null, body.filter);
          return;
        }
        if (error.status === 400 || error.status === 422) {
          this.update({ phase: "rating", validationError: error.detail });
          this.pending = null;
          return;
        }
        this.update({ phase: "failed", banner: error.detail });
        this.pending = null;
        return;
      }
      // Network-level failure: keep the pending body for an explicit retry.
      this.update({
        phase: "retry",
        banner: "could not reach the server; your answer was not recorded twice — retry when back online",
      });
      return;
    }
    await this.advance(result.agent_prediction_was, result.running_agreement, body.filter);
  }

  private async advance(
    prediction: boolean | null,
    agreement: number | null,
    choice: boolean,
  ): Promise<void> {
    this.pending = null;
    const agent = await this.api.agentState(this.user);
    const next = await this.api.nextItem(this.user);
    this.update({
      submitted: this.state.submitted + 1,
      lastPrediction: prediction,
      lastChoice: choice,
      lastAgreement: agreement,
      agent,
      current: next,
      phase: next === null ? "done" : "rating",
      banner: null,
    });
  }
}
