/** Thin DOM rendering for the session state; all logic stays in session.ts. */

import { ViewState } from "./session.js";

/** The subset of element behavior the renderer needs (test-stubbable). */
export interface Slot {
  textContent: string | null;
  hidden: boolean;
}

export interface PanelSlots {
  messageText: Slot;
  progress: Slot;
  prediction: Slot;
  agreement: Slot;
  warmup: Slot;
  categories: Slot;
  validation: Slot;
  banner: Slot;
  retry: Slot;
  form: Slot;
  done: Slot;
}

const CATEGORY_NAMES: Record<string, string> = {
  "0": "general harassment",
  "1": "cruel statement",
  "2": "religious/racial/ethnic",
  "3": "sexual orientation",
  "4": "sex/gender",
  "5": "threat",
  "6": "multiple types",
  "7": "non-harassment",
  non_codable: "non-codable",
};

function formatPercent(value: number): string {
  return `${Math.round(value * 100)}%`;
}

export function categorySummary(rates: Record<string, number>): string {
  const parts = Object.keys(rates)
    .sort()
    .map((key) => `${CATEGORY_NAMES[key] ?? key}: ${formatPercent(rates[key])}`);
  return parts.join(" · ");
}

export function render(state: ViewState, slots: PanelSlots): void {
  slots.messageText.textContent = state.current ? state.current.text : "";
  slots.progress.textContent = `${state.submitted} response${state.submitted === 1 ? "" : "s"} submitted`;

  if (state.agent === null || !state.agent.warmed_up) {
    slots.warmup.hidden = false;
    slots.warmup.textContent = "agent warming up";
    slots.prediction.hidden = true;
  } else {
    slots.warmup.hidden = true;
    slots.prediction.hidden = state.lastPrediction === null;
    if (state.lastPrediction !== null) {
      const matched = state.lastPrediction === state.lastChoice ? "matched" : "differed from";
      slots.prediction.textContent =
        `agent predicted ${state.lastPrediction ? "filter" : "keep"} for your last item ` +
        `and ${matched} your choice`;
    }
  }

  const rate = state.agent?.agreement_rate;
  slots.agreement.textContent =
    rate === null || rate === undefined
      ? "agreement rate: n/a"
      : `agreement rate: ${formatPercent(rate)}`;
  slots.categories.textContent = state.agent
    ? categorySummary(state.agent.per_category_filter_rate)
    : "";

  slots.validation.hidden = state.validationError === null;
  slots.validation.textContent = state.validationError ?? "";
  slots.banner.hidden = state.banner === null;
  slots.banner.textContent = state.banner ?? "";
  slots.retry.hidden = state.phase !== "retry";
  slots.form.hidden = state.phase === "done" || state.phase === "failed";
  slots.done.hidden = state.phase !== "done";
  slots.done.textContent = state.phase === "done" ? "all items rated — thank you" : "";
}
