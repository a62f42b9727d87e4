// Control enablement mirrors the engine state: a button is live exactly
// when the synthesized controller offers the corresponding action, and
// nothing is live while a run is in flight.

import type { LabState } from "./types.js";

export interface Controls {
  startEnabled: boolean;
  resetEnabled: boolean;
  inputsEnabled: boolean;
  fields: string[];
}

export function controls(state: LabState): Controls {
  const running = state.run.active;
  return {
    startEnabled: state.offers_start && !running,
    resetEnabled: state.offers_reset && !running,
    inputsEnabled: state.question !== null && !running,
    fields: state.question?.fields ?? [],
  };
}

export function phaseLabel(state: LabState): string {
  if (state.run.active) return "running";
  if (state.question) return "question";
  if (state.result_held) return "done";
  if (state.offers_start) return "ready";
  return "idle";
}
