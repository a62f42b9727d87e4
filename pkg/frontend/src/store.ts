// Minimal observable store holding the UI's mirrored state.

import type { ExperimentInfo, LabState } from "./types.js";

export type View = "home" | "prelab" | "scheduler" | "lab" | "archive";

export interface UiState {
  token: string | null;
  displayName: string | null;
  view: View;
  experiment: string;
  archiveId: string | null;
  experiments: ExperimentInfo[];
  lab: LabState | null;
  banner: string | null;
}

const initial: UiState = {
  token: null,
  displayName: null,
  view: "home",
  experiment: "sysid",
  archiveId: null,
  experiments: [],
  lab: null,
  banner: null,
};

export class Store {
  private state: UiState = { ...initial };
  private listeners: Array<(s: UiState) => void> = [];

  get(): UiState {
    return this.state;
  }

  set(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: (s: UiState) => void): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((x) => x !== fn);
    };
  }
}
