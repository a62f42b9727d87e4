// Typed client for the lab server's HTTP and newline-delimited-JSON
// streaming contract.  No other endpoints are used anywhere in the UI.

import type {
  ArchiveDoc,
  CalendarDoc,
  ExperimentInfo,
  LabState,
  PrelabDoc,
  PrelabVerdict,
  ReservationDoc,
  StreamDone,
  StreamFrame,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }
}

export class ApiClient {
  token: string | null = null;

  constructor(readonly base: string = "") {}

  private headers(): Record<string, string> {
    const h: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    const doc = text ? JSON.parse(text) : null;
    if (!resp.ok) throw new ApiError(resp.status, doc?.detail ?? text);
    return doc as T;
  }

  async login(userId: string, password: string): Promise<string> {
    const doc = await this.call<{ token: string }>("POST", "/login", {
      user_id: userId,
      password,
    });
    this.token = doc.token;
    return doc.token;
  }

  experiments(): Promise<ExperimentInfo[]> {
    return this.call("GET", "/experiments");
  }

  prelab(experiment: string): Promise<PrelabDoc> {
    return this.call("GET", `/prelab/${experiment}`);
  }

  submitPrelab(experiment: string, questionId: string, answer: unknown): Promise<PrelabVerdict> {
    return this.call("POST", `/prelab/${experiment}`, { question_id: questionId, answer });
  }

  calendar(experiment: string, week?: string): Promise<CalendarDoc> {
    const q = week ? `?week=${week}` : "";
    return this.call("GET", `/calendar/${experiment}${q}`);
  }

  reserve(experiment: string, start: string): Promise<ReservationDoc> {
    return this.call("POST", "/reserve", { experiment, start });
  }

  cancelReservation(id: string): Promise<void> {
    return this.call("DELETE", `/reserve/${id}`);
  }

  startLab(experiment: string): Promise<LabState> {
    return this.call("POST", `/lab/${experiment}/start`);
  }

  labState(experiment: string): Promise<LabState> {
    return this.call("GET", `/lab/${experiment}/state`);
  }

  answer(experiment: string, variable: string, value: number | number[]): Promise<{ correct: boolean; state: LabState }> {
    return this.call("POST", `/lab/${experiment}/event`, { type: "answer", variable, value });
  }

  startRun(experiment: string): Promise<{ state: LabState }> {
    return this.call("POST", `/lab/${experiment}/event`, { type: "start_run" });
  }

  reset(experiment: string): Promise<{ state: LabState }> {
    return this.call("POST", `/lab/${experiment}/event`, { type: "reset" });
  }

  archive(archiveId: string): Promise<ArchiveDoc> {
    return this.call("GET", `/archive/${archiveId}`);
  }

  archiveCsvUrl(archiveId: string, which: "record" | "bode" | "bode_ideal"): string {
    return `${this.base}/archive/${archiveId}/${which}.csv`;
  }

  /** Consume the run stream; resolves with the completion message. */
  async streamRun(
    experiment: string,
    onFrame: (frame: StreamFrame) => void,
    signal?: AbortSignal,
  ): Promise<StreamDone> {
    const resp = await fetch(`${this.base}/lab/${experiment}/stream`, {
      headers: this.headers(),
      signal,
    });
    if (!resp.ok || !resp.body) throw new ApiError(resp.status, "stream unavailable");
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let nl;
      while ((nl = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, nl).trim();
        buffer = buffer.slice(nl + 1);
        if (!line) continue;
        const doc = JSON.parse(line);
        if (doc.done) return doc as StreamDone;
        onFrame(doc as StreamFrame);
      }
    }
    throw new ApiError(0, "stream ended without a completion message");
  }
}
