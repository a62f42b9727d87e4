// Live experiment console: three synchronized panels. (1) the current
// engine question with inputs, verdict feedback, Reset and Start Run
// enabled exactly when the mirrored engine state permits; (2) the animated
// device view; (3) scrolling input/output charts fed by the stream.

import type { ApiClient } from "../api.js";
import { drawDevice } from "../anim.js";
import { StripChartModel, drawStrip } from "../charts.js";
import { controls } from "../labstate.js";
import type { Store } from "../store.js";
import type { LabState, StreamFrame } from "../types.js";

export function renderLab(root: HTMLElement, store: Store, api: ApiClient): void {
  const experiment = store.get().experiment;
  root.innerHTML = `
    <h1>Lab: ${experiment}</h1>
    <p class="annotation"></p>
    <div class="lab-grid">
      <div class="panel question-panel">
        <p class="prompt"></p>
        <div class="inputs"></div>
        <p class="verdict"></p>
        <button class="btn-run">Start Run</button>
        <button class="btn-reset">Reset</button>
      </div>
      <div class="panel">
        <canvas class="device" width="360" height="160"></canvas>
      </div>
      <div class="panel charts">
        <canvas class="chart-u" width="520" height="130"></canvas>
        <canvas class="chart-f" width="520" height="130"></canvas>
      </div>
    </div>
  `;
  const els = {
    annotation: root.querySelector<HTMLElement>(".annotation")!,
    prompt: root.querySelector<HTMLElement>(".prompt")!,
    inputs: root.querySelector<HTMLElement>(".inputs")!,
    verdict: root.querySelector<HTMLElement>(".verdict")!,
    run: root.querySelector<HTMLButtonElement>(".btn-run")!,
    reset: root.querySelector<HTMLButtonElement>(".btn-reset")!,
    device: root.querySelector<HTMLCanvasElement>(".device")!,
    chartU: root.querySelector<HTMLCanvasElement>(".chart-u")!,
    chartF: root.querySelector<HTMLCanvasElement>(".chart-f")!,
  };
  const chart = new StripChartModel();
  let streaming = false;

  const paint = (state: LabState) => {
    store.set({ lab: state });
    els.annotation.textContent = `engine: ${state.annotation}`;
    const c = controls(state);
    els.run.disabled = !c.startEnabled;
    els.reset.disabled = !c.resetEnabled;
    els.inputs.innerHTML = "";
    if (state.question && c.inputsEnabled) {
      els.prompt.textContent = state.question.prompt;
      const fields: HTMLInputElement[] = [];
      for (const name of c.fields) {
        const label = document.createElement("label");
        label.textContent = `${name}: `;
        const input = document.createElement("input");
        input.type = "number";
        input.step = "any";
        input.name = name;
        label.appendChild(input);
        els.inputs.appendChild(label);
        fields.push(input);
      }
      const submit = document.createElement("button");
      submit.textContent = "Submit answer";
      submit.addEventListener("click", async () => {
        const values = fields.map((f) => Number(f.value));
        const value = values.length === 1 ? values[0] : values;
        try {
          const resp = await api.answer(state.experiment, state.question!.id, value);
          els.verdict.className = resp.correct ? "ok" : "error";
          els.verdict.textContent = resp.correct ? "correct" : "incorrect; try again";
          paint(resp.state);
        } catch (err) {
          els.verdict.className = "error";
          els.verdict.textContent = String(err);
        }
      });
      els.inputs.appendChild(submit);
    } else if (state.run.active) {
      els.prompt.textContent = "Experiment in progress; watch the live data.";
    } else if (state.result_held) {
      els.prompt.textContent = "Result saved. Run again, review the archive, or reset.";
      if (state.run.archive_id) {
        const link = document.createElement("button");
        link.textContent = "Open results";
        link.addEventListener("click", () =>
          store.set({ view: "archive", archiveId: state.run.archive_id }),
        );
        els.inputs.appendChild(link);
      }
    } else {
      els.prompt.textContent = "All questions answered. Start the run when ready.";
    }
  };

  const onFrame = (frame: StreamFrame) => {
    if (!chart.append(frame)) return; // out-of-order frames are dropped
    drawDevice(els.device, frame.anim.belt, frame.anim.defl);
    drawStrip(els.chartU, chart.u.toArray(), "#0b62a4", "input current u(t) [A]");
    drawStrip(els.chartF, chart.f.toArray(), "#a4330b", "spring force f(t) [N]");
  };

  const followStream = async () => {
    if (streaming) return;
    streaming = true;
    try {
      // reconnect loop with exponential backoff, capped at 10 s
      let backoff = 500;
      for (;;) {
        try {
          const done = await api.streamRun(experiment, onFrame);
          if (done.archive_id) {
            store.set({ view: "archive", archiveId: done.archive_id });
          } else {
            paint(await api.labState(experiment));
          }
          return;
        } catch {
          await new Promise((r) => setTimeout(r, backoff));
          backoff = Math.min(backoff * 2, 10_000);
          const state = await api.labState(experiment);
          if (!state.run.active) {
            paint(state);
            return;
          }
        }
      }
    } finally {
      streaming = false;
    }
  };

  els.run.addEventListener("click", async () => {
    try {
      const resp = await api.startRun(experiment);
      chart.clear();
      paint(resp.state);
      void followStream();
    } catch (err) {
      els.verdict.className = "error";
      els.verdict.textContent = String(err); // protocol violations rendered verbatim
    }
  });
  els.reset.addEventListener("click", async () => {
    const resp = await api.reset(experiment);
    els.verdict.textContent = "";
    paint(resp.state);
  });

  void (async () => {
    try {
      const state = await api.startLab(experiment);
      paint(state);
      if (state.run.active) void followStream();
    } catch (err) {
      els.prompt.className = "error";
      els.prompt.textContent = String(err);
    }
  })();
}
