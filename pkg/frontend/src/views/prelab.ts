// One question at a time; wrong answers keep the question open with the
// hint available; answered ones are reviewable read-only; completion
// navigates to the scheduler.

import type { ApiClient } from "../api.js";
import type { Store } from "../store.js";
import type { PrelabDoc, PrelabQuestion } from "../types.js";

export function renderPrelab(root: HTMLElement, store: Store, api: ApiClient): void {
  const experiment = store.get().experiment;
  root.innerHTML = `<h1>Prelab: ${experiment}</h1><div class="prelab"></div>`;
  const container = root.querySelector<HTMLElement>(".prelab")!;
  void load(container, store, api, experiment);
}

async function load(container: HTMLElement, store: Store, api: ApiClient, experiment: string) {
  const doc = await api.prelab(experiment);
  container.innerHTML = "";
  const done = new Set(doc.done);
  let activeShown = false;
  for (const q of doc.questions) {
    if (done.has(q.id)) {
      container.appendChild(reviewCard(q));
    } else if (!activeShown) {
      container.appendChild(activeCard(q, store, api, experiment, container));
      activeShown = true;
    }
  }
  if (doc.completed) {
    const note = document.createElement("p");
    note.className = "ok";
    note.textContent = "Prelab complete. Taking you to the scheduler.";
    container.appendChild(note);
    setTimeout(() => store.set({ view: "scheduler" }), 600);
  }
}

function reviewCard(q: PrelabQuestion): HTMLElement {
  const card = document.createElement("div");
  card.className = "card done";
  card.innerHTML = `<p>${q.prompt}</p><p class="ok">answered</p>`;
  return card;
}

function activeCard(
  q: PrelabQuestion,
  store: Store,
  api: ApiClient,
  experiment: string,
  container: HTMLElement,
): HTMLElement {
  const card = document.createElement("div");
  card.className = "card";
  const prompt = document.createElement("p");
  prompt.textContent = q.prompt;
  card.appendChild(prompt);

  let getValue: () => unknown;
  if (q.kind === "multiple_choice") {
    const select = document.createElement("select");
    for (const opt of q.options ?? []) {
      const o = document.createElement("option");
      o.value = opt;
      o.textContent = opt;
      select.appendChild(o);
    }
    card.appendChild(select);
    getValue = () => select.value;
  } else {
    const input = document.createElement("input");
    input.type = "number";
    input.step = "any";
    if (q.units) {
      const unit = document.createElement("span");
      unit.className = "muted";
      unit.textContent = ` ${q.units}`;
      card.appendChild(input);
      card.appendChild(unit);
    } else {
      card.appendChild(input);
    }
    getValue = () => Number(input.value);
  }

  const submit = document.createElement("button");
  submit.textContent = "Submit";
  const feedback = document.createElement("p");
  card.appendChild(submit);
  card.appendChild(feedback);
  submit.addEventListener("click", async () => {
    const verdict = await api.submitPrelab(experiment, q.id, getValue());
    if (verdict.correct) {
      await load(container, store, api, experiment);
    } else {
      feedback.className = "error";
      feedback.textContent = verdict.hint ? `Not quite. Hint: ${verdict.hint}` : "Not quite; try again.";
    }
  });
  return card;
}
