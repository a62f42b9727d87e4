import type { ApiClient } from "../api.js";
import type { Store } from "../store.js";

export function renderHome(root: HTMLElement, store: Store, api: ApiClient): void {
  const s = store.get();
  root.innerHTML = `
    <h1>Remote actuator laboratory</h1>
    <p>
      A series elastic actuator measures force through the deflection of its
      spring. From this console you work through the prelab, reserve machine
      time, drive live experiments, and review your archived results.
    </p>
    <ul class="experiment-list"></ul>
  `;
  const list = root.querySelector(".experiment-list")!;
  for (const exp of s.experiments) {
    const li = document.createElement("li");
    const status = exp.prelab_completed ? "prelab complete" : `prelab: ${exp.prelab_questions} questions`;
    li.innerHTML = `<strong>${exp.title}</strong> <span class="muted">(${status})</span>`;
    const go = document.createElement("button");
    go.textContent = exp.prelab_completed ? "Schedule" : "Start prelab";
    go.addEventListener("click", () => {
      store.set({ experiment: exp.id, view: exp.prelab_completed ? "scheduler" : "prelab" });
    });
    li.appendChild(go);
    list.appendChild(li);
  }
}
