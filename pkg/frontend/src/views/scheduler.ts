// Week grid of 30-minute cells. Clicking a free cell highlights the whole
// two-hour block in blue; Schedule confirms it (green + red cooldown);
// before the window starts the same button cancels.

import type { ApiClient } from "../api.js";
import { cellsPerBlock, gridView, trySelect, type Selection } from "../calendar.js";
import type { Store } from "../store.js";
import type { CalendarDoc } from "../types.js";

const SLOT_MINUTES = 30;
const DURATION_MINUTES = 120;

export function renderScheduler(root: HTMLElement, store: Store, api: ApiClient): void {
  const experiment = store.get().experiment;
  root.innerHTML = `
    <h1>Schedule: ${experiment}</h1>
    <p class="legend">
      <span class="swatch white"></span> free
      <span class="swatch blue"></span> your selection
      <span class="swatch green"></span> your block
      <span class="swatch red"></span> cool-down
      <span class="swatch gray"></span> taken / past
    </p>
    <div class="calendar"></div>
    <div class="actions"></div>
  `;
  const calendarEl = root.querySelector<HTMLElement>(".calendar")!;
  const actionsEl = root.querySelector<HTMLElement>(".actions")!;
  void load(calendarEl, actionsEl, store, api, experiment);
}

async function load(
  calendarEl: HTMLElement,
  actionsEl: HTMLElement,
  store: Store,
  api: ApiClient,
  experiment: string,
): Promise<void> {
  const doc = await api.calendar(experiment);
  let selection: Selection | null = null;

  const paint = () => {
    calendarEl.innerHTML = "";
    const view = gridView(doc.days, selection);
    doc.days.forEach((day, di) => {
      const col = document.createElement("div");
      col.className = "day";
      const head = document.createElement("div");
      head.className = "day-head";
      head.textContent = day.date;
      col.appendChild(head);
      view[di].forEach((cell, ci) => {
        const el = document.createElement("div");
        el.className = `cell ${cell.color}`;
        el.title = cell.start;
        el.textContent = cell.start.slice(11, 16);
        if (cell.clickable) {
          el.addEventListener("click", () => {
            selection = trySelect(doc.days, di, ci, cellsPerBlock(DURATION_MINUTES, SLOT_MINUTES));
            paint();
          });
        }
        col.appendChild(el);
      });
      calendarEl.appendChild(col);
    });
    paintActions();
  };

  const paintActions = () => {
    actionsEl.innerHTML = "";
    const pending = doc.own_reservations.find((r) => r.experiment === experiment);
    if (pending) {
      const cancel = document.createElement("button");
      cancel.textContent = `Cancel ${pending.start.slice(0, 16)}`;
      cancel.addEventListener("click", async () => {
        try {
          await api.cancelReservation(pending.id);
          await reload();
        } catch (err) {
          note(String(err), true);
        }
      });
      actionsEl.appendChild(cancel);
      const enter = document.createElement("button");
      enter.textContent = "Enter lab";
      enter.addEventListener("click", () => store.set({ view: "lab" }));
      actionsEl.appendChild(enter);
      return;
    }
    const schedule = document.createElement("button");
    schedule.textContent = selection ? `Schedule ${selection.start.slice(0, 16)}` : "Schedule";
    schedule.disabled = selection === null || doc.can_reserve === false;
    schedule.addEventListener("click", async () => {
      if (!selection) return;
      try {
        await api.reserve(experiment, selection.start);
        selection = null;
        await reload();
      } catch (err) {
        selection = null; // losing selection cleared on conflict
        note(String(err), true);
        await reload();
      }
    });
    actionsEl.appendChild(schedule);
  };

  const note = (text: string, isError: boolean) => {
    const p = document.createElement("p");
    p.className = isError ? "error" : "ok";
    p.textContent = text;
    actionsEl.appendChild(p);
  };

  const reload = async () => {
    const fresh = await api.calendar(experiment);
    doc.days = fresh.days;
    doc.own_reservations = fresh.own_reservations;
    doc.can_reserve = fresh.can_reserve;
    paint();
  };

  paint();
}
