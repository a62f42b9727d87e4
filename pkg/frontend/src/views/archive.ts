// Results view: measured Bode overlaid on the ideal prediction, phase axis
// defaulting to the [-270, 90] display window, margin annotations, and CSV
// download links.

import type { ApiClient } from "../api.js";
import { drawBodeOverlay, overlayFromArchive } from "../charts.js";
import type { Store } from "../store.js";

export function renderArchive(root: HTMLElement, store: Store, api: ApiClient): void {
  const archiveId = store.get().archiveId;
  if (!archiveId) {
    root.innerHTML = `<h1>Results</h1><p class="error">No archive selected.</p>`;
    return;
  }
  root.innerHTML = `<h1>Results: ${archiveId}</h1><div class="archive"></div>`;
  const container = root.querySelector<HTMLElement>(".archive")!;
  void load(container, api, archiveId);
}

async function load(container: HTMLElement, api: ApiClient, archiveId: string): Promise<void> {
  try {
    const doc = await api.archive(archiveId);
    const model = overlayFromArchive(doc);
    const margin =
      model.phiPm === null
        ? "no 0 dB crossover inside the measured band"
        : `phase margin ${model.phiPm.toFixed(2)} deg at ${model.omegaGc!.toFixed(1)} rad/s`;
    const target =
      model.phiD !== null && model.phiPm !== null
        ? ` &mdash; target ${model.phiD.toFixed(0)} deg, achieved ${model.phiPm.toFixed(2)} deg`
        : "";
    container.innerHTML = `
      <p class="margins">${margin}${target}</p>
      <p class="legend">
        <span class="swatch measured"></span> measured
        <span class="swatch ideal"></span> ideal
      </p>
      <canvas class="bode-mag" width="640" height="220"></canvas>
      <canvas class="bode-phase" width="640" height="220"></canvas>
      <p class="downloads">
        <a href="${api.archiveCsvUrl(archiveId, "record")}" download>record.csv</a>
        <a href="${api.archiveCsvUrl(archiveId, "bode")}" download>bode.csv</a>
        <a href="${api.archiveCsvUrl(archiveId, "bode_ideal")}" download>bode_ideal.csv</a>
      </p>
    `;
    drawBodeOverlay(
      container.querySelector<HTMLCanvasElement>(".bode-mag"),
      container.querySelector<HTMLCanvasElement>(".bode-phase"),
      model,
    );
  } catch (err) {
    container.innerHTML = `<p class="error">Archive not found or not yours: ${String(err)}</p>`;
  }
}
