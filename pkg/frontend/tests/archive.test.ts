// @vitest-environment jsdom
//
// Archive view: measured-vs-ideal overlay built from the archive document
// the end-to-end lab flow produced, with margin annotations and the
// [-270, 90] phase display window.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { overlayFromArchive } from "../src/charts.js";
import { Store } from "../src/store.js";
import type { ArchiveDoc } from "../src/types.js";
import { renderArchive } from "../src/views/archive.js";

const doc: ArchiveDoc = JSON.parse(
  readFileSync(join(__dirname, "fixtures", "archive_feedback.json"), "utf-8"),
);

describe("archive overlay model", () => {
  it("pairs measured and ideal series on the same grid", () => {
    const model = overlayFromArchive(doc);
    expect(model.measured.omega.length).toBeGreaterThan(50);
    expect(model.ideal.omega.length).toBe(model.measured.omega.length);
    expect(model.ideal.omega[0]).toBeCloseTo(model.measured.omega[0], 9);
    // strictly increasing frequency grid
    for (let i = 1; i < model.measured.omega.length; i++) {
      expect(model.measured.omega[i]).toBeGreaterThan(model.measured.omega[i - 1]);
    }
  });

  it("carries the phase display window and margin annotations", () => {
    const model = overlayFromArchive(doc);
    expect(model.phaseWindow).toEqual([-270, 90]);
    expect(model.phiPm).not.toBeNull();
    expect(model.phiD).toBe(45);
    expect(Math.abs(model.phiPm! - model.phiD!)).toBeLessThanOrEqual(6);
  });

  it("measured curve tracks the ideal one within a few dB mid-band", () => {
    const model = overlayFromArchive(doc);
    const { omega, mag } = model.measured;
    let worst = 0;
    for (let i = 0; i < omega.length; i++) {
      if (omega[i] < 20 || omega[i] > 800) continue;
      worst = Math.max(worst, Math.abs(mag[i] - model.ideal.mag[i]));
    }
    expect(worst).toBeLessThan(3);
  });
});

describe("archive view rendering", () => {
  it("renders the overlay, annotations and download links", async () => {
    const store = new Store();
    store.set({ archiveId: doc.archive_id });
    const api = {
      archive: async () => doc,
      archiveCsvUrl: (id: string, which: string) => `/archive/${id}/${which}.csv`,
    } as unknown as ApiClient;

    const root = document.createElement("div");
    renderArchive(root, store, api);
    await new Promise((r) => setTimeout(r, 0)); // let the async load settle

    expect(root.querySelector(".margins")!.textContent).toContain("phase margin");
    expect(root.querySelector(".margins")!.textContent).toContain("target 45");
    const legends = root.querySelectorAll(".legend .swatch");
    expect(legends.length).toBe(2);
    expect(root.querySelectorAll("canvas").length).toBe(2);
    const links = Array.from(root.querySelectorAll(".downloads a")).map((a) =>
      a.getAttribute("href"),
    );
    expect(links).toContain(`/archive/${doc.archive_id}/record.csv`);
    expect(links).toContain(`/archive/${doc.archive_id}/bode.csv`);
  });

  it("shows a not-found message for a missing archive", async () => {
    const store = new Store();
    store.set({ archiveId: "missing" });
    const api = {
      archive: async () => {
        throw new Error("404");
      },
      archiveCsvUrl: () => "",
    } as unknown as ApiClient;
    const root = document.createElement("div");
    renderArchive(root, store, api);
    await new Promise((r) => setTimeout(r, 0));
    expect(root.querySelector(".error")!.textContent).toContain("not found");
  });
});
