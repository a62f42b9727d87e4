// Calendar grid logic: display colors and the tentative 2-hour selection.
//
// Color convention of the booking interface: the user's confirmed block is
// green with its trailing cooldown red; anything taken by others or already
// past is gray; a free cell the user has tentatively picked turns blue
// (auto-extended to the full experiment block) until confirmed.

import type { CalendarDay, CellState } from "./types.js";

export type CellColor = "white" | "gray" | "green" | "red" | "blue";

export interface Selection {
  dayIndex: number;
  cellIndices: number[];
  start: string;
}

export function colorFor(state: CellState, selected: boolean): CellColor {
  switch (state) {
    case "own":
      return "green";
    case "cooldown":
      return "red";
    case "taken":
    case "past":
      return "gray";
    case "free":
      return selected ? "blue" : "white";
  }
}

export function cellsPerBlock(durationMinutes: number, slotMinutes: number): number {
  return Math.ceil(durationMinutes / slotMinutes);
}

/** Tentative selection starting at a clicked cell, or null when the click
 * lands on a non-free cell or the block would not fit in free cells. */
export function trySelect(
  days: CalendarDay[],
  dayIndex: number,
  cellIndex: number,
  blockCells: number,
): Selection | null {
  const day = days[dayIndex];
  if (!day) return null;
  const indices: number[] = [];
  for (let k = 0; k < blockCells; k++) {
    const cell = day.cells[cellIndex + k];
    if (!cell || cell.state !== "free") return null;
    indices.push(cellIndex + k);
  }
  return { dayIndex, cellIndices: indices, start: day.cells[cellIndex].start };
}

export interface GridCellView {
  start: string;
  color: CellColor;
  clickable: boolean;
}

/** Full display model for one week of cells under an optional selection. */
export function gridView(days: CalendarDay[], selection: Selection | null): GridCellView[][] {
  return days.map((day, di) =>
    day.cells.map((cell, ci) => {
      const selected =
        selection !== null && selection.dayIndex === di && selection.cellIndices.includes(ci);
      return {
        start: cell.start,
        color: colorFor(cell.state, selected),
        clickable: cell.state === "free",
      };
    }),
  );
}
