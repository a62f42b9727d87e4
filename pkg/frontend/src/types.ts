// Payload shapes of the lab server's HTTP + streaming contract.

export interface ExperimentInfo {
  id: string;
  title: string;
  prelab_completed: boolean;
  prelab_questions: number;
  question_chain: string[];
  phi_d: number | null;
}

export interface PrelabQuestion {
  id: string;
  prompt: string;
  kind: "exact_free_response" | "range_free_response" | "multiple_choice";
  units?: string;
  options?: string[];
  image?: string;
}

export interface PrelabDoc {
  questions: PrelabQuestion[];
  done: string[];
  completed: boolean;
}

export interface PrelabVerdict {
  correct: boolean;
  hint: string | null;
  completed: boolean;
  next_question_id: string | null;
}

export type CellState = "free" | "past" | "taken" | "own" | "cooldown";

export interface CalendarCell {
  start: string;
  state: CellState;
}

export interface CalendarDay {
  date: string;
  cells: CalendarCell[];
}

export interface CalendarDoc {
  week_of: string;
  days: CalendarDay[];
  own_reservations: ReservationDoc[];
  can_reserve?: boolean;
}

export interface ReservationDoc {
  id: string;
  user_id: string;
  experiment: string;
  start: string;
  duration_minutes: number;
  cooldown_minutes: number;
  status: string;
}

export interface LabQuestion {
  id: string;
  prompt: string;
  fields: string[];
  units: string;
}

export interface RunInfo {
  active: boolean;
  seq: number;
  archive_id: string | null;
  error: string | null;
}

export interface LabState {
  experiment: string;
  annotation: string;
  question: LabQuestion | null;
  asks: string[];
  offers_start: boolean;
  offers_reset: boolean;
  checking: string | null;
  result_held: boolean;
  run: RunInfo;
  accepted_values: Record<string, number | number[]>;
  design: { phi_d: number; phi_pm: number; omega_gc_min: number } | null;
  last_verdict: { variable: string; correct: boolean; tolerance: string } | null;
}

export interface StreamFrame {
  seq: number;
  t: number;
  u: number;
  f: number;
  anim: { belt: number; defl: number };
}

export interface StreamDone {
  done: true;
  archive_id?: string;
  error?: string;
}

export interface BodeArrays {
  omega_rad_s: number[];
  mag_db: number[];
  phase_deg: number[];
}

export interface ArchiveDoc {
  archive_id: string;
  user_id: string;
  experiment: string;
  kind: "open_loop" | "closed_loop";
  created_at: string;
  margins: {
    phi_pm_deg: number | null;
    omega_gc_rad_s: number | null;
    crossover_found: boolean;
    magnitude_shift_db: number;
    phi_d_deg?: number;
    phi_pm_vs_target_deg?: number;
    open_loop_phi_pm_deg?: number;
  };
  phase_window_deg: [number, number];
  bode: { measured: BodeArrays; ideal: BodeArrays; dropped_segments: number };
  design: Record<string, number> | null;
  accepted_values: Record<string, number | number[]>;
}
