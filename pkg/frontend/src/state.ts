// UI state and its transitions. Transitions are pure so the breadcrumb
// trail can replay to the exact prior view, and state round-trips through
// the URL hash (shareable links).

import type { Role } from "./types.js";

export type Mode = "clinical" | "non_clinical";

export interface View {
  dashboardId: string | null;
  patientRef: string | null; // a patient-chart view when set
  filters: Record<string, unknown>;
  timeRange: { from?: string; to?: string } | null;
}

export interface UiState {
  role: Role;
  mode: Mode;
  view: View;
  trail: View[]; // breadcrumb history, most recent last
}

export class ModeLocked extends Error {}

function cloneView(view: View): View {
  return JSON.parse(JSON.stringify(view));
}

export function initialState(role: Role): UiState {
  return {
    role,
    mode: role === "non_clinical" ? "non_clinical" : "clinical",
    view: { dashboardId: null, patientRef: null, filters: {}, timeRange: null },
    trail: [],
  };
}

function push(state: UiState, next: View): UiState {
  return {
    ...state,
    view: next,
    trail: [...state.trail, cloneView(state.view)],
  };
}

export function openDashboard(state: UiState, dashboardId: string): UiState {
  return push(state, { dashboardId, patientRef: null, filters: {}, timeRange: null });
}

export function applyFilter(state: UiState, name: string, value: unknown): UiState {
  const filters = { ...state.view.filters };
  if (value === null || value === undefined || value === "") {
    delete filters[name];
  } else {
    filters[name] = value;
  }
  return push(state, { ...cloneView(state.view), filters });
}

export function clearFilters(state: UiState): UiState {
  return push(state, { ...cloneView(state.view), filters: {}, timeRange: null });
}

export function setTimeRange(state: UiState, from?: string, to?: string): UiState {
  const timeRange = from || to ? { from, to } : null;
  return push(state, { ...cloneView(state.view), timeRange });
}

export interface DrilldownTarget {
  target?: string;
  carry?: string[];
  patient_chart?: boolean;
  patientRef?: string;
}

export function drilldown(state: UiState, descriptor: DrilldownTarget): UiState {
  if (descriptor.patient_chart && descriptor.patientRef) {
    return push(state, {
      dashboardId: state.view.dashboardId,
      patientRef: descriptor.patientRef,
      filters: cloneView(state.view).filters,
      timeRange: null,
    });
  }
  if (!descriptor.target) return state;
  const carried: Record<string, unknown> = {};
  for (const name of descriptor.carry ?? []) {
    if (name in state.view.filters) carried[name] = state.view.filters[name];
  }
  return push(state, {
    dashboardId: descriptor.target,
    patientRef: null,
    filters: carried,
    timeRange: state.view.timeRange ? { ...state.view.timeRange } : null,
  });
}

export function carryFilterValue(state: UiState, name: string, value: unknown): UiState {
  // drill-down helper: click on a bucket applies its key as a filter
  return applyFilter(state, name, value);
}

export function toggleIdentifiability(state: UiState): UiState {
  if (state.role !== "clinical") {
    throw new ModeLocked("non-clinical sessions cannot switch to the identified view");
  }
  return { ...state, mode: state.mode === "clinical" ? "non_clinical" : "clinical" };
}

export function back(state: UiState): UiState {
  if (state.trail.length === 0) return state;
  const trail = state.trail.slice(0, -1);
  const view = cloneView(state.trail[state.trail.length - 1]);
  return { ...state, view, trail };
}

// --- URL <-> state ------------------------------------------------------------

export function stateToHash(state: UiState): string {
  const params = new URLSearchParams();
  if (state.view.dashboardId) params.set("d", state.view.dashboardId);
  if (state.view.patientRef) params.set("p", state.view.patientRef);
  if (Object.keys(state.view.filters).length) {
    params.set("f", JSON.stringify(state.view.filters));
  }
  if (state.view.timeRange) params.set("t", JSON.stringify(state.view.timeRange));
  params.set("m", state.mode);
  return "#" + params.toString();
}

export function stateFromHash(hash: string, role: Role): UiState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const state = initialState(role);
  const mode = params.get("m");
  if (mode === "non_clinical") state.mode = "non_clinical";
  // a non-clinical role can never open the identified mode from a URL
  if (role === "non_clinical") state.mode = "non_clinical";
  state.view = {
    dashboardId: params.get("d"),
    patientRef: params.get("p"),
    filters: params.get("f") ? JSON.parse(params.get("f") as string) : {},
    timeRange: params.get("t") ? JSON.parse(params.get("t") as string) : null,
  };
  return state;
}
