// Controller: connects state transitions to API fetches and rendering.
// Panels on the current dashboard share the filter set (linked panels);
// stale responses are discarded via per-panel generation counters.

import type { Api } from "./api.js";
import { ApiError } from "./api.js";
import type { Catalog, DashboardEntry, PanelPayload, Session, Bucket } from "./types.js";
import {
  UiState,
  applyFilter,
  back,
  drilldown,
  initialState,
  openDashboard,
  stateToHash,
  toggleIdentifiability,
} from "./state.js";

export interface ControllerEvents {
  onState?: (state: UiState) => void;
  onPanelData?: (panelId: string, payload: PanelPayload) => void;
  onNotice?: (message: string) => void;
  onChart?: (patientRef: string) => void;
}

export class Controller {
  state: UiState;
  catalog: Catalog = {};
  payloads = new Map<string, PanelPayload>();
  private generations = new Map<string, number>();

  constructor(
    private api: Api,
    session: Session,
    private events: ControllerEvents = {},
  ) {
    this.state = initialState(session.role);
  }

  dashboard(): DashboardEntry | null {
    if (!this.state.view.dashboardId) return null;
    for (const entries of Object.values(this.catalog)) {
      for (const dashboard of entries) {
        if (dashboard.id === this.state.view.dashboardId) return dashboard;
      }
    }
    return null;
  }

  async start(): Promise<void> {
    this.catalog = await this.api.dashboards();
    this.emit();
  }

  private emit(): void {
    this.events.onState?.(this.state);
    if (typeof window !== "undefined" && window.history?.replaceState) {
      window.history.replaceState(null, "", stateToHash(this.state));
    }
  }

  /** Fetch one panel; drop the response if a newer request superseded it. */
  private async fetchPanel(dashboard: DashboardEntry, panelId: string): Promise<void> {
    const generation = (this.generations.get(panelId) ?? 0) + 1;
    this.generations.set(panelId, generation);
    const payload = await this.api.panelData(
      dashboard.id,
      panelId,
      this.state.view.filters,
      this.state.view.timeRange,
      this.state.mode,
    );
    if (this.generations.get(panelId) !== generation) return; // stale
    this.payloads.set(panelId, payload);
    this.events.onPanelData?.(panelId, payload);
  }

  /** Re-query every panel on the current dashboard with the shared filters. */
  async refreshPanels(): Promise<void> {
    const dashboard = this.dashboard();
    if (!dashboard) return;
    await Promise.all(dashboard.panels.map((p) => this.fetchPanel(dashboard, p.id)));
  }

  async open(dashboardId: string): Promise<void> {
    this.state = openDashboard(this.state, dashboardId);
    this.emit();
    await this.refreshPanels();
  }

  async setFilter(name: string, value: unknown): Promise<void> {
    this.state = applyFilter(this.state, name, value);
    this.emit();
    await this.refreshPanels();
  }

  async clearAllFilters(): Promise<void> {
    for (const name of Object.keys(this.state.view.filters)) {
      this.state = applyFilter(this.state, name, null);
    }
    this.emit();
    await this.refreshPanels();
  }

  async toggleMode(): Promise<void> {
    this.state = toggleIdentifiability(this.state);
    this.emit();
    await this.refreshPanels();
  }

  async goBack(): Promise<void> {
    this.state = back(this.state);
    this.emit();
    if (this.state.view.patientRef) {
      this.events.onChart?.(this.state.view.patientRef);
    } else {
      await this.refreshPanels();
    }
  }

  /** Bucket click: navigate per the panel's drilldown descriptor. */
  async drillBucket(panelId: string, bucket: Bucket): Promise<void> {
    const dashboard = this.dashboard();
    const panel = dashboard?.panels.find((p) => p.id === panelId);
    const descriptor = panel?.drilldown;
    if (!descriptor?.target) return;
    // the clicked bucket's key becomes a filter in the target dashboard
    const carryName = descriptor.carry?.[0];
    this.state = drilldown(this.state, { target: descriptor.target, carry: [] });
    if (carryName !== undefined && bucket.key.length) {
      this.state = applyFilter(this.state, carryName, bucket.key[0]);
      // the intermediate filterless view is not a meaningful stop for back()
      this.state.trail.splice(this.state.trail.length - 1, 1);
    }
    this.emit();
    await this.refreshPanels();
  }

  /** Row click on a patient table: open the patient chart. */
  async drillRow(panelId: string, row: Record<string, unknown>): Promise<void> {
    const dashboard = this.dashboard();
    const panel = dashboard?.panels.find((p) => p.id === panelId);
    const descriptor = panel?.drilldown;
    if (!descriptor?.patient_chart) return;
    const field = descriptor.patient_field ?? "patient_id";
    const ref = String(row[field] ?? row["_key"] ?? "");
    if (!ref) return;
    if (this.state.mode !== "clinical" && !ref.startsWith("P-")) {
      this.events.onNotice?.("This target is only available in the identified view.");
      return;
    }
    try {
      await this.api.chart(ref);
    } catch (error) {
      if (error instanceof ApiError && (error.status === 403 || error.status === 401)) {
        this.events.onNotice?.("You are not authorised to open this record.");
        return; // state unchanged
      }
      throw error;
    }
    this.state = drilldown(this.state, { patient_chart: true, patientRef: ref });
    this.emit();
    this.events.onChart?.(ref);
  }
}
