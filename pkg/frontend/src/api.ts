// Thin typed client over the versioned HTTP API. The UI never aggregates or
// recomputes; everything it shows comes back from these calls.

import type { Catalog, ChartBundle, PanelPayload, Session, TimeRange } from "./types.js";

export interface Api {
  login(username: string, password: string): Promise<Session>;
  dashboards(): Promise<Catalog>;
  panelData(
    dashboardId: string,
    panelId: string,
    filters: Record<string, unknown>,
    timeRange: TimeRange | null,
    view: "clinical" | "non_clinical",
  ): Promise<PanelPayload>;
  chart(patientRef: string): Promise<ChartBundle>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "error";
  let message = response.statusText;
  try {
    const body = await response.json();
    code = body.detail?.code ?? body.code ?? code;
    message = body.detail?.message ?? body.message ?? message;
  } catch {
    // keep defaults for non-JSON errors
  }
  throw new ApiError(response.status, code, message);
}

export class HttpApi implements Api {
  private token = "";

  constructor(private base: string = "") {}

  private headers(): Record<string, string> {
    const out: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) out["Authorization"] = `Bearer ${this.token}`;
    return out;
  }

  async login(username: string, password: string): Promise<Session> {
    const response = await fetch(`${this.base}/v1/login`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ username, password }),
    });
    if (!response.ok) await parseError(response);
    const body = await response.json();
    this.token = body.token;
    return { token: body.token, user: body.user, role: body.role };
  }

  async dashboards(): Promise<Catalog> {
    const response = await fetch(`${this.base}/v1/dashboards`, { headers: this.headers() });
    if (!response.ok) await parseError(response);
    return (await response.json()).categories;
  }

  async panelData(
    dashboardId: string,
    panelId: string,
    filters: Record<string, unknown>,
    timeRange: TimeRange | null,
    view: "clinical" | "non_clinical",
  ): Promise<PanelPayload> {
    const body: Record<string, unknown> = { filters };
    if (timeRange) body["time_range"] = timeRange;
    if (view === "non_clinical") body["view"] = view;
    const response = await fetch(
      `${this.base}/v1/dashboards/${dashboardId}/panels/${panelId}/data`,
      { method: "POST", headers: this.headers(), body: JSON.stringify(body) },
    );
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async chart(patientRef: string): Promise<ChartBundle> {
    const response = await fetch(`${this.base}/v1/patients/${patientRef}/chart`, {
      headers: this.headers(),
    });
    if (!response.ok) await parseError(response);
    return response.json();
  }
}
