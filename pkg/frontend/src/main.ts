// Browser bootstrap: login form, category navigation, dashboard view.

import { HttpApi, ApiError } from "./api.js";
import { Controller } from "./controller.js";
import { renderBanner, renderChart, renderPanel } from "./render.js";
import type { Session } from "./types.js";
import { ModeLocked } from "./state.js";

const CATEGORY_TITLES: Record<string, string> = {
  population_health: "Population Health",
  clinical_pathways: "Clinical Pathways",
  caseload_management: "Caseload Management",
  patient_chart: "Patient Chart",
};

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const api = new HttpApi("");
  const loginForm = $("login-form") as HTMLFormElement;
  loginForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const username = (document.getElementById("username") as HTMLInputElement).value;
    const password = (document.getElementById("password") as HTMLInputElement).value;
    try {
      const session = await api.login(username, password);
      $("login").hidden = true;
      $("app").hidden = false;
      await run(api, session);
    } catch (error) {
      $("login-error").textContent =
        error instanceof ApiError ? error.message : "login failed";
    }
  });
}

async function run(api: HttpApi, session: Session): Promise<void> {
  const nav = $("nav");
  const banner = $("banner");
  const filterBar = $("filters");
  const grid = $("panels");
  const notice = $("notice");

  const controller = new Controller(api, session, {
    onState: (state) => {
      $("mode-label").textContent =
        state.mode === "clinical" ? "Clinical (identified)" : "Non-clinical (de-identified)";
      ($("mode-toggle") as HTMLButtonElement).disabled = state.role !== "clinical";
      ($("back-button") as HTMLButtonElement).disabled = state.trail.length === 0;
    },
    onPanelData: (panelId, payload) => {
      let cell = grid.querySelector<HTMLElement>(`[data-cell="${panelId}"]`);
      if (!cell) {
        cell = document.createElement("div");
        cell.dataset.cell = panelId;
        grid.appendChild(cell);
      }
      renderPanel(cell, payload, {
        onBucketClick: (bucket) => void controller.drillBucket(panelId, bucket),
        onRowClick: (row) => void controller.drillRow(panelId, row),
      });
    },
    onNotice: (message) => {
      notice.textContent = message;
      notice.hidden = false;
      setTimeout(() => (notice.hidden = true), 4000);
    },
    onChart: async (ref) => {
      const bundle = await api.chart(ref);
      banner.textContent = "";
      filterBar.textContent = "";
      grid.textContent = "";
      renderChart(grid, bundle);
    },
  });

  await controller.start();

  nav.textContent = "";
  for (const [category, dashboards] of Object.entries(controller.catalog)) {
    if (!dashboards.length) continue;
    const section = document.createElement("div");
    section.className = "nav-category";
    const heading = document.createElement("h2");
    heading.textContent = CATEGORY_TITLES[category] ?? category;
    section.appendChild(heading);
    for (const dashboard of dashboards) {
      const link = document.createElement("button");
      link.className = "nav-link";
      link.textContent = dashboard.title;
      link.addEventListener("click", async () => {
        grid.textContent = "";
        await controller.open(dashboard.id);
        renderBanner(banner, dashboard.title, dashboard.description);
        renderFilterBar();
      });
      section.appendChild(link);
    }
    nav.appendChild(section);
  }

  function renderFilterBar(): void {
    filterBar.textContent = "";
    const dashboard = controller.dashboard();
    if (!dashboard) return;
    for (const slot of dashboard.filter_schema) {
      const label = document.createElement("label");
      label.textContent = slot.name;
      const input = document.createElement("input");
      input.name = slot.name;
      input.value = String(controller.state.view.filters[slot.name] ?? "");
      input.addEventListener("change", () => void controller.setFilter(slot.name, input.value));
      label.appendChild(input);
      filterBar.appendChild(label);
    }
    const clear = document.createElement("button");
    clear.textContent = "Clear filters";
    clear.addEventListener("click", () => void controller.clearAllFilters());
    filterBar.appendChild(clear);
  }

  $("mode-toggle").addEventListener("click", async () => {
    try {
      await controller.toggleMode();
    } catch (error) {
      if (error instanceof ModeLocked) {
        notice.textContent = error.message;
        notice.hidden = false;
      }
    }
  });
  $("back-button").addEventListener("click", () => void controller.goBack());
}

document.addEventListener("DOMContentLoaded", () => void boot());
