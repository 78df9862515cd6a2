// Declarative rendering of panel payloads. Every number and label shown in
// the DOM is a payload value; the only arithmetic here is presentation
// scaling of bar widths, never of displayed figures.

import type { Bucket, ChartBundle, PanelPayload } from "./types.js";

const BOROUGH_ORDER = ["Croydon", "Lambeth", "Lewisham", "Southwark", "Homeless", "Other"];

export interface PanelCallbacks {
  onBucketClick?: (bucket: Bucket) => void;
  onRowClick?: (row: Record<string, unknown>) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function emptyState(): HTMLElement {
  return el("div", "empty-state", "No matching patients");
}

function errorPanel(message: string): HTMLElement {
  const node = el("div", "error-panel");
  node.appendChild(el("strong", undefined, "Panel error"));
  node.appendChild(el("div", undefined, message));
  return node;
}

function bucketLabel(bucket: Bucket): string {
  return bucket.key.map(String).join(" / ");
}

function renderBars(payload: PanelPayload, callbacks: PanelCallbacks): HTMLElement {
  const buckets = payload.buckets ?? [];
  if (!buckets.length) return emptyState();
  const wrap = el("div", "bars");
  const max = Math.max(...buckets.map((b) => b.count));
  for (const bucket of buckets) {
    const row = el("div", "bar-row");
    row.appendChild(el("span", "bar-label", bucketLabel(bucket)));
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.width = max > 0 ? `${(bucket.count / max) * 100}%` : "0";
    track.appendChild(fill);
    row.appendChild(track);
    const valueText =
      bucket.metric !== undefined && bucket.metric !== null
        ? `${bucket.count} (${bucket.metric})`
        : String(bucket.count);
    const value = el("span", "bar-value", valueText);
    value.dataset.count = String(bucket.count);
    row.appendChild(value);
    if (callbacks.onBucketClick) {
      row.classList.add("clickable");
      row.addEventListener("click", () => callbacks.onBucketClick!(bucket));
    }
    wrap.appendChild(row);
  }
  return wrap;
}

function renderStat(payload: PanelPayload): HTMLElement {
  const value = payload.stat ?? payload.total;
  const node = el("div", "stat");
  const figure = el("div", "stat-value", String(value));
  figure.dataset.count = String(value);
  node.appendChild(figure);
  return node;
}

function renderTable(payload: PanelPayload, callbacks: PanelCallbacks): HTMLElement {
  if (payload.buckets) {
    // grouped table: key columns + count (+ metric)
    if (!payload.buckets.length) return emptyState();
    const table = el("table", "data-table");
    const head = el("tr");
    head.appendChild(el("th", undefined, "group"));
    head.appendChild(el("th", undefined, "count"));
    const hasMetric = payload.buckets.some((b) => b.metric !== undefined && b.metric !== null);
    if (hasMetric) head.appendChild(el("th", undefined, "value"));
    table.appendChild(head);
    for (const bucket of payload.buckets) {
      const tr = el("tr");
      tr.appendChild(el("td", undefined, bucketLabel(bucket)));
      const count = el("td", undefined, String(bucket.count));
      count.dataset.count = String(bucket.count);
      tr.appendChild(count);
      if (hasMetric) {
        tr.appendChild(el("td", undefined, bucket.metric == null ? "" : String(bucket.metric)));
      }
      table.appendChild(tr);
    }
    return table;
  }
  const rows = payload.rows ?? [];
  if (!rows.length) return emptyState();
  const columns = payload.columns.length
    ? payload.columns.filter((c) => rows.some((r) => c in r))
    : Object.keys(rows[0]).filter((k) => !k.startsWith("_"));
  const table = el("table", "data-table");
  const head = el("tr");
  for (const column of columns) head.appendChild(el("th", undefined, column));
  table.appendChild(head);
  for (const row of rows) {
    const tr = el("tr");
    tr.dataset.key = String(row["_key"] ?? "");
    for (const column of columns) {
      const value = row[column];
      const td = el("td");
      if (column === "snippet" && typeof value === "string") {
        // provenance affordance: snippet shown verbatim, expandable
        const details = el("details", "snippet");
        details.appendChild(el("summary", undefined, "source text"));
        details.appendChild(el("span", "snippet-text", value));
        td.appendChild(details);
      } else {
        td.textContent = value == null ? "" : Array.isArray(value) ? value.join(", ") : String(value);
      }
      tr.appendChild(td);
    }
    if (callbacks.onRowClick) {
      tr.classList.add("clickable");
      tr.addEventListener("click", () => callbacks.onRowClick!(row));
    }
    table.appendChild(tr);
  }
  return table;
}

function renderLine(payload: PanelPayload, callbacks: PanelCallbacks): HTMLElement {
  // time-ordered buckets as an SVG polyline; rows fall back to a table
  if (!payload.buckets) return renderTable(payload, callbacks);
  const buckets = payload.buckets;
  if (!buckets.length) return emptyState();
  const wrap = el("div", "line-chart");
  const svgNS = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNS, "svg");
  svg.setAttribute("viewBox", "0 0 400 120");
  const max = Math.max(...buckets.map((b) => b.count));
  const step = buckets.length > 1 ? 380 / (buckets.length - 1) : 0;
  const points = buckets.map((bucket, i) => {
    const x = 10 + i * step;
    const y = max > 0 ? 110 - (bucket.count / max) * 100 : 110;
    return `${x},${y}`;
  });
  const polyline = document.createElementNS(svgNS, "polyline");
  polyline.setAttribute("points", points.join(" "));
  polyline.setAttribute("fill", "none");
  polyline.setAttribute("stroke", "currentColor");
  svg.appendChild(polyline);
  wrap.appendChild(svg);
  const legend = el("div", "line-legend");
  for (const bucket of buckets) {
    const item = el("span", "line-point", `${bucketLabel(bucket)}: ${bucket.count}`);
    item.dataset.count = String(bucket.count);
    legend.appendChild(item);
  }
  wrap.appendChild(legend);
  return wrap;
}

function renderMap(payload: PanelPayload, callbacks: PanelCallbacks): HTMLElement {
  const buckets = payload.buckets ?? [];
  if (!buckets.length) return emptyState();
  const byBorough = new Map(buckets.map((b) => [String(b.key[0]), b]));
  const max = Math.max(...buckets.map((b) => b.count));
  const grid = el("div", "borough-map");
  for (const borough of BOROUGH_ORDER) {
    const bucket = byBorough.get(borough);
    const cell = el("div", "borough-cell");
    const intensity = bucket && max > 0 ? 0.15 + (bucket.count / max) * 0.85 : 0.05;
    cell.style.opacity = String(intensity);
    cell.appendChild(el("div", "borough-name", borough));
    const count = el("div", "borough-count", bucket ? String(bucket.count) : "0");
    if (bucket) count.dataset.count = String(bucket.count);
    cell.appendChild(count);
    if (bucket && callbacks.onBucketClick) {
      cell.classList.add("clickable");
      cell.addEventListener("click", () => callbacks.onBucketClick!(bucket));
    }
    grid.appendChild(cell);
  }
  return grid;
}

export function renderPanel(
  container: HTMLElement,
  payload: PanelPayload,
  callbacks: PanelCallbacks = {},
): void {
  container.textContent = "";
  const card = el("section", "panel");
  card.dataset.panel = payload.panel;
  card.appendChild(el("h3", "panel-title", payload.title));
  try {
    let body: HTMLElement;
    switch (payload.viz) {
      case "stat":
        body = renderStat(payload);
        break;
      case "bar":
      case "histogram":
        body = renderBars(payload, callbacks);
        break;
      case "table":
        body = renderTable(payload, callbacks);
        break;
      case "line":
        body = renderLine(payload, callbacks);
        break;
      case "map_choropleth_by_borough":
        body = renderMap(payload, callbacks);
        break;
      default:
        body = errorPanel(`unsupported visualisation ${String(payload.viz)}`);
    }
    card.appendChild(body);
  } catch (error) {
    card.appendChild(errorPanel(error instanceof Error ? error.message : String(error)));
  }
  container.appendChild(card);
}

export function renderBanner(container: HTMLElement, title: string, description: string): void {
  container.textContent = "";
  container.appendChild(el("h2", "dashboard-title", title));
  container.appendChild(el("p", "dashboard-banner", description));
}

export function renderChart(container: HTMLElement, bundle: ChartBundle): void {
  container.textContent = "";
  const wrap = el("div", "chart-bundle");
  const patient = el("dl", "patient-block");
  for (const [field, value] of Object.entries(bundle.patient)) {
    if (value == null || typeof value === "object") continue;
    patient.appendChild(el("dt", undefined, field));
    patient.appendChild(el("dd", undefined, String(value)));
  }
  wrap.appendChild(patient);
  if (bundle.deep_link) {
    const anchor = el("a", "deep-link", "Open in the source record system");
    anchor.setAttribute("href", bundle.deep_link);
    wrap.appendChild(anchor);
  }

  const checklist = el("ul", "checklist");
  for (const [measure, entry] of Object.entries(bundle.checklist.measures)) {
    checklist.appendChild(
      el("li", `check-${entry.status}`, `${measure}: ${entry.status}` +
        (entry.last_date ? ` (${entry.last_date})` : "")),
    );
  }
  wrap.appendChild(checklist);

  const meds = el("table", "data-table medication-summary");
  const head = el("tr");
  for (const column of ["drug", "class", "status"]) head.appendChild(el("th", undefined, column));
  meds.appendChild(head);
  for (const item of bundle.medication_summary.items) {
    const tr = el("tr");
    tr.appendChild(el("td", undefined, item.canonical));
    tr.appendChild(el("td", undefined, item.drug_class));
    tr.appendChild(el("td", undefined, item.tag));
    meds.appendChild(tr);
  }
  wrap.appendChild(meds);

  const timeline = el("ol", "medication-timeline");
  for (const entry of bundle.catalogues["medication"] ?? []) {
    const item = el("li", "timeline-entry",
      `${entry.when} ${String(entry.detail["canonical"] ?? entry.detail["drug_name"] ?? "")}`);
    item.dataset.when = entry.when;
    if (entry.snippet) {
      const details = el("details", "snippet");
      details.appendChild(el("summary", undefined, "source text"));
      details.appendChild(el("span", "snippet-text", entry.snippet));
      item.appendChild(details);
    }
    timeline.appendChild(item);
  }
  wrap.appendChild(timeline);
  container.appendChild(wrap);
}
