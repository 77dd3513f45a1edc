import { parseTsv } from "./tsv.js";
import { el, svgDocument, text } from "./svg.js";

export interface PanelOptions {
  panelWidth?: number;
  panelHeight?: number;
  columns?: number;
  margin?: number;
}

// Technologies whose science share moves well above the rest; their panels
// get an elevated reference axis so the excursion is readable.
export const ELEVATED = new Set(["PV", "Fusion", "Biofuels", "Waste"]);
export const ELEVATED_LEVEL = 0.25;

interface Series {
  tech: string;
  points: { window: string; value: number; flagged: boolean }[];
}

export function readShareSeries(tsvText: string): Series[] {
  const byTech = new Map<string, Series>();
  for (const row of parseTsv(tsvText)) {
    const tech = row.series.split(":", 2)[1] ?? row.series;
    let s = byTech.get(tech);
    if (!s) {
      s = { tech, points: [] };
      byTech.set(tech, s);
    }
    s.points.push({ window: row.window, value: Number(row.value), flagged: row.flagged === "1" });
  }
  return [...byTech.values()];
}

// Small-multiple panels of science share per technology and window.
export function renderSharePanels(tsvText: string, opts: PanelOptions = {}): string {
  const series = readShareSeries(tsvText);
  const panelW = opts.panelWidth ?? 180;
  const panelH = opts.panelHeight ?? 120;
  const cols = opts.columns ?? 5;
  const margin = opts.margin ?? 24;
  const rows = Math.ceil(series.length / cols);
  const width = cols * panelW + 2 * margin;
  const height = rows * panelH + 2 * margin;

  const parts: string[] = [];
  series.forEach((s, idx) => {
    const px = margin + (idx % cols) * panelW;
    const py = margin + Math.floor(idx / cols) * panelH;
    const innerW = panelW - 30;
    const innerH = panelH - 34;
    const x0 = px + 24;
    const y0 = py + 20;
    const yOf = (v: number) => y0 + innerH - v * innerH;

    const panel: string[] = [];
    panel.push(text(s.tech, { x: px + panelW / 2, y: py + 12, "font-size": 11, "text-anchor": "middle" }));
    panel.push(
      el("rect", { class: "frame", x: x0, y: y0, width: innerW, height: innerH, fill: "none", stroke: "#999" }),
    );
    const baseline = ELEVATED.has(s.tech) ? ELEVATED_LEVEL : 0;
    panel.push(
      el("line", {
        class: "baseline",
        "data-level": baseline,
        x1: x0,
        y1: yOf(baseline).toFixed(2),
        x2: x0 + innerW,
        y2: yOf(baseline).toFixed(2),
        stroke: "#000",
      }),
    );
    const n = s.points.length;
    const step = n > 1 ? innerW / (n - 1) : 0;
    const coords = s.points.map((p, i) => `${(x0 + i * step).toFixed(2)},${yOf(p.value).toFixed(2)}`);
    if (coords.length > 1) {
      panel.push(el("polyline", { class: "series", points: coords.join(" "), fill: "none", stroke: "#4c78a8" }));
    }
    s.points.forEach((p, i) => {
      panel.push(
        el("circle", {
          class: p.flagged ? "point flagged" : "point",
          cx: (x0 + i * step).toFixed(2),
          cy: yOf(p.value).toFixed(2),
          r: 2,
          fill: p.flagged ? "#fff" : "#4c78a8",
          stroke: "#4c78a8",
        }),
      );
    });
    parts.push(el("g", { class: "panel", "data-tech": s.tech }, panel));
  });
  return svgDocument(width, height, parts);
}
