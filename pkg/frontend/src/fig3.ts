import { parseWideTsv } from "./tsv.js";
import { PALETTE, el, svgDocument, text } from "./svg.js";

export interface StackedOptions {
  width?: number;
  height?: number;
  margin?: number;
}

// Stacked annual share chart: one column per year, one segment per series.
// Shares are fractions of 1, so every non-empty year's stack spans the full
// plot height.
export function renderStackedShares(tsvText: string, opts: StackedOptions = {}): string {
  const { columns, rows } = parseWideTsv(tsvText);
  const series = columns.slice(1);
  const width = opts.width ?? 800;
  const height = opts.height ?? 400;
  const margin = opts.margin ?? 40;
  const plotW = width - 2 * margin;
  const plotH = height - 2 * margin;
  const colW = rows.length ? plotW / rows.length : plotW;

  const parts: string[] = [];
  rows.forEach((cells, idx) => {
    const year = cells[0];
    const x = margin + idx * colW;
    let y = margin + plotH;
    series.forEach((name, s) => {
      const share = Number(cells[s + 1]);
      if (!(share > 0)) return;
      const h = share * plotH;
      y -= h;
      parts.push(
        el("rect", {
          class: "seg",
          "data-year": year,
          "data-series": name,
          x: x.toFixed(2),
          y: y.toFixed(2),
          width: Math.max(colW - 1, 0.5).toFixed(2),
          height: h.toFixed(2),
          fill: PALETTE[s % PALETTE.length],
        }),
      );
    });
  });

  // axis lines and sparse year labels
  parts.push(
    el("line", {
      class: "axis",
      x1: margin,
      y1: margin + plotH,
      x2: margin + plotW,
      y2: margin + plotH,
      stroke: "#000",
    }),
  );
  parts.push(
    el("line", { class: "axis", x1: margin, y1: margin, x2: margin, y2: margin + plotH, stroke: "#000" }),
  );
  const step = Math.max(1, Math.floor(rows.length / 8));
  rows.forEach((cells, idx) => {
    if (idx % step !== 0) return;
    parts.push(
      text(cells[0], {
        x: (margin + idx * colW).toFixed(2),
        y: margin + plotH + 16,
        "font-size": 10,
        "text-anchor": "middle",
      }),
    );
  });
  series.forEach((name, s) => {
    const lx = margin + 6;
    const ly = margin + 6 + s * 14;
    parts.push(el("rect", { class: "legend", x: lx, y: ly, width: 10, height: 10, fill: PALETTE[s % PALETTE.length] }));
    parts.push(text(name, { x: lx + 14, y: ly + 9, "font-size": 10 }));
  });
  return svgDocument(width, height, parts);
}
