import { parseTsv } from "./tsv.js";
import { el, svgDocument, text } from "./svg.js";

export interface Edge {
  source: string;
  target: string;
  weight: number;
}

export function readEdges(tsvText: string): Edge[] {
  return parseTsv(tsvText).map((row) => ({
    source: row.source,
    target: row.target,
    weight: Number(row.weight),
  }));
}

export interface NetworkOptions {
  size?: number;
  nodeRadius?: number;
}

// Circular-layout network diagram of the thresholded similarity edges.
// One line per edge list row; stroke width scales with the weight.
export function renderNetwork(tsvText: string, opts: NetworkOptions = {}): string {
  const edges = readEdges(tsvText);
  const size = opts.size ?? 500;
  const nodeR = opts.nodeRadius ?? 14;
  const center = size / 2;
  const radius = center - nodeR - 30;

  const nodes: string[] = [];
  for (const e of edges) {
    if (!nodes.includes(e.source)) nodes.push(e.source);
    if (!nodes.includes(e.target)) nodes.push(e.target);
  }
  const pos = new Map<string, { x: number; y: number }>();
  nodes.forEach((name, i) => {
    const angle = (2 * Math.PI * i) / Math.max(nodes.length, 1) - Math.PI / 2;
    pos.set(name, { x: center + radius * Math.cos(angle), y: center + radius * Math.sin(angle) });
  });

  const parts: string[] = [];
  const maxW = edges.reduce((m, e) => Math.max(m, e.weight), 0) || 1;
  for (const e of edges) {
    const a = pos.get(e.source)!;
    const b = pos.get(e.target)!;
    parts.push(
      el("line", {
        class: "edge",
        "data-source": e.source,
        "data-target": e.target,
        x1: a.x.toFixed(2),
        y1: a.y.toFixed(2),
        x2: b.x.toFixed(2),
        y2: b.y.toFixed(2),
        stroke: "#888",
        "stroke-width": (0.5 + 3 * (e.weight / maxW)).toFixed(2),
      }),
    );
  }
  for (const name of nodes) {
    const p = pos.get(name)!;
    parts.push(
      el("circle", { class: "node", "data-node": name, cx: p.x.toFixed(2), cy: p.y.toFixed(2), r: nodeR, fill: "#4c78a8" }),
    );
    parts.push(
      text(name, { x: p.x.toFixed(2), y: (p.y + nodeR + 12).toFixed(2), "font-size": 10, "text-anchor": "middle" }),
    );
  }
  return svgDocument(size, size, parts);
}
