export interface Attrs {
  [key: string]: string | number;
}

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const body = children.join("");
  return body
    ? `<${tag}${attrString(attrs)}>${body}</${tag}>`
    : `<${tag}${attrString(attrs)}/>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${attrString(attrs)}>${escapeText(content)}</text>`;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function svgDocument(width: number, height: number, children: string[]): string {
  return el(
    "svg",
    { xmlns: "http://www.w3.org/2000/svg", width, height, viewBox: `0 0 ${width} ${height}` },
    children,
  );
}

// Ten distinguishable category colors, index-aligned with the series order.
export const PALETTE = [
  "#e6a117",
  "#4c78a8",
  "#e45756",
  "#72b7b2",
  "#54a24b",
  "#b279a2",
  "#9d755d",
  "#f58518",
  "#bab0ac",
  "#439894",
];
