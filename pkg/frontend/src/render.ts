import fs from "fs";
import path from "path";

import { renderStackedShares } from "./fig3.js";
import { renderSharePanels } from "./fig5.js";
import { renderNetwork } from "./fig6.js";

// Usage: render.ts <engine-output-dir> <figure-dir>
// Reads the exported flat files and writes one SVG per figure.
export function renderAll(outDir: string, figDir: string): string[] {
  fs.mkdirSync(figDir, { recursive: true });
  const written: string[] = [];

  const fig3Path = path.join(outDir, "metrics", "fig3.tsv");
  const fig3 = path.join(figDir, "fig3.svg");
  fs.writeFileSync(fig3, renderStackedShares(fs.readFileSync(fig3Path, "utf-8")));
  written.push(fig3);

  const fig5Path = path.join(outDir, "metrics", "fig5.tsv");
  const fig5 = path.join(figDir, "fig5.svg");
  fs.writeFileSync(fig5, renderSharePanels(fs.readFileSync(fig5Path, "utf-8")));
  written.push(fig5);

  const networkDir = path.join(outDir, "network");
  for (const name of fs.readdirSync(networkDir).sort()) {
    const match = /^fig6([ab])_(.+)\.tsv$/.exec(name);
    if (!match) continue;
    const out = path.join(figDir, `fig6${match[1]}_${match[2]}.svg`);
    fs.writeFileSync(out, renderNetwork(fs.readFileSync(path.join(networkDir, name), "utf-8")));
    written.push(out);
  }
  return written;
}

const invokedDirectly = process.argv[1] && path.resolve(process.argv[1]) === new URL(import.meta.url).pathname;
if (invokedDirectly) {
  const [outDir, figDir] = process.argv.slice(2);
  if (!outDir || !figDir) {
    console.error("usage: render.ts <engine-output-dir> <figure-dir>");
    process.exit(1);
  }
  for (const file of renderAll(outDir, figDir)) console.log(file);
}
