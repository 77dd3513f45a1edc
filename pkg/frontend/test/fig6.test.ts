import fs from "fs";
import os from "os";
import path from "path";
import { describe, expect, it } from "vitest";

import { readEdges, renderNetwork } from "../src/fig6.js";
import { renderAll } from "../src/render.js";

const fixtures = path.join(__dirname, "fixtures");

function load(name: string): string {
  return fs.readFileSync(path.join(fixtures, "network", name), "utf-8");
}

describe("similarity network diagram", () => {
  it("draws exactly one line per edge list row", () => {
    for (const name of ["fig6a_1991-2005.tsv", "fig6b_1991-2005.tsv"]) {
      const tsv = load(name);
      const svg = renderNetwork(tsv);
      const lines = (svg.match(/class="edge"/g) ?? []).length;
      expect(lines).toBe(readEdges(tsv).length);
    }
  });

  it("draws a node for every endpoint", () => {
    const tsv = load("fig6a_1991-2005.tsv");
    const svg = renderNetwork(tsv);
    const endpoints = new Set(readEdges(tsv).flatMap((e) => [e.source, e.target]));
    expect((svg.match(/class="node"/g) ?? []).length).toBe(endpoints.size);
    for (const name of endpoints) {
      expect(svg).toContain(`data-node="${name}"`);
    }
  });
});

describe("renderAll", () => {
  it("writes every figure from an engine output directory", () => {
    const figDir = fs.mkdtempSync(path.join(os.tmpdir(), "figs-"));
    const written = renderAll(fixtures, figDir);
    expect(written.length).toBe(4); // fig3, fig5, fig6a, fig6b
    for (const file of written) {
      expect(fs.readFileSync(file, "utf-8").startsWith("<svg")).toBe(true);
    }
  });
});
