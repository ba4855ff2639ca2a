import { writeFileSync } from "node:fs";

import { loadSummary } from "./csv.js";
import { familySpec, Y_LABEL } from "./families.js";
import { curveLabel, SummaryRow } from "./schema.js";
import { Curve, plot } from "./svg.js";

export interface FigureSpec {
  family: string;
  input: string;
  output: string;
}

/** Group one family's rows into sorted (model, K) curves. */
export function toCurves(rows: SummaryRow[], family: string): Curve[] {
  const mine = rows.filter((r) => r.family === family);
  if (mine.length === 0) {
    throw new Error(`no rows for family ${JSON.stringify(family)}`);
  }
  const groups = new Map<string, SummaryRow[]>();
  for (const row of mine) {
    const label = curveLabel(row);
    const cur = groups.get(label) ?? [];
    cur.push(row);
    groups.set(label, cur);
  }
  return [...groups.entries()]
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([label, rs]) => ({
      label,
      points: rs
        .slice()
        .sort((a, b) => a.sweepValue - b.sweepValue)
        .map((r) => ({ x: r.sweepValue, y: r.meanSe, err: r.stderrSe })),
    }));
}

export function renderSvg(rows: SummaryRow[], family: string): string {
  const spec = familySpec(family);
  return plot(toCurves(rows, family), spec.title, spec.xLabel, Y_LABEL);
}

/** Read the summary CSV, render one family, write the SVG file. */
export function renderFigure(spec: FigureSpec): void {
  const rows = loadSummary(spec.input);
  writeFileSync(spec.output, renderSvg(rows, spec.family), "utf-8");
}
