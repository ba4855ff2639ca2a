import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseSummary } from "../src/csv.js";
import { FAMILIES } from "../src/families.js";
import { renderSvg, toCurves } from "../src/render.js";

const HEADER = "family,model,K,sweep_value,mean_se,stderr_se,n,conv_rate";
const FIXTURE = join(__dirname, "fixtures", "se_vs_tau_small.csv");

function fixtureRows() {
  return parseSummary(readFileSync(FIXTURE, "utf-8"));
}

describe("toCurves", () => {
  it("groups by model and K with sorted legend keys", () => {
    const curves = toCurves(fixtureRows(), "se_vs_tau");
    expect(curves.map((c) => c.label)).toEqual([
      "far",
      "near",
      "piecewise K=2",
      "piecewise K=8",
    ]);
    for (const c of curves) {
      const xs = c.points.map((p) => p.x);
      expect(xs).toEqual([...xs].sort((a, b) => a - b));
    }
  });

  it("errors when the family has no rows", () => {
    expect(() => toCurves(fixtureRows(), "se_vs_snr")).toThrow(/no rows for family/);
  });
});

describe("renderSvg", () => {
  it("renders every curve into the legend", () => {
    const svg = renderSvg(fixtureRows(), "se_vs_tau");
    for (const label of ["far", "near", "piecewise K=2", "piecewise K=8"]) {
      expect(svg).toContain(label);
    }
    expect(svg).toContain("<svg");
    expect(svg).toContain("normalized error level tau");
  });

  it("is byte-stable across repeated renders", () => {
    const a = renderSvg(fixtureRows(), "se_vs_tau");
    const b = renderSvg(fixtureRows(), "se_vs_tau");
    expect(a).toEqual(b);
  });

  it("handles a single sweep point without crashing", () => {
    const rows = parseSummary(
      `${HEADER}\nse_vs_snr,near,0,10.0,12.5,0.2,20,1.0\n`,
    );
    const svg = renderSvg(rows, "se_vs_snr");
    expect(svg).toContain("near");
  });

  it("rejects unknown families", () => {
    expect(() => renderSvg(fixtureRows(), "se_vs_bogus")).toThrow(/unknown family/);
  });

  it("knows all five families", () => {
    expect(Object.keys(FAMILIES).sort()).toEqual([
      "convergence",
      "se_vs_nris",
      "se_vs_ntx",
      "se_vs_snr",
      "se_vs_tau",
    ]);
  });
});
