import { describe, expect, it } from "vitest";

import { parseSummary } from "../src/csv.js";

const HEADER = "family,model,K,sweep_value,mean_se,stderr_se,n,conv_rate";

describe("parseSummary", () => {
  it("parses well-formed rows", () => {
    const rows = parseSummary(
      `${HEADER}\nse_vs_tau,near,0,0.1,12.5,0.2,20,1.0\nse_vs_tau,piecewise,8,0.1,11.0,0.3,20,0.95\n`,
    );
    expect(rows).toHaveLength(2);
    expect(rows[0]).toEqual({
      family: "se_vs_tau",
      model: "near",
      k: 0,
      sweepValue: 0.1,
      meanSe: 12.5,
      stderrSe: 0.2,
      n: 20,
      convRate: 1.0,
    });
  });

  it("rejects an empty summary", () => {
    expect(() => parseSummary(`${HEADER}\n`)).toThrow(/no rows/);
  });

  it("names the missing column", () => {
    const header = "family,model,K,sweep_value,mean_se,n,conv_rate";
    expect(() => parseSummary(`${header}\nse_vs_tau,near,0,0.1,12.5,20,1.0\n`)).toThrow(
      /missing column stderr_se/,
    );
  });

  it("rejects non-numeric cells", () => {
    expect(() =>
      parseSummary(`${HEADER}\nse_vs_tau,near,0,0.1,not_a_number,0.2,20,1.0\n`),
    ).toThrow(/mean_se/);
  });
});
