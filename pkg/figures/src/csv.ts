import { readFileSync } from "node:fs";
import Papa from "papaparse";

import { REQUIRED_COLUMNS, SummaryRow } from "./schema.js";

function toNumber(field: string, value: string): number {
  const v = Number(value);
  if (!Number.isFinite(v)) {
    throw new Error(`bad numeric value for ${field}: ${JSON.stringify(value)}`);
  }
  return v;
}

/** Parse a sweep summary CSV, checking the schema column by column. */
export function parseSummary(text: string): SummaryRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`malformed CSV: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of REQUIRED_COLUMNS) {
    if (!fields.includes(col)) {
      throw new Error(`schema mismatch: missing column ${col}`);
    }
  }
  if (parsed.data.length === 0) {
    throw new Error("no rows");
  }
  return parsed.data.map((r) => ({
    family: r.family,
    model: r.model,
    k: toNumber("K", r.K),
    sweepValue: toNumber("sweep_value", r.sweep_value),
    meanSe: toNumber("mean_se", r.mean_se),
    stderrSe: toNumber("stderr_se", r.stderr_se),
    n: toNumber("n", r.n),
    convRate: toNumber("conv_rate", r.conv_rate),
  }));
}

export function loadSummary(path: string): SummaryRow[] {
  return parseSummary(readFileSync(path, "utf-8"));
}
