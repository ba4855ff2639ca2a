/** Summary-CSV schema shared with the simulator's sweep output. */

export const REQUIRED_COLUMNS = [
  "family",
  "model",
  "K",
  "sweep_value",
  "mean_se",
  "stderr_se",
  "n",
  "conv_rate",
] as const;

export interface SummaryRow {
  family: string;
  model: string;
  k: number;
  sweepValue: number;
  meanSe: number;
  stderrSe: number;
  n: number;
  convRate: number;
}

/** Legend label of the curve a row belongs to. */
export function curveLabel(row: Pick<SummaryRow, "model" | "k">): string {
  return row.model === "piecewise" ? `piecewise K=${row.k}` : row.model;
}
