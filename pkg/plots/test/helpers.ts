import { CSV_COLUMNS, type SweepRow } from "../src/schema.js";

export const HEADER = CSV_COLUMNS.join(",");

export function row(over: Partial<SweepRow> = {}): SweepRow {
  return {
    power_dBm: 1,
    eta: 1,
    equalization: "cdc",
    air_unbiased: 8.5,
    penalty: 0,
    air_bound: 8.5,
    mc_stderr: 0.01,
    n_symbols: 65536,
    seed: 7,
    ...over,
  };
}

export function toCsv(rows: SweepRow[], comments: string[] = []): string {
  const lines = [...comments, HEADER];
  for (const r of rows) {
    lines.push(CSV_COLUMNS.map((c) => String(r[c])).join(","));
  }
  return lines.join("\n") + "\n";
}

/** A 2-power x 2-equalization x 3-eta synthetic sweep, descending eta. */
export function syntheticSweep(): SweepRow[] {
  const rows: SweepRow[] = [];
  for (const power of [0, 2]) {
    for (const eq of ["cdc", "dbp"]) {
      for (const eta of [1, 0.1, 0.01]) {
        const air = 8 + power * 0.1 + (eq === "dbp" ? 0.3 : 0) - Math.log10(eta) * 0.05;
        const penalty = Math.log2(eta) / (2 * 64);
        rows.push(
          row({
            power_dBm: power,
            eta,
            equalization: eq,
            air_unbiased: air,
            penalty,
            air_bound: air + penalty,
            mc_stderr: 0.02,
          }),
        );
      }
    }
  }
  return rows;
}
