/** Parsing of the sweep CSV contract written by the experiment runner. */

export const CSV_COLUMNS = [
  "power_dBm",
  "eta",
  "equalization",
  "air_unbiased",
  "penalty",
  "air_bound",
  "mc_stderr",
  "n_symbols",
  "seed",
] as const;

export type ColumnName = (typeof CSV_COLUMNS)[number];

export interface SweepRow {
  power_dBm: number;
  eta: number;
  equalization: string;
  air_unbiased: number;
  penalty: number;
  air_bound: number;
  mc_stderr: number;
  n_symbols: number;
  seed: number;
}

export interface SweepFile {
  /** `# key = value` header echo, verbatim keys. */
  config: Record<string, string>;
  rows: SweepRow[];
}

export class SchemaError extends Error {}

const NUMERIC: ReadonlySet<ColumnName> = new Set(
  CSV_COLUMNS.filter((c) => c !== "equalization"),
);

/**
 * Parse a sweep CSV. Comment lines (`# ...`) may only precede the header
 * and carry the config echo; the header must contain every contract
 * column. Values in numeric columns parse with Number(), so the runner's
 * `nan` markers come through as NaN.
 */
export function parseSweepCsv(text: string): SweepFile {
  const lines = text.split(/\r?\n/);
  const config: Record<string, string> = {};
  let i = 0;
  for (; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (line === "") continue;
    if (!line.startsWith("#")) break;
    const m = /^#\s*([^=]+?)\s*=\s*(.*)$/.exec(line);
    if (m) config[m[1] as string] = m[2] as string;
  }
  if (i >= lines.length) {
    throw new SchemaError("empty CSV: no header line");
  }
  const header = (lines[i] ?? "").split(",").map((h) => h.trim());
  for (const col of CSV_COLUMNS) {
    if (!header.includes(col)) {
      throw new SchemaError(`CSV is missing column "${col}"`);
    }
  }
  const at = new Map<ColumnName, number>(
    CSV_COLUMNS.map((c) => [c, header.indexOf(c)]),
  );
  const rows: SweepRow[] = [];
  for (i += 1; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(
        `line ${i + 1}: expected ${header.length} fields, found ${parts.length}`,
      );
    }
    const row = {} as Record<string, number | string>;
    for (const col of CSV_COLUMNS) {
      const raw = (parts[at.get(col)!] ?? "").trim();
      if (NUMERIC.has(col)) {
        const v = Number(raw);
        if (raw === "" || (Number.isNaN(v) && raw.toLowerCase() !== "nan")) {
          throw new SchemaError(`line ${i + 1}: bad number "${raw}" in "${col}"`);
        }
        row[col] = v;
      } else {
        row[col] = raw;
      }
    }
    rows.push(row as unknown as SweepRow);
  }
  return { config, rows };
}
