import { mkdtempSync, readFileSync, rmSync, writeFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { run } from "../src/cli.js";
import { parseSweepCsv } from "../src/schema.js";
import { toCsv, syntheticSweep, HEADER } from "./helpers.js";

let dir: string;

beforeEach(() => {
  dir = mkdtempSync(join(tmpdir(), "seqsel-plot-"));
});

afterEach(() => {
  rmSync(dir, { recursive: true, force: true });
});

function writeSweep(name = "sweep.csv"): string {
  const path = join(dir, name);
  writeFileSync(path, toCsv(syntheticSweep(), ["# master_seed = 1"]));
  return path;
}

describe("cli run", () => {
  it("writes an svg and a sidecar next to it", () => {
    const csv = writeSweep();
    const out = join(dir, "fig.svg");
    const res = run(["--in", csv, "--out", out]);
    expect(res.svgPath).toBe(out);
    expect(res.sidecarPath).toBe(join(dir, "fig.json"));
    expect(res.seriesCount).toBe(4);
    expect(readFileSync(out, "utf8")).toContain("<svg");
    const side = JSON.parse(readFileSync(res.sidecarPath, "utf8"));
    expect(side.xAxis).toBe("eta");
    expect(side.series.length).toBe(4);
  });

  it("sidecar points round-trip every input row", () => {
    const csv = writeSweep();
    const out = join(dir, "fig.svg");
    const res = run(["--in", csv, "--out", out]);
    const side = JSON.parse(readFileSync(res.sidecarPath, "utf8"));
    const flat = side.series.flatMap((s: { points: unknown[] }) => s.points);
    const parsed = parseSweepCsv(readFileSync(csv, "utf8"));
    expect(flat.length).toBe(parsed.rows.length);
    for (const r of parsed.rows) {
      expect(flat).toContainEqual(r);
    }
  });

  it("never mutates the input csv", () => {
    const csv = writeSweep();
    const before = readFileSync(csv);
    run(["--in", csv, "--out", join(dir, "fig.svg")]);
    expect(readFileSync(csv).equals(before)).toBe(true);
  });

  it("accepts axis and field choices", () => {
    const csv = writeSweep();
    const out = join(dir, "p.svg");
    const res = run(["--in", csv, "--out", out, "--x", "power", "--y", "unbiased"]);
    const side = JSON.parse(readFileSync(res.sidecarPath, "utf8"));
    expect(side.xAxis).toBe("power_dBm");
    expect(side.yField).toBe("air_unbiased");
    expect(readFileSync(out, "utf8")).toContain("launch power [dBm]");
  });

  it("rejects an empty csv without writing anything", () => {
    const csv = join(dir, "empty.csv");
    writeFileSync(csv, "");
    const out = join(dir, "fig.svg");
    expect(() => run(["--in", csv, "--out", out])).toThrow(/no header/);
    expect(existsSync(out)).toBe(false);
    expect(existsSync(join(dir, "fig.json"))).toBe(false);
  });

  it("rejects a header-only csv without writing anything", () => {
    const csv = join(dir, "hdr.csv");
    writeFileSync(csv, HEADER + "\n");
    const out = join(dir, "fig.svg");
    expect(() => run(["--in", csv, "--out", out])).toThrow(/no data rows/);
    expect(existsSync(out)).toBe(false);
  });

  it("requires --in and --out", () => {
    expect(() => run([])).toThrow(/--in/);
    expect(() => run(["--in", "x.csv"])).toThrow(/--out/);
  });

  it("rejects unknown axis or field names", () => {
    const csv = writeSweep();
    const out = join(dir, "fig.svg");
    expect(() => run(["--in", csv, "--out", out, "--x", "snr"])).toThrow(/--x/);
    expect(() => run(["--in", csv, "--out", out, "--y", "evm"])).toThrow(/--y/);
  });

  it("honours an explicit sidecar path", () => {
    const csv = writeSweep();
    const out = join(dir, "fig.svg");
    const side = join(dir, "numbers.json");
    const res = run(["--in", csv, "--out", out, "--sidecar", side]);
    expect(res.sidecarPath).toBe(side);
    expect(existsSync(side)).toBe(true);
  });
});
