import { describe, expect, it } from "vitest";

import { buildFigure, sidecarData } from "../src/figure.js";
import { SchemaError } from "../src/schema.js";
import { row, syntheticSweep } from "./helpers.js";

const spec = { xAxis: "eta", yField: "air_bound" } as const;

describe("buildFigure", () => {
  it("groups one series per power and equalization", () => {
    const fig = buildFigure(syntheticSweep(), spec);
    expect(fig.series.map((s) => s.label)).toEqual([
      "0 dBm CDC",
      "0 dBm DBP",
      "2 dBm CDC",
      "2 dBm DBP",
    ]);
    expect(fig.series.map((s) => s.dashed)).toEqual([false, true, false, true]);
    expect(fig.xLog).toBe(true);
  });

  it("keeps points in input order inside each series", () => {
    const fig = buildFigure(syntheticSweep(), spec);
    for (const s of fig.series) {
      expect(s.x).toEqual([1, 0.1, 0.01]);
      expect(s.points.map((p) => p.eta)).toEqual([1, 0.1, 0.01]);
    }
  });

  it("rejects eta <= 0 on the log axis", () => {
    const rows = [row(), row({ eta: 0 })];
    expect(() => buildFigure(rows, spec)).toThrow(/eta > 0/);
    expect(() => buildFigure(rows, spec)).toThrow(SchemaError);
  });

  it("allows non-positive x on the linear power axis", () => {
    const rows = [row({ power_dBm: -3 }), row({ power_dBm: 0 })];
    const fig = buildFigure(rows, { xAxis: "power_dBm", yField: "air_bound" });
    expect(fig.xLog).toBe(false);
    expect(fig.series.length).toBe(2);
  });

  it("rejects an empty row list", () => {
    expect(() => buildFigure([], spec)).toThrow(/no data rows/);
  });

  it("sidecar carries every CSV column per plotted point", () => {
    const rows = syntheticSweep();
    const fig = buildFigure(rows, spec);
    const data = sidecarData(fig) as {
      series: { points: (typeof rows)[number][] }[];
    };
    const flat = data.series.flatMap((s) => s.points);
    expect(flat.length).toBe(rows.length);
    // every input row appears exactly once, with all nine fields intact
    for (const r of rows) {
      const hit = flat.filter(
        (p) => p.power_dBm === r.power_dBm && p.eta === r.eta
          && p.equalization === r.equalization,
      );
      expect(hit).toEqual([r]);
    }
  });
});
