/** Grouping of sweep rows into drawable series. */

import { SchemaError, type SweepRow } from "./schema.js";

export type XAxis = "eta" | "power_dBm";
export type YField = "air_bound" | "air_unbiased";

export interface PlotSpec {
  xAxis: XAxis;
  yField: YField;
  title?: string;
}

export interface Series {
  power_dBm: number;
  equalization: string;
  /** dashed stroke for backpropagation, solid otherwise */
  dashed: boolean;
  label: string;
  x: number[];
  y: number[];
  err: number[];
  /** source rows in plotted order, all columns */
  points: SweepRow[];
}

export interface Figure {
  spec: PlotSpec;
  xLog: boolean;
  series: Series[];
}

/**
 * One series per (power, equalization) pair, first-appearance order;
 * points keep the input row order. Log-scaled x (the selection-rate axis)
 * requires strictly positive x values.
 */
export function buildFigure(rows: SweepRow[], spec: PlotSpec): Figure {
  if (rows.length === 0) {
    throw new SchemaError("no data rows to plot");
  }
  const xLog = spec.xAxis === "eta";
  const series = new Map<string, Series>();
  rows.forEach((row, idx) => {
    const x = row[spec.xAxis];
    if (xLog && !(x > 0)) {
      throw new SchemaError(
        `log-scaled x needs eta > 0, got ${x} in data row ${idx + 1}`,
      );
    }
    const key = `${row.power_dBm}|${row.equalization}`;
    let s = series.get(key);
    if (s === undefined) {
      s = {
        power_dBm: row.power_dBm,
        equalization: row.equalization,
        dashed: row.equalization.toLowerCase() === "dbp",
        label: `${row.power_dBm} dBm ${row.equalization.toUpperCase()}`,
        x: [],
        y: [],
        err: [],
        points: [],
      };
      series.set(key, s);
    }
    s.x.push(x);
    s.y.push(row[spec.yField]);
    s.err.push(row.mc_stderr);
    s.points.push(row);
  });
  return { spec, xLog, series: [...series.values()] };
}

/** Numeric sidecar: the plotted arrays plus every CSV column per point. */
export function sidecarData(fig: Figure): object {
  return {
    xAxis: fig.spec.xAxis,
    yField: fig.spec.yField,
    series: fig.series.map((s) => ({
      power_dBm: s.power_dBm,
      equalization: s.equalization,
      dashed: s.dashed,
      x: s.x,
      y: s.y,
      err: s.err,
      points: s.points,
    })),
  };
}
